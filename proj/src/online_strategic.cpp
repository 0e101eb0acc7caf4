#include "sclab/online_strategic.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sclab/errors.hpp"

namespace sclab {

Hypothesis StrategicOnlineLearner::propose(const std::optional<VertexId>& x) {
    if (awaiting_observe_)
        throw ProtocolError("propose called twice without an intervening observe");
    Hypothesis h = do_propose(x);
    awaiting_observe_ = true;
    return h;
}

void StrategicOnlineLearner::observe(const Feedback& fb) {
    if (!awaiting_observe_) throw ProtocolError("observe without a pending proposal");
    do_observe(fb);
    awaiting_observe_ = false;
}

namespace {

struct Expert {
    std::unique_ptr<StandardOnlineLearner> a;
    Rational w;
    int shrinks = 0;
};

std::vector<Expert> copy_experts(const std::vector<Expert>& experts) {
    std::vector<Expert> out;
    out.reserve(experts.size());
    for (const auto& e : experts) out.push_back({e.a->clone(), e.w, e.shrinks});
    return out;
}

Rational total_weight(const std::vector<Expert>& experts) {
    Rational w = 0;
    for (const auto& e : experts) w += e.w;
    return w;
}

std::vector<ExpertAudit> audit_of(const std::vector<Expert>& experts, const Hypothesis& target) {
    std::vector<ExpertAudit> out;
    out.reserve(experts.size());
    for (const auto& e : experts)
        out.push_back({e.w, e.shrinks, e.a->consistent_with(target)});
    return out;
}

// Splits every expert that is all-negative on the closed neighborhood into
// one child per neighborhood vertex, fed (vertex, 1) with weight w/(2|N|).
// Exactly the false-negative step both reductions share.
void split_false_negative(std::vector<Expert>& experts, const std::vector<VertexId>& nb) {
    if (nb.empty()) throw ProtocolError("false-negative split with an empty neighborhood");
    std::size_t negative = 0;
    for (const auto& e : experts) {
        bool all_negative = true;
        for (VertexId u : nb)
            if (e.a->predict(u) == 1) {
                all_negative = false;
                break;
            }
        if (all_negative) ++negative;
    }
    const std::size_t grown = experts.size() + negative * (nb.size() - 1);
    if (grown > kExpertBudget)
        throw ResourceError("expert budget exceeded: " + std::to_string(grown) + " experts");

    std::vector<Expert> next;
    next.reserve(grown);
    const Rational denom = 2 * static_cast<int>(nb.size());
    for (auto& e : experts) {
        bool all_negative = true;
        for (VertexId u : nb)
            if (e.a->predict(u) == 1) {
                all_negative = false;
                break;
            }
        if (!all_negative) {
            next.push_back(std::move(e));
            continue;
        }
        for (VertexId u : nb)
            next.push_back({e.a->clone_with_example(u, 1), e.w / denom, e.shrinks + 1});
    }
    experts = std::move(next);
}

class Red2Fi final : public StrategicOnlineLearner {
public:
    Red2Fi(std::unique_ptr<StandardOnlineLearner> inner, ManipulationGraph graph)
        : graph_(std::move(graph)) {
        experts_.push_back({std::move(inner), 1, 0});
    }

    Red2Fi(const Red2Fi& o)
        : StrategicOnlineLearner(o), graph_(o.graph_), experts_(copy_experts(o.experts_)),
          round_x_(o.round_x_) {}

    std::unique_ptr<StrategicOnlineLearner> clone() const override {
        return std::make_unique<Red2Fi>(*this);
    }

    LearnerStats stats() const override { return {experts_.size(), total_weight(experts_)}; }
    std::string name() const override { return "red2fi"; }
    std::vector<ExpertAudit> audit_experts(const Hypothesis& target) const override {
        return audit_of(experts_, target);
    }

protected:
    Hypothesis do_propose(const std::optional<VertexId>& x) override {
        if (!x) throw ProtocolError("red2fi needs x before proposing");
        round_x_ = *x;
        const auto nb = graph_.closed_neighbors(*x);
        Rational in = 0;
        for (const auto& e : experts_)
            if (positive_somewhere(e, nb)) in += e.w;
        Hypothesis h = Hypothesis::zeros(graph_.size());
        if (2 * in >= total_weight(experts_)) h = h.with_label(*x, 1);
        return h;
    }

    void do_observe(const Feedback& fb) override {
        if (fb.yhat == fb.y) return;
        if (!fb.x && !round_x_) throw ProtocolError("red2fi: round position unknown");
        const VertexId x = fb.x ? *fb.x : *round_x_;
        const auto nb = graph_.closed_neighbors(x);
        if (fb.yhat == 1) {
            // The true labeling is negative on all of N[x], so every expert
            // with a positive there is wrong at each such vertex.
            for (auto& e : experts_) {
                bool touched = false;
                for (VertexId u : nb)
                    if (e.a->predict(u) == 1) {
                        e.a->absorb(u, 0);
                        touched = true;
                    }
                if (touched) {
                    e.w /= 2;
                    ++e.shrinks;
                }
            }
        } else {
            split_false_negative(experts_, nb);
        }
    }

private:
    static bool positive_somewhere(const Expert& e, const std::vector<VertexId>& nb) {
        for (VertexId u : nb)
            if (e.a->predict(u) == 1) return true;
        return false;
    }

    ManipulationGraph graph_;
    std::vector<Expert> experts_;
    std::optional<VertexId> round_x_;
};

class Red2Pmf final : public StrategicOnlineLearner {
public:
    Red2Pmf(std::unique_ptr<StandardOnlineLearner> inner, int k_bound, int universe)
        : k_bound_(k_bound), universe_(universe) {
        if (universe <= 0) throw ValidationError("red2pmf: universe must be positive");
        if (k_bound < 0) throw ValidationError("red2pmf: negative degree bound");
        experts_.push_back({std::move(inner), 1, 0});
    }

    Red2Pmf(const Red2Pmf& o)
        : StrategicOnlineLearner(o), k_bound_(o.k_bound_), universe_(o.universe_),
          experts_(copy_experts(o.experts_)) {}

    std::unique_ptr<StrategicOnlineLearner> clone() const override {
        return std::make_unique<Red2Pmf>(*this);
    }

    LearnerStats stats() const override { return {experts_.size(), total_weight(experts_)}; }
    std::string name() const override { return "red2pmf"; }
    std::vector<ExpertAudit> audit_experts(const Hypothesis& target) const override {
        return audit_of(experts_, target);
    }

protected:
    Hypothesis do_propose(const std::optional<VertexId>&) override {
        const Rational w = total_weight(experts_);
        Hypothesis h = Hypothesis::zeros(universe_);
        for (VertexId u = 0; u < universe_; ++u) {
            Rational pos = 0;
            for (const auto& e : experts_)
                if (e.a->predict(u) == 1) pos += e.w;
            if (2 * (k_bound_ + 1) * pos >= w) h = h.with_label(u, 1);
        }
        return h;
    }

    void do_observe(const Feedback& fb) override {
        if (fb.yhat == fb.y) return;
        if (fb.yhat == 1) {
            if (fb.v) {
                // Correct exactly the experts whose weight carried v over the
                // threshold; each loses half.
                for (auto& e : experts_)
                    if (e.a->predict(*fb.v) == 1) {
                        e.a->absorb(*fb.v, 0);
                        e.w /= 2;
                        ++e.shrinks;
                    }
            } else if (fb.neighborhood) {
                // v is hidden but the neighborhood is known, and the true
                // labeling is negative on all of it; run the batch correction.
                for (auto& e : experts_) {
                    bool touched = false;
                    for (VertexId u : *fb.neighborhood)
                        if (e.a->predict(u) == 1) {
                            e.a->absorb(u, 0);
                            touched = true;
                        }
                    if (touched) {
                        e.w /= 2;
                        ++e.shrinks;
                    }
                }
            } else {
                throw ProtocolError("red2pmf: false positive without v or a neighborhood");
            }
        } else {
            if (!fb.neighborhood)
                throw ProtocolError("red2pmf: false negative without a neighborhood");
            split_false_negative(experts_, *fb.neighborhood);
        }
    }

private:
    int k_bound_;
    int universe_;
    std::vector<Expert> experts_;
};

class UgOnline final : public StrategicOnlineLearner {
public:
    UgOnline(const std::function<std::unique_ptr<StandardOnlineLearner>()>& inner_factory,
             GraphClass graphs, int k_bound)
        : graphs_(std::make_shared<const GraphClass>(std::move(graphs))), k_bound_(k_bound) {
        int deg = 0;
        for (const auto& g : graphs_->members()) deg = std::max(deg, g.max_out_degree());
        if (k_bound_ < deg)
            throw ValidationError("ug_online: degree bound below a candidate's out-degree");
        alive_.resize(static_cast<std::size_t>(graphs_->size()));
        for (int i = 0; i < graphs_->size(); ++i) alive_[static_cast<std::size_t>(i)] = i;
        inner_ = red2online_pmf(inner_factory(), 2 * k_bound_, graphs_->universe());
    }

    UgOnline(const UgOnline& o)
        : StrategicOnlineLearner(o), graphs_(o.graphs_), k_bound_(o.k_bound_),
          alive_(o.alive_), inner_(o.inner_->clone()), round_x_(o.round_x_) {}

    std::unique_ptr<StrategicOnlineLearner> clone() const override {
        return std::make_unique<UgOnline>(*this);
    }

    LearnerStats stats() const override { return inner_->stats(); }
    std::string name() const override { return "ug-online"; }
    std::vector<ExpertAudit> audit_experts(const Hypothesis& target) const override {
        return inner_->audit_experts(target);
    }
    std::optional<int> candidate_graphs() const override {
        return static_cast<int>(alive_.size());
    }

protected:
    Hypothesis do_propose(const std::optional<VertexId>& x) override {
        if (!x) throw ProtocolError("ug-online needs x before proposing");
        round_x_ = *x;
        Hypothesis h = inner_->propose(std::nullopt);
        // Vertices whose arc from x lives in at most half the surviving
        // candidates are labeled positive: moving there is either correct or
        // halves the candidate set.
        for (VertexId u = 0; u < graphs_->universe(); ++u) {
            if (u == *x) continue;
            if (2 * arc_count(*x, u) <= static_cast<int>(alive_.size())) h = h.with_label(u, 1);
        }
        return h;
    }

    void do_observe(const Feedback& fb) override {
        if (!fb.x && !round_x_) throw ProtocolError("ug-online: round position unknown");
        const VertexId x = fb.x ? *fb.x : *round_x_;
        if (!fb.v) throw ProtocolError("ug-online needs v in feedback");
        const VertexId v = *fb.v;

        if (fb.yhat == fb.y) {
            release_inner(fb);
            return;
        }
        if (v != x && 2 * arc_count(x, v) <= static_cast<int>(alive_.size())) {
            // The agent revealed a minority arc; keep only candidates that
            // contain it. The inner learner is not involved.
            std::vector<int> next;
            for (int i : alive_)
                if (graphs_->at(i).has_arc(x, v)) next.push_back(i);
            if (next.empty())
                throw RealizabilityError("ug-online: revealed arc is in no candidate graph");
            alive_ = std::move(next);
            release_inner(fb);
            return;
        }

        Feedback inner_fb;
        inner_fb.x = x;
        inner_fb.v = v;
        inner_fb.yhat = fb.yhat;
        inner_fb.y = fb.y;
        if (fb.yhat == 0) {
            // False negative: the agent stayed, so every true neighbor was
            // played negative, hence its arc is in a strict majority of the
            // candidates. That set (plus x itself) has at most 2k+1 vertices.
            if (v != x) throw ProtocolError("ug-online: false negative with a moved agent");
            std::vector<VertexId> nb{v};
            for (VertexId u = 0; u < graphs_->universe(); ++u)
                if (u != v && 2 * arc_count(v, u) > static_cast<int>(alive_.size()))
                    nb.push_back(u);
            std::sort(nb.begin(), nb.end());
            inner_fb.neighborhood = std::move(nb);
        }
        inner_->observe(inner_fb);
    }

private:
    int arc_count(VertexId from, VertexId to) const {
        int c = 0;
        for (int i : alive_)
            if (graphs_->at(i).has_arc(from, to)) ++c;
        return c;
    }

    // The inner learner proposed this round, so it must observe; a copy of
    // the round's feedback with yhat forced to y makes that a no-op.
    void release_inner(const Feedback& fb) {
        Feedback noop = fb;
        noop.yhat = noop.y;
        noop.neighborhood.reset();
        inner_->observe(noop);
    }

    std::shared_ptr<const GraphClass> graphs_;
    int k_bound_;
    std::vector<int> alive_;
    std::unique_ptr<StrategicOnlineLearner> inner_;
    std::optional<VertexId> round_x_;
};

class PairHalving final : public StrategicOnlineLearner {
public:
    PairHalving(GraphClass graphs, HypothesisClass cls)
        : graphs_(std::make_shared<const GraphClass>(std::move(graphs))),
          cls_(std::make_shared<const HypothesisClass>(std::move(cls))) {
        if (graphs_->universe() != cls_->universe())
            throw ValidationError("pair-halving: graph and hypothesis universes differ");
        for (int g = 0; g < graphs_->size(); ++g)
            for (int h = 0; h < cls_->size(); ++h) alive_.push_back({g, h});
    }

    std::unique_ptr<StrategicOnlineLearner> clone() const override {
        return std::make_unique<PairHalving>(*this);
    }

    LearnerStats stats() const override {
        return {alive_.size(), Rational(static_cast<int>(alive_.size()))};
    }
    std::string name() const override { return "pair-halving"; }

protected:
    Hypothesis do_propose(const std::optional<VertexId>&) override {
        Hypothesis h = Hypothesis::zeros(cls_->universe());
        for (VertexId u = 0; u < cls_->universe(); ++u) {
            std::size_t pos = 0;
            for (const auto& [g, m] : alive_)
                pos += static_cast<std::size_t>(induced_label(graphs_->at(g), cls_->at(m), u));
            if (2 * pos >= alive_.size()) h = h.with_label(u, 1);
        }
        last_h_ = h;
        return h;
    }

    void do_observe(const Feedback& fb) override {
        if (!fb.x || !fb.v) throw ProtocolError("pair-halving needs x and v in feedback");
        const VertexId x = *fb.x;
        const VertexId v = *fb.v;
        const Hypothesis& played = last_h_.value();
        std::vector<std::pair<int, int>> next;
        for (const auto& pair : alive_) {
            const auto& g = graphs_->at(pair.first);
            if (induced_label(g, cls_->at(pair.second), x) != fb.y) continue;
            if (v != x) {
                // A move reveals an arc of the true graph; it must profit,
                // which is a property of the played hypothesis alone.
                if (played(x) == 1 || played(v) == 0 || !g.has_arc(x, v)) continue;
            } else {
                if (played(x) == 0) {
                    bool reachable_positive = false;
                    for (VertexId u : g.neighbors(x))
                        if (played(u) == 1) {
                            reachable_positive = true;
                            break;
                        }
                    if (reachable_positive) continue;  // the agent would have moved
                }
            }
            next.push_back(pair);
        }
        if (next.empty())
            throw RealizabilityError("pair-halving: no (graph, hypothesis) pair survives");
        alive_ = std::move(next);
    }

private:
    std::shared_ptr<const GraphClass> graphs_;
    std::shared_ptr<const HypothesisClass> cls_;
    std::vector<std::pair<int, int>> alive_;
    std::optional<Hypothesis> last_h_;
};

class StandardAsStrategic final : public StrategicOnlineLearner {
public:
    StandardAsStrategic(std::unique_ptr<StandardOnlineLearner> inner, int universe,
                        std::string label)
        : inner_(std::move(inner)), universe_(universe), label_(std::move(label)) {
        if (universe <= 0) throw ValidationError("standard_as_strategic: empty universe");
    }

    StandardAsStrategic(const StandardAsStrategic& o)
        : StrategicOnlineLearner(o), inner_(o.inner_->clone()), universe_(o.universe_),
          label_(o.label_) {}

    std::unique_ptr<StrategicOnlineLearner> clone() const override {
        return std::make_unique<StandardAsStrategic>(*this);
    }

    LearnerStats stats() const override {
        const int vs = inner_->version_size();
        return {static_cast<std::size_t>(vs), Rational(vs)};
    }
    std::string name() const override { return label_; }

protected:
    Hypothesis do_propose(const std::optional<VertexId>&) override {
        Hypothesis h = Hypothesis::zeros(universe_);
        for (VertexId u = 0; u < universe_; ++u)
            if (inner_->predict(u) == 1) h = h.with_label(u, 1);
        return h;
    }

    void do_observe(const Feedback& fb) override {
        std::optional<VertexId> pt = fb.v ? fb.v : fb.x;
        if (!pt) throw ProtocolError("standard learner feedback carries neither x nor v");
        inner_->absorb(*pt, fb.y);
    }

private:
    std::unique_ptr<StandardOnlineLearner> inner_;
    int universe_;
    std::string label_;
};

}  // namespace

std::unique_ptr<StrategicOnlineLearner> standard_as_strategic(
    std::unique_ptr<StandardOnlineLearner> inner, int universe, std::string label) {
    return std::make_unique<StandardAsStrategic>(std::move(inner), universe, std::move(label));
}

std::unique_ptr<StrategicOnlineLearner> red2online_fi(
    std::unique_ptr<StandardOnlineLearner> inner, ManipulationGraph graph) {
    return std::make_unique<Red2Fi>(std::move(inner), std::move(graph));
}

std::unique_ptr<StrategicOnlineLearner> red2online_pmf(
    std::unique_ptr<StandardOnlineLearner> inner, int k_bound, int universe) {
    return std::make_unique<Red2Pmf>(std::move(inner), k_bound, universe);
}

std::unique_ptr<StrategicOnlineLearner> ug_online(
    const std::function<std::unique_ptr<StandardOnlineLearner>()>& inner_factory,
    GraphClass graphs, int k_bound) {
    return std::make_unique<UgOnline>(inner_factory, std::move(graphs), k_bound);
}

std::unique_ptr<StrategicOnlineLearner> pair_halving(GraphClass graphs, HypothesisClass cls) {
    return std::make_unique<PairHalving>(std::move(graphs), std::move(cls));
}

int red2fi_mistake_ceiling(int ldim, int k) {
    if (ldim < 0 || k < 0) throw ValidationError("mistake ceiling: negative argument");
    return static_cast<int>(std::floor(4.0 * ldim * std::log(2.0 * (k + 1))));
}

int red2pmf_mistake_ceiling(int ldim, int k) {
    if (ldim < 0 || k < 1) throw ValidationError("mistake ceiling: need k >= 1");
    return static_cast<int>(std::floor(4.0 * k * ldim * std::log(2.0 * (k + 1))));
}

int ug_online_mistake_ceiling(int ldim, int k, const BigInt& graph_count) {
    if (ldim < 0 || k < 1 || graph_count < 1)
        throw ValidationError("mistake ceiling: bad arguments");
    return ceil_log2(graph_count) +
           static_cast<int>(std::floor(8.0 * k * ldim * std::log(2.0 * (2 * k + 1))));
}

int ceil_log2(const BigInt& n) {
    if (n < 1) throw ValidationError("ceil_log2: argument must be positive");
    const auto bit = static_cast<int>(boost::multiprecision::msb(n));
    const bool exact = (n & (n - 1)) == 0;
    return bit + (exact ? 0 : 1);
}

}  // namespace sclab
