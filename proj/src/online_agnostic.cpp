#include "sclab/online_agnostic.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sclab/dimensions.hpp"
#include "sclab/errors.hpp"
#include "sclab/online_standard.hpp"

namespace sclab {

namespace {

class InducedPointSoa final : public StrategicOnlineLearner {
public:
    InducedPointSoa(const ManipulationGraph& graph, const HypothesisClass& cls)
        : universe_(graph.size()), inner_(soa(induce_class(graph, cls))) {}

    InducedPointSoa(const InducedPointSoa& o)
        : StrategicOnlineLearner(o), universe_(o.universe_), inner_(o.inner_->clone()) {}

    std::unique_ptr<StrategicOnlineLearner> clone() const override {
        return std::make_unique<InducedPointSoa>(*this);
    }

    LearnerStats stats() const override {
        const int vs = inner_->version_size();
        return {static_cast<std::size_t>(vs), Rational(vs)};
    }
    std::string name() const override { return "induced-soa"; }

protected:
    Hypothesis do_propose(const std::optional<VertexId>& x) override {
        if (!x) throw ProtocolError("induced-soa needs x before proposing");
        return Hypothesis::zeros(universe_).with_label(*x, inner_->predict(*x));
    }

    void do_observe(const Feedback& fb) override {
        if (!fb.x) throw ProtocolError("induced-soa needs x in feedback");
        inner_->absorb(*fb.x, fb.y);
    }

private:
    int universe_;
    std::unique_ptr<StandardOnlineLearner> inner_;  // SOA over the induced class
};

class CoverExpert final : public StrategicOnlineLearner {
public:
    CoverExpert(std::unique_ptr<StrategicOnlineLearner> a_rel, std::vector<int> flags,
                std::shared_ptr<const ManipulationGraph> graph)
        : a_rel_(std::move(a_rel)), flags_(std::move(flags)), graph_(std::move(graph)) {}

    CoverExpert(const CoverExpert& o)
        : StrategicOnlineLearner(o), a_rel_(o.a_rel_->clone()), flags_(o.flags_),
          graph_(o.graph_), t_(o.t_) {}

    std::unique_ptr<StrategicOnlineLearner> clone() const override {
        return std::make_unique<CoverExpert>(*this);
    }

    std::string name() const override { return "cover-expert"; }

protected:
    Hypothesis do_propose(const std::optional<VertexId>& x) override {
        if (!x) throw ProtocolError("cover expert needs x before proposing");
        ++t_;
        Hypothesis h = a_rel_->propose(x);
        const int b = induced_label(*graph_, h, *x);
        int self_label = b;
        if (std::binary_search(flags_.begin(), flags_.end(), t_)) {
            self_label = 1 - b;
            if (self_label == 1) {
                h = h.with_label(*x, 1);
            } else {
                // Zeroing the closed neighborhood forces the induced label at
                // x to 0 without touching predictions elsewhere this round.
                for (VertexId u : graph_->closed_neighbors(*x)) h = h.with_label(u, 0);
            }
        }
        Feedback self;
        self.x = *x;
        self.v = *x;
        self.yhat = b;
        self.y = self_label;
        a_rel_->observe(self);
        return h;
    }

    void do_observe(const Feedback&) override {}  // self-labeled; the truth is ignored

private:
    std::unique_ptr<StrategicOnlineLearner> a_rel_;
    std::vector<int> flags_;  // sorted 1-based round indices
    std::shared_ptr<const ManipulationGraph> graph_;
    int t_ = 0;
};

}  // namespace

std::unique_ptr<StrategicOnlineLearner> induced_point_soa(const ManipulationGraph& graph,
                                                          const HypothesisClass& cls) {
    return std::make_unique<InducedPointSoa>(graph, cls);
}

BigInt expert_cover_size(int rounds, int flag_budget) {
    if (rounds < 0 || flag_budget < 0)
        throw ValidationError("expert_cover_size: negative argument");
    BigInt total = 0;
    BigInt binom = 1;  // C(rounds, 0)
    for (int level = 0; level <= std::min(flag_budget, rounds); ++level) {
        total += binom;
        binom = binom * (rounds - level) / (level + 1);
    }
    return total;
}

std::vector<std::unique_ptr<StrategicOnlineLearner>> expert_cover(
    const std::function<std::unique_ptr<StrategicOnlineLearner>()>& a_rel_factory, int rounds,
    int flag_budget, const ManipulationGraph& graph) {
    const BigInt n = expert_cover_size(rounds, flag_budget);
    if (n > kExpertBudget)
        throw ResourceError("expert cover of " + n.str() + " exceeds the budget");

    std::vector<std::unique_ptr<StrategicOnlineLearner>> cover;
    cover.reserve(n.convert_to<std::size_t>());
    auto shared_graph = std::make_shared<const ManipulationGraph>(graph);
    // Flag sets by size, lexicographic within a size; the empty set (the
    // untouched realizable run) always comes first.
    std::vector<int> flags;
    const int cap = std::min(flag_budget, rounds);
    for (int level = 0; level <= cap; ++level) {
        flags.assign(static_cast<std::size_t>(level), 0);
        for (int i = 0; i < level; ++i) flags[static_cast<std::size_t>(i)] = i + 1;
        while (true) {
            cover.push_back(
                std::make_unique<CoverExpert>(a_rel_factory(), flags, shared_graph));
            // next combination of {1..rounds} of this size
            int i = level - 1;
            while (i >= 0 && flags[static_cast<std::size_t>(i)] == rounds - level + 1 + i) --i;
            if (i < 0) break;
            ++flags[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < level; ++j)
                flags[static_cast<std::size_t>(j)] = flags[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return cover;
}

double hedge_regret_bound(int rounds, const BigInt& experts) {
    if (rounds < 0 || experts < 1) throw ValidationError("hedge_regret_bound: bad arguments");
    return std::sqrt(rounds * std::log(experts.convert_to<double>()) / 2.0);
}

HedgeLearner::HedgeLearner(std::vector<std::unique_ptr<StrategicOnlineLearner>> experts,
                           ManipulationGraph graph, int rounds, std::uint64_t seed)
    : experts_(std::move(experts)), graph_(std::move(graph)), rng_(seed) {
    if (experts_.empty()) throw ValidationError("hedge: empty expert set");
    if (rounds <= 0) throw ValidationError("hedge: horizon must be positive");
    cum_loss_.assign(experts_.size(), 0);
    eta_ = std::sqrt(8.0 * std::log(static_cast<double>(experts_.size())) / rounds);
}

HedgeLearner::HedgeLearner(const HedgeLearner& o)
    : StrategicOnlineLearner(o), cum_loss_(o.cum_loss_), graph_(o.graph_), eta_(o.eta_),
      rng_(o.rng_), expected_loss_(o.expected_loss_), round_prob_(o.round_prob_),
      round_yhat_(o.round_yhat_) {
    experts_.reserve(o.experts_.size());
    for (const auto& e : o.experts_) experts_.push_back(e->clone());
}

std::unique_ptr<StrategicOnlineLearner> HedgeLearner::clone() const {
    return std::unique_ptr<StrategicOnlineLearner>(new HedgeLearner(*this));
}

LearnerStats HedgeLearner::stats() const {
    double w = 0.0;
    for (long long l : cum_loss_) w += std::exp(-eta_ * static_cast<double>(l));
    return {experts_.size(), Rational(w)};
}

long long HedgeLearner::best_expert_loss() const {
    return *std::min_element(cum_loss_.begin(), cum_loss_.end());
}

Hypothesis HedgeLearner::do_propose(const std::optional<VertexId>& x) {
    if (!x) throw ProtocolError("hedge needs x before proposing");

    round_prob_.assign(experts_.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < experts_.size(); ++i) {
        round_prob_[i] = std::exp(-eta_ * static_cast<double>(cum_loss_[i]));
        total += round_prob_[i];
    }
    for (double& p : round_prob_) p /= total;

    round_yhat_.assign(experts_.size(), 0);
    std::vector<Hypothesis> plays;
    plays.reserve(experts_.size());
    for (std::size_t i = 0; i < experts_.size(); ++i) {
        plays.push_back(experts_[i]->propose(*x));
        round_yhat_[i] = induced_label(graph_, plays.back(), *x);
    }

    // 53-bit uniform draw, then a cumulative walk; both are exact enough to
    // be reproducible across platforms.
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    double acc = 0.0;
    std::size_t pick = experts_.size() - 1;
    for (std::size_t i = 0; i < experts_.size(); ++i) {
        acc += round_prob_[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    return plays[pick];
}

void HedgeLearner::do_observe(const Feedback& fb) {
    for (std::size_t i = 0; i < experts_.size(); ++i) {
        const int loss = round_yhat_[i] != fb.y ? 1 : 0;
        cum_loss_[i] += loss;
        expected_loss_ += round_prob_[i] * loss;
        Feedback release = fb;
        release.yhat = round_yhat_[i];
        experts_[i]->observe(release);
    }
}

std::unique_ptr<HedgeLearner> agnostic_online_fi(const HypothesisClass& cls,
                                                 const ManipulationGraph& graph, int rounds,
                                                 std::uint64_t seed) {
    const int budget = littlestone_dimension(induce_class(graph, cls));
    auto proto = induced_point_soa(graph, cls);
    auto cover = expert_cover([&proto] { return proto->clone(); }, rounds, budget, graph);
    return std::make_unique<HedgeLearner>(std::move(cover), graph, rounds, seed);
}

}  // namespace sclab
