#include "sclab/protocol.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <utility>

#include "sclab/errors.hpp"
#include "sclab/rng.hpp"

namespace sclab {

std::string to_string(FeedbackSetting setting) {
    switch (setting) {
        case FeedbackSetting::FullyInformative: return "fi";
        case FeedbackSetting::PmfX: return "pmf-x";
        case FeedbackSetting::PmfV: return "pmf-v";
        case FeedbackSetting::UgXThenV: return "ug";
        case FeedbackSetting::UgPairAfter: return "ug-pair";
    }
    throw ValidationError("unknown feedback setting");
}

FeedbackSetting parse_setting(const std::string& text) {
    if (text == "fi") return FeedbackSetting::FullyInformative;
    if (text == "pmf-x") return FeedbackSetting::PmfX;
    if (text == "pmf-v") return FeedbackSetting::PmfV;
    if (text == "ug") return FeedbackSetting::UgXThenV;
    if (text == "ug-pair") return FeedbackSetting::UgPairAfter;
    throw ValidationError("unknown feedback setting: " + text);
}

bool x_before_proposal(FeedbackSetting setting) {
    return setting == FeedbackSetting::FullyInformative || setting == FeedbackSetting::UgXThenV;
}

VertexId AgentSource::pick_x() {
    throw ProtocolError("this agent source does not disclose x before the proposal");
}

int AgentSource::pick_y_after_h(const Hypothesis&, VertexId) {
    throw ProtocolError("this agent source does not disclose x before the proposal");
}

Agent AgentSource::pick_agent_after_h(const Hypothesis&) {
    throw ProtocolError("this agent source requires x to be disclosed first");
}

namespace {

class IidSource final : public AgentSource {
public:
    IidSource(ManipulationGraph graph_star, AgentDistribution dist, std::uint64_t seed,
              std::optional<Hypothesis> target)
        : graph_(std::move(graph_star)), dist_(std::move(dist)), rng_(seed),
          target_(std::move(target)) {}

    VertexId pick_x() override {
        pending_ = dist_.sample(rng_);
        return pending_->x;
    }

    int pick_y_after_h(const Hypothesis&, VertexId) override {
        if (!pending_) throw ProtocolError("label requested before the agent was drawn");
        const int y = pending_->y;
        pending_.reset();
        return y;
    }

    Agent pick_agent_after_h(const Hypothesis&) override { return dist_.sample(rng_); }

    const ManipulationGraph& round_graph() const override { return graph_; }

    std::optional<std::pair<ManipulationGraph, Hypothesis>> final_target() const override {
        if (!target_) return std::nullopt;
        return std::make_pair(graph_, *target_);
    }

private:
    ManipulationGraph graph_;
    AgentDistribution dist_;
    Rng rng_;
    std::optional<Hypothesis> target_;
    std::optional<Agent> pending_;
};

class SequenceSource final : public AgentSource {
public:
    SequenceSource(ManipulationGraph graph_star, std::vector<Agent> agents,
                   std::optional<Hypothesis> target)
        : graph_(std::move(graph_star)), agents_(std::move(agents)), target_(std::move(target)) {}

    VertexId pick_x() override { return next().x; }

    int pick_y_after_h(const Hypothesis&, VertexId) override {
        return agents_.at(pos_ - 1).y;  // the agent pick_x just consumed
    }

    Agent pick_agent_after_h(const Hypothesis&) override { return next(); }

    const ManipulationGraph& round_graph() const override { return graph_; }

    std::optional<std::pair<ManipulationGraph, Hypothesis>> final_target() const override {
        if (!target_) return std::nullopt;
        return std::make_pair(graph_, *target_);
    }

private:
    Agent next() {
        if (pos_ >= agents_.size()) throw ProtocolError("agent sequence exhausted");
        return agents_[pos_++];
    }

    ManipulationGraph graph_;
    std::vector<Agent> agents_;
    std::optional<Hypothesis> target_;
    std::size_t pos_ = 0;
};

// Answers the opposite of the learner's induced label at one hub per round,
// pinning one bit of the surviving product hypothesis each time. Every
// scripted round is a mistake, for any deterministic learner.
class FiBinrepAdversary final : public AgentSource {
public:
    FiBinrepAdversary(int d, int k)
        : fx_(binary_rep_construction(d, k)), d_(d), k_(k) {
        b_ = 0;
        while ((1 << (b_ + 1)) <= k) ++b_;
        bits_.assign(static_cast<std::size_t>(d), std::vector<int>(static_cast<std::size_t>(b_), -1));
    }

    VertexId pick_x() override {
        ++t_;
        if (t_ <= d_ * b_) {
            const int c = (t_ - 1) / b_;
            const int i = (t_ - 1) % b_;
            return hub(c, i);
        }
        return hub(0, 0);
    }

    int pick_y_after_h(const Hypothesis& h, VertexId x) override {
        if (t_ <= d_ * b_) {
            const int c = (t_ - 1) / b_;
            const int i = (t_ - 1) % b_;
            const int y = 1 - induced_label(*fx_.graph, h, x);
            bits_[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] = y;
            return y;
        }
        const int bit = bits_[0][0];
        return bit < 0 ? 0 : bit;  // past the script: replay the pinned bit
    }

    const ManipulationGraph& round_graph() const override { return *fx_.graph; }

    std::optional<std::pair<ManipulationGraph, Hypothesis>> final_target() const override {
        long long code = 0;
        for (int c = 0; c < d_; ++c) {
            int value = 0;
            for (int i = 0; i < b_; ++i) {
                const int bit = bits_[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
                if (bit == 1) value |= 1 << i;
            }
            const int j = value == 0 ? k_ : value;  // j = k encodes the all-zero choice
            code = code * k_ + (j - 1);
        }
        return std::make_pair(*fx_.graph, fx_.cls.at(static_cast<int>(code)));
    }

private:
    VertexId hub(int c, int i) const { return c * b_ * (k_ + 1) + i * (k_ + 1); }

    Fixture fx_;
    int d_;
    int k_;
    int b_;
    std::vector<std::vector<int>> bits_;
    int t_ = 0;
};

// Works through the stars one at a time. A positive surviving leaf gets
// eliminated at the cost of one learner mistake; a positive dead leaf and an
// all-negative star are free mistakes; a positive hub is answered
// consistently and harmlessly (our reductions never play one here, since no
// hypothesis in the class labels a hub positive).
class PmfStarAdversary final : public AgentSource {
public:
    PmfStarAdversary(int d, int k) : fx_(star_singletons(d, k)), d_(d), k_(k) {
        survivors_.assign(static_cast<std::size_t>(d), {});
        for (int c = 0; c < d; ++c)
            for (int j = 1; j <= k; ++j) survivors_[static_cast<std::size_t>(c)].insert(j);
    }

    Agent pick_agent_after_h(const Hypothesis& h) override {
        int c = 0;
        while (c < d_ && survivors_[static_cast<std::size_t>(c)].size() < 2) ++c;
        if (c == d_) return {leaf(0, 0), 1};  // all stars resolved; hub of star 0, induced 1

        auto& alive = survivors_[static_cast<std::size_t>(c)];
        std::vector<int> positive;
        for (int j = 1; j <= k_; ++j)
            if (h(leaf(c, j)) == 1) positive.push_back(j);

        if (positive.empty()) return {leaf(c, 0), 1};  // whole star negative, or hub positive

        for (int j : positive)
            if (alive.count(j) == 0) return {leaf(c, j), 0};  // free: already eliminated

        alive.erase(positive.front());
        return {leaf(c, positive.front()), 0};
    }

    const ManipulationGraph& round_graph() const override { return *fx_.graph; }

    std::optional<std::pair<ManipulationGraph, Hypothesis>> final_target() const override {
        long long code = 0;
        for (int c = 0; c < d_; ++c)
            code = code * k_ + (*survivors_[static_cast<std::size_t>(c)].begin() - 1);
        return std::make_pair(*fx_.graph, fx_.cls.at(static_cast<int>(code)));
    }

private:
    VertexId leaf(int c, int j) const { return c * (k_ + 1) + j; }

    Fixture fx_;
    int d_;
    int k_;
    std::vector<std::set<int>> survivors_;
};

// One fresh source column per round. If the learner labels the column's
// source positive, answering 0 is a free mistake. If it labels some block
// vertex positive, the adversary wires the source there for every candidate:
// the agent moves, the prediction is wrong, and only the block's candidate
// (if even still alive) pays. If the whole column is negative, answering 1
// is a mistake for everyone, explained later by a per-candidate arc.
class UgOnlineLbAdversary final : public AgentSource {
    enum class Mode { Unset, None, Fixed, PerCandidate };

public:
    explicit UgOnlineLbAdversary(int n)
        : fx_(ug_online_lb_construction(n)), n_(n), graph_(ManipulationGraph::arcless((n + 1) * n)) {
        for (int i = 1; i <= n; ++i) survivors_.insert(i);
        modes_.assign(static_cast<std::size_t>(n), Mode::Unset);
        fixed_.assign(static_cast<std::size_t>(n), 0);
    }

    VertexId pick_x() override {
        ++t_;
        return source(t_ <= n_ ? t_ : 1);
    }

    int pick_y_after_h(const Hypothesis& h, VertexId x) override {
        if (t_ > n_) {
            // Past the script: replay column 1's committed answer.
            return modes_[0] == Mode::PerCandidate ? 1 : 0;
        }
        const int j = t_;
        auto& mode = modes_[static_cast<std::size_t>(j - 1)];
        int y;
        if (h(x) == 1) {
            mode = Mode::None;
            y = 0;
        } else {
            std::vector<int> positive;
            for (int i = 1; i <= n_; ++i)
                if (h(block(i, j)) == 1) positive.push_back(i);
            if (positive.empty()) {
                mode = Mode::PerCandidate;
                y = 1;
            } else {
                int dead = 0;
                for (int i : positive)
                    if (survivors_.count(i) == 0) {
                        dead = i;
                        break;
                    }
                if (dead != 0) {
                    mode = Mode::Fixed;
                    fixed_[static_cast<std::size_t>(j - 1)] = dead;
                    y = 0;
                } else if (survivors_.size() >= 2) {
                    const int victim = positive.front();
                    mode = Mode::Fixed;
                    fixed_[static_cast<std::size_t>(j - 1)] = victim;
                    survivors_.erase(victim);
                    y = 0;
                } else {
                    // Only the lone survivor's block is positive; concede the
                    // round rather than contradict it.
                    mode = Mode::None;
                    y = 0;
                }
            }
        }
        rebuild_graph();
        return y;
    }

    const ManipulationGraph& round_graph() const override { return graph_; }

    std::optional<std::pair<ManipulationGraph, Hypothesis>> final_target() const override {
        const int m = *survivors_.begin();
        return std::make_pair(build_graph(m), fx_.cls.at(m - 1));
    }

private:
    VertexId source(int j) const { return j - 1; }
    VertexId block(int i, int j) const { return i * n_ + (j - 1); }

    ManipulationGraph build_graph(int candidate) const {
        std::vector<std::vector<VertexId>> adj(static_cast<std::size_t>((n_ + 1) * n_));
        for (int j = 1; j <= n_; ++j) {
            switch (modes_[static_cast<std::size_t>(j - 1)]) {
                case Mode::Unset:
                case Mode::None: break;
                case Mode::Fixed:
                    adj[static_cast<std::size_t>(source(j))] = {
                        block(fixed_[static_cast<std::size_t>(j - 1)], j)};
                    break;
                case Mode::PerCandidate:
                    adj[static_cast<std::size_t>(source(j))] = {block(candidate, j)};
                    break;
            }
        }
        return ManipulationGraph((n_ + 1) * n_, std::move(adj), 1);
    }

    void rebuild_graph() { graph_ = build_graph(*survivors_.begin()); }

    Fixture fx_;
    int n_;
    std::set<int> survivors_;
    std::vector<Mode> modes_;
    std::vector<int> fixed_;
    ManipulationGraph graph_;
    int t_ = 0;
};

// The two-hop chain family under pair feedback: a positive surviving chain
// end costs the learner its candidate, everything else is a free mistake,
// and only the fully resolved state admits a harmless round.
class UgChainAdversary final : public AgentSource {
public:
    explicit UgChainAdversary(int n) : fx_(chain_construction(n)), n_(n) {
        for (int i = 1; i <= n; ++i) survivors_.insert(i);
    }

    Agent pick_agent_after_h(const Hypothesis& h) override {
        std::vector<int> positive;
        for (int i = 1; i <= n_; ++i)
            if (h(end(i)) == 1) positive.push_back(i);

        for (int i : positive)
            if (survivors_.count(i) == 0) return {end(i), 0};  // free

        if (!positive.empty() && survivors_.size() >= 2) {
            survivors_.erase(positive.front());
            return {end(positive.front()), 0};
        }
        if (h(0) == 1 || h(1) == 1) return {0, 0};  // free: induced label at A is 0
        if (positive.empty()) return {1, 1};        // free: induced label at B is 1
        return {1, 1};  // lone survivor's end is positive; harmless round
    }

    const ManipulationGraph& round_graph() const override {
        return fx_.graphs->at(*survivors_.begin() - 1);
    }

    std::optional<std::pair<ManipulationGraph, Hypothesis>> final_target() const override {
        const int m = *survivors_.begin();
        return std::make_pair(fx_.graphs->at(m - 1), fx_.cls.at(m - 1));
    }

private:
    VertexId end(int i) const { return 1 + i; }

    Fixture fx_;
    int n_;
    std::set<int> survivors_;
};

}  // namespace

std::unique_ptr<AgentSource> iid_source(ManipulationGraph graph_star, AgentDistribution dist,
                                        std::uint64_t seed, std::optional<Hypothesis> target) {
    return std::make_unique<IidSource>(std::move(graph_star), std::move(dist), seed,
                                       std::move(target));
}

std::unique_ptr<AgentSource> sequence_source(ManipulationGraph graph_star,
                                             std::vector<Agent> agents,
                                             std::optional<Hypothesis> target) {
    return std::make_unique<SequenceSource>(std::move(graph_star), std::move(agents),
                                            std::move(target));
}

std::unique_ptr<AgentSource> fi_binrep_adversary(int d, int k) {
    return std::make_unique<FiBinrepAdversary>(d, k);
}

std::unique_ptr<AgentSource> pmf_star_adversary(int d, int k) {
    return std::make_unique<PmfStarAdversary>(d, k);
}

std::unique_ptr<AgentSource> ug_online_lb_adversary(int n) {
    return std::make_unique<UgOnlineLbAdversary>(n);
}

std::unique_ptr<AgentSource> ug_chain_adversary(int n) {
    return std::make_unique<UgChainAdversary>(n);
}

std::vector<Agent> RunResult::agents() const {
    std::vector<Agent> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r.x, r.y});
    return out;
}

RunResult run_online(StrategicOnlineLearner& learner, AgentSource& source,
                     FeedbackSetting setting, int rounds, TieBreak rule) {
    if (rounds < 0) throw ValidationError("run_online: negative round count");
    RunResult run;
    run.rows.reserve(static_cast<std::size_t>(rounds));

    for (int t = 1; t <= rounds; ++t) {
        std::optional<VertexId> known_x;
        if (x_before_proposal(setting)) known_x = source.pick_x();
        const Hypothesis h = learner.propose(known_x);
        VertexId x;
        int y;
        if (known_x) {
            x = *known_x;
            y = source.pick_y_after_h(h, x);
        } else {
            const Agent agent = source.pick_agent_after_h(h);
            x = agent.x;
            y = agent.y;
        }

        const ManipulationGraph& graph = source.round_graph();
        const VertexId v = best_response(graph, h, x, rule);
        const int yhat = h(v);
        if (yhat != induced_label(graph, h, x))
            throw ProtocolError("prediction at the best response disagrees with the induced label");
        const int mistake = yhat != y ? 1 : 0;

        Feedback fb;
        fb.yhat = yhat;
        fb.y = y;
        switch (setting) {
            case FeedbackSetting::FullyInformative:
            case FeedbackSetting::UgXThenV:
            case FeedbackSetting::UgPairAfter:
                fb.x = x;
                fb.v = v;
                break;
            case FeedbackSetting::PmfX:
                fb.x = x;
                fb.neighborhood = graph.closed_neighbors(x);
                break;
            case FeedbackSetting::PmfV:
                fb.v = v;
                if (yhat == 0 && y == 1) fb.neighborhood = graph.closed_neighbors(v);
                break;
        }
        learner.observe(fb);

        const LearnerStats stats = learner.stats();
        run.rows.push_back({t, x, v, yhat, y, mistake, stats.experts, stats.total_weight, h});
        run.mistakes += mistake;
    }

    run.target = source.final_target();
    if (run.target) {
        for (const auto& row : run.rows)
            if (strategic_loss(run.target->first, run.target->second, {row.x, row.y}) != 0)
                throw ProtocolError("realizable source produced an inconsistent stream");
    }
    return run;
}

HindsightBest best_in_hindsight(const HypothesisClass& cls, const ManipulationGraph& graph_star,
                                const std::vector<Agent>& agents) {
    if (cls.size() == 0) throw ValidationError("best_in_hindsight: empty class");
    HindsightBest best{0, 0};
    for (int i = 0; i < cls.size(); ++i) {
        long long loss = 0;
        for (const auto& agent : agents) loss += strategic_loss(graph_star, cls.at(i), agent);
        if (i == 0 || loss < best.loss) best = {i, loss};
    }
    return best;
}

std::vector<LabeledObservation> collect_pac_sample(const ManipulationGraph& graph_star,
                                                   const AgentDistribution& dist, int rounds,
                                                   Probe probe, std::uint64_t seed) {
    if (rounds < 0) throw ValidationError("collect_pac_sample: negative sample size");
    Rng rng(seed);
    // Independent stream for the agents' tie-breaking, derived from the same
    // seed so train and test time stay aligned.
    TieBreak rule = TieBreak::uniform(seed ^ 0x9e3779b97f4a7c15ULL);

    std::vector<LabeledObservation> sample;
    sample.reserve(static_cast<std::size_t>(rounds));
    for (int t = 0; t < rounds; ++t) {
        const Agent agent = dist.sample(rng);
        Hypothesis h = Hypothesis::ones(graph_star.size());
        if (probe == Probe::AllPositiveButX) h = h.with_label(agent.x, 0);
        const VertexId v = best_response(graph_star, h, agent.x, rule);
        sample.push_back({agent.x, v, agent.y});
    }
    return sample;
}

std::uint64_t hypothesis_digest(const Hypothesis& h) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (std::uint8_t bit : h.labels()) {
        hash ^= bit;
        hash *= 1099511628211ULL;
    }
    return hash;
}

void write_transcript_csv(std::ostream& os, const RunResult& run) {
    os << "t,x,v,yhat,y,mistake,experts,total_weight\n";
    for (const auto& r : run.rows)
        os << r.t << ',' << r.x << ',' << r.v << ',' << r.yhat << ',' << r.y << ',' << r.mistake
           << ',' << r.experts << ',' << r.total_weight.str() << '\n';
}

}  // namespace sclab
