// Agnostic online learning with a known graph: a finite expert cover built
// from flagged reruns of a realizable learner, and a Hedge mixture over it.
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "sclab/graph.hpp"
#include "sclab/online_strategic.hpp"
#include "sclab/rng.hpp"

namespace sclab {

// Realizable learner that answers with the point hypothesis at x_t, labeled
// by an SOA run over the induced class. Its mistake bound is Ldim of the
// induced class, and it tolerates contradictory feeds (dead version space
// predicts 0), which the cover construction below relies on.
std::unique_ptr<StrategicOnlineLearner> induced_point_soa(const ManipulationGraph& graph,
                                                          const HypothesisClass& cls);

// Number of flag sets: sum over L <= flag_budget of C(rounds, L).
BigInt expert_cover_size(int rounds, int flag_budget);

// One expert per flag set F. On unflagged rounds the expert plays the
// realizable learner's proposal and feeds it the proposal's own induced
// label; on flagged rounds it flips that induced label, adjusting the played
// hypothesis so its induced prediction at x_t matches the flip. Every
// expert's play therefore depends only on the x-sequence, never on true
// labels, and for each h in the class the expert flagged exactly at the
// learner's would-be mistake rounds reproduces the induced predictions of h.
std::vector<std::unique_ptr<StrategicOnlineLearner>> expert_cover(
    const std::function<std::unique_ptr<StrategicOnlineLearner>()>& a_rel_factory, int rounds,
    int flag_budget, const ManipulationGraph& graph);

// sqrt(rounds * ln(experts) / 2).
double hedge_regret_bound(int rounds, const BigInt& experts);

// Multiplicative-weights mixture over the cover, learning rate
// sqrt(8 ln N / T). Each round it samples one expert's hypothesis to play;
// the regret guarantee is on the expected strategic loss, tracked exactly
// alongside the realized run.
class HedgeLearner final : public StrategicOnlineLearner {
public:
    HedgeLearner(std::vector<std::unique_ptr<StrategicOnlineLearner>> experts,
                 ManipulationGraph graph, int rounds, std::uint64_t seed);
    HedgeLearner(const HedgeLearner& o);

    std::unique_ptr<StrategicOnlineLearner> clone() const override;
    LearnerStats stats() const override;
    std::string name() const override { return "mw-agnostic-fi"; }

    double expected_cumulative_loss() const { return expected_loss_; }
    long long best_expert_loss() const;
    std::size_t cover_size() const { return experts_.size(); }
    double learning_rate() const { return eta_; }

protected:
    Hypothesis do_propose(const std::optional<VertexId>& x) override;
    void do_observe(const Feedback& fb) override;

private:
    std::vector<std::unique_ptr<StrategicOnlineLearner>> experts_;
    std::vector<long long> cum_loss_;
    ManipulationGraph graph_;
    double eta_;
    Rng rng_;
    double expected_loss_ = 0.0;
    std::vector<double> round_prob_;
    std::vector<int> round_yhat_;
};

// Cover with flag budget Ldim(induced class) over `induced_point_soa`, under
// Hedge. The seed drives only the per-round expert draw.
std::unique_ptr<HedgeLearner> agnostic_online_fi(const HypothesisClass& cls,
                                                 const ManipulationGraph& graph, int rounds,
                                                 std::uint64_t seed);

}  // namespace sclab
