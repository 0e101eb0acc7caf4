// Strategic online learners: the propose/observe interface the protocol
// engine drives, and the expert reductions that lift a standard learner into
// the strategic feedback settings (known graph, known neighborhoods via
// feedback, and fully unknown graph).
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sclab/graph.hpp"
#include "sclab/online_standard.hpp"
#include "sclab/rational.hpp"

namespace sclab {

// What the environment reveals after a round. Which fields are populated
// depends on the feedback setting; a learner that needs a missing field
// throws ProtocolError.
struct Feedback {
    std::optional<VertexId> x;                          // pre-manipulation position
    std::optional<VertexId> v;                          // observed post-move position
    int yhat = 0;                                       // the round's prediction h_t(v_t)
    int y = 0;                                          // true label
    std::optional<std::vector<VertexId>> neighborhood;  // closed, sorted ascending
};

struct LearnerStats {
    std::size_t experts = 1;
    Rational total_weight = 1;
};

// One expert inside a reduction, exposed so tests can audit the weight
// invariant: weight >= (1/(2(k+1)))^shrink_events, and on realizable runs
// some expert keeps the target in its version space.
struct ExpertAudit {
    Rational weight;
    int shrink_events = 0;
    bool contains_target = false;
};

class StrategicOnlineLearner {
public:
    virtual ~StrategicOnlineLearner() = default;

    // Rounds strictly alternate; a double propose or a stray observe throws
    // ProtocolError. x is present exactly in the x-first settings.
    Hypothesis propose(const std::optional<VertexId>& x);
    void observe(const Feedback& fb);

    virtual std::unique_ptr<StrategicOnlineLearner> clone() const = 0;
    virtual LearnerStats stats() const { return {}; }
    virtual std::string name() const = 0;
    virtual std::vector<ExpertAudit> audit_experts(const Hypothesis& target) const {
        (void)target;
        return {};
    }
    // Surviving graph candidates, for learners that track any.
    virtual std::optional<int> candidate_graphs() const { return std::nullopt; }

protected:
    virtual Hypothesis do_propose(const std::optional<VertexId>& x) = 0;
    virtual void do_observe(const Feedback& fb) = 0;

    bool awaiting_observe_ = false;
};

// Hard cap on expert-set growth inside the reductions.
inline constexpr std::size_t kExpertBudget = 200000;

// Plays the wrapped learner's labeling verbatim and feeds it (v_t, y_t)
// tolerantly every round (x_t when v is absent). On an arcless graph this is
// the standard learner itself; on other graphs it is the natural baseline
// that ignores manipulation.
std::unique_ptr<StrategicOnlineLearner> standard_as_strategic(
    std::unique_ptr<StandardOnlineLearner> inner, int universe, std::string label);

// Known graph, fully informative feedback. Weighted experts over copies of
// the inner learner; plays the point hypothesis at x_t when the experts
// positive somewhere on N[x_t] hold at least half the weight. Mistakes <=
// floor(4 * Ldim * ln(2(k+1))).
std::unique_ptr<StrategicOnlineLearner> red2online_fi(
    std::unique_ptr<StandardOnlineLearner> inner, ManipulationGraph graph);

// Post-manipulation feedback with revealed neighborhoods; the graph itself
// is not consulted. Thresholds each vertex at a 1/(2(k+1)) weight fraction.
// False positives correct at v_t when it is revealed, otherwise via the
// round's closed neighborhood; false negatives split the all-negative
// experts across the revealed neighborhood. Mistakes <=
// floor(4k * Ldim * ln(2(k+1))).
std::unique_ptr<StrategicOnlineLearner> red2online_pmf(
    std::unique_ptr<StandardOnlineLearner> inner, int k_bound, int universe);

// Unknown graph from a finite candidate family. Wraps red2online_pmf (with
// degree bound 2k) and additionally labels positive every vertex whose arc
// from x_t lies in at most half of the surviving candidates; a mistake on
// such a revealed arc halves the candidate set instead of touching the inner
// learner. Mistakes <= ceil(log2 |G|) + floor(8k * Ldim * ln(2(2k+1))).
std::unique_ptr<StrategicOnlineLearner> ug_online(
    const std::function<std::unique_ptr<StandardOnlineLearner>()>& inner_factory,
    GraphClass graphs, int k_bound);

// Majority vote over surviving (graph, hypothesis) pairs, filtered each round
// by label consistency and movement consistency against the played
// hypothesis. Baseline for the pair-feedback setting.
std::unique_ptr<StrategicOnlineLearner> pair_halving(GraphClass graphs, HypothesisClass cls);

// The reductions' mistake ceilings, asserted to the integer with zero
// tolerance. ldim is the Littlestone dimension of the wrapped class.
int red2fi_mistake_ceiling(int ldim, int k);
int red2pmf_mistake_ceiling(int ldim, int k);  // requires k >= 1
int ug_online_mistake_ceiling(int ldim, int k, const BigInt& graph_count);

int ceil_log2(const BigInt& n);  // n >= 1

}  // namespace sclab
