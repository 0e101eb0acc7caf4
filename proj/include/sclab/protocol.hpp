// Round-by-round interaction engine: feedback settings, agent sources (i.i.d.
// and the adaptive lower-bound adversaries), transcripts, and the offline
// accounting oracles.
#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sclab/constructions.hpp"
#include "sclab/graph.hpp"
#include "sclab/online_strategic.hpp"
#include "sclab/pac.hpp"

namespace sclab {

enum class FeedbackSetting { FullyInformative, PmfX, PmfV, UgXThenV, UgPairAfter };

// CLI spellings: fi, pmf-x, pmf-v, ug, ug-pair.
std::string to_string(FeedbackSetting setting);
FeedbackSetting parse_setting(const std::string& text);

// True when the learner sees x_t before proposing; otherwise the proposal
// comes first and the agent is revealed afterwards.
bool x_before_proposal(FeedbackSetting setting);

// Where agents come from. IID sources ignore the learner's hypothesis;
// adversaries inspect it, which is exactly what the lower-bound arguments
// need. Sources that play realizably expose the surviving target at the end.
class AgentSource {
public:
    virtual ~AgentSource() = default;

    // x-first orderings.
    virtual VertexId pick_x();
    virtual int pick_y_after_h(const Hypothesis& h, VertexId x);
    // proposal-first orderings.
    virtual Agent pick_agent_after_h(const Hypothesis& h);

    // The graph agents best-respond to this round. Adaptive sources may
    // extend it between rounds, never within one.
    virtual const ManipulationGraph& round_graph() const = 0;
    virtual std::optional<std::pair<ManipulationGraph, Hypothesis>> final_target() const {
        return std::nullopt;
    }
};

std::unique_ptr<AgentSource> iid_source(ManipulationGraph graph_star, AgentDistribution dist,
                                        std::uint64_t seed,
                                        std::optional<Hypothesis> target = std::nullopt);

std::unique_ptr<AgentSource> sequence_source(ManipulationGraph graph_star,
                                             std::vector<Agent> agents,
                                             std::optional<Hypothesis> target = std::nullopt);

// The adaptive adversaries, each tied to its construction:
//  - fi_binrep_adversary(d, k): one hub per product bit, always answering the
//    opposite of the learner's induced label; forces d*log2(k) mistakes.
//  - pmf_star_adversary(d, k): per star, free mistakes until the learner
//    exposes a surviving leaf, which is then eliminated; forces d*(k-1)
//    against learners that never label a hub positive.
//  - ug_online_lb_adversary(n): fresh source column per round; a positive
//    block either wastes the learner's mistake on an already-dead candidate
//    or eliminates a live one, an all-negative column is answered 1 with a
//    per-candidate deferred arc; forces n-1.
//  - ug_chain_adversary(n): the two-hop chain family under pair feedback;
//    forces n-1.
std::unique_ptr<AgentSource> fi_binrep_adversary(int d, int k);
std::unique_ptr<AgentSource> pmf_star_adversary(int d, int k);
std::unique_ptr<AgentSource> ug_online_lb_adversary(int n);
std::unique_ptr<AgentSource> ug_chain_adversary(int n);

struct TranscriptRow {
    int t = 0;
    VertexId x = 0;
    VertexId v = 0;
    int yhat = 0;
    int y = 0;
    int mistake = 0;
    std::size_t experts = 0;
    Rational total_weight;
    Hypothesis h = Hypothesis::zeros(0);  // kept in memory for audits; files store the digest
};

struct RunResult {
    std::vector<TranscriptRow> rows;
    int mistakes = 0;
    std::optional<std::pair<ManipulationGraph, Hypothesis>> target;

    std::vector<Agent> agents() const;
};

// Executes `rounds` rounds of the interaction. Per round: the agent (and in
// x-first settings its position) is fixed, the learner proposes, the agent
// best-responds on the source's round graph under `rule`, the prediction is
// scored at the landing vertex, and setting-appropriate feedback goes back.
// Verifies yhat == induced label on every round, and replays the final
// target over the transcript when the source exposes one (zero loss, or
// ProtocolError).
RunResult run_online(StrategicOnlineLearner& learner, AgentSource& source,
                     FeedbackSetting setting, int rounds, TieBreak rule);

struct HindsightBest {
    int index = 0;
    long long loss = 0;
};

// Exhaustive best fixed hypothesis against a known agent sequence; ties to
// the smallest index. Regret of a run = mistakes - this loss.
HindsightBest best_in_hindsight(const HypothesisClass& cls, const ManipulationGraph& graph_star,
                                const std::vector<Agent>& agents);

enum class Probe { AllPositiveButX, AllPositive };

// Draws T agents i.i.d. and logs where they land under the probe hypothesis
// (everything-positive-but-x, or everything-positive which pins v = x).
// Tie-breaking is UniformRandom on a stream derived from the same seed.
std::vector<LabeledObservation> collect_pac_sample(const ManipulationGraph& graph_star,
                                                   const AgentDistribution& dist, int rounds,
                                                   Probe probe, std::uint64_t seed);

// FNV-1a over the label bits; transcripts store this plus the positive count
// instead of whole hypotheses.
std::uint64_t hypothesis_digest(const Hypothesis& h);

// Header t,x,v,yhat,y,mistake,experts,total_weight; weights are exact
// rationals rendered as num or num/den.
void write_transcript_csv(std::ostream& os, const RunResult& run);

}  // namespace sclab
