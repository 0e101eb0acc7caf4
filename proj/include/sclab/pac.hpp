// Batch learners: strategic ERM under a known graph, and the unknown-graph
// pipeline that selects a graph first (consistency + minimal degree, or the
// estimable proxy loss) and a hypothesis second.
#pragma once

#include <vector>

#include "sclab/graph.hpp"

namespace sclab {

// One logged interaction: pre-move position, observed position, true label.
// v equals x exactly when the agent had nowhere to go under the probe.
struct LabeledObservation {
    VertexId x = 0;
    VertexId v = 0;
    int y = 0;
};

// Argmin of empirical strategic loss over the class; ties break to the
// smallest index.
int erm_strategic_index(const ManipulationGraph& graph, const HypothesisClass& cls,
                        const std::vector<Agent>& sample);
Hypothesis erm_strategic(const ManipulationGraph& graph, const HypothesisClass& cls,
                         const std::vector<Agent>& sample);

struct GraphHypothesisPair {
    int graph = 0;
    int hypothesis = 0;

    bool operator==(const GraphHypothesisPair& o) const {
        return graph == o.graph && hypothesis == o.hypothesis;
    }
};

// Realizable unknown-graph selection. Keeps pairs whose graph contains every
// observed move (rounds with v = x constrain nothing: the probe saw an empty
// neighborhood) and whose induced labels match every y; among those, returns
// the pair minimizing the summed out-neighborhood size at the observed
// positions, ties to the smallest (graph, hypothesis) indices.
GraphHypothesisPair ug_realizable(const GraphClass& graphs, const HypothesisClass& cls,
                                  const std::vector<LabeledObservation>& sample);

// (2/T) #{t : v_t != x_t, v_t not in N_G(x_t)} + (1/(k T)) sum_t |N_G(x_t)|.
// The stay-put rounds are excluded from the first term for the same reason
// as above; the term that does not depend on G is dropped.
Rational empirical_proxy_loss(const ManipulationGraph& graph,
                              const std::vector<LabeledObservation>& sample, int k_bound);

// P(N_G(x) != N_truth(x)) under the marginal, exactly.
Rational exact_neighborhood_loss(const ManipulationGraph& candidate,
                                 const ManipulationGraph& truth,
                                 const VertexDistribution& marginal);

// Full three-term proxy: 2 P(v not in N_G(x)) + (1/k) E|N_G(x)|
// - (1/k) E|N_truth(x)|, with v uniform on N_truth(x) and the first term 0
// at vertices whose true neighborhood is empty.
Rational exact_proxy_loss(const ManipulationGraph& candidate, const ManipulationGraph& truth,
                          const VertexDistribution& marginal, int k_bound);

// Two-stage agnostic learner: proxy-minimizing graph on the first sample,
// strategic ERM under that graph on the second sample's (x, y) pairs.
GraphHypothesisPair ug_agnostic(const GraphClass& graphs, const HypothesisClass& cls,
                                const std::vector<LabeledObservation>& first,
                                const std::vector<LabeledObservation>& second, int k_bound);

// Recommendation log: the set shown to the user and what they clicked;
// v = x encodes no click.
struct ClickRecord {
    VertexId x = 0;
    Hypothesis shown = Hypothesis::zeros(0);
    VertexId v = 0;
};

enum class NeighborhoodMode { Realizable, Agnostic };

// Graph selection from click logs. Realizable mode: among graphs containing
// every clicked arc, minimize the summed degree (ties to the smallest index).
// Agnostic mode: minimize the empirical proxy loss; sound for full probes
// (shown set = everything but x).
int learn_neighborhoods(const GraphClass& graphs, const std::vector<ClickRecord>& clicks,
                        NeighborhoodMode mode, int k_bound);

}  // namespace sclab
