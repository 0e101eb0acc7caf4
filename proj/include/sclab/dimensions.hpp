// Brute-force dimension oracles: VC dimension by subset enumeration and
// Littlestone dimension by memoized recursion, plus the induced-class map.
#pragma once

#include <map>

#include "sclab/graph.hpp"

namespace sclab {

// Enumeration budgets. Vertices whose label columns coincide across the whole
// class are indistinguishable for shattering and mistake trees, so the vertex
// budget applies to the deduplicated column count, not the raw universe size.
inline constexpr int kDimColumnBudget = 24;
inline constexpr int kDimClassBudget = 4096;

// Maps every hypothesis to its induced labeling and deduplicates.
HypothesisClass induce_class(const ManipulationGraph& graph, const HypothesisClass& cls);

// Largest shatterable vertex-subset size, by increasing-size enumeration with
// early exit. Throws ResourceError beyond the budgets.
int vc_dimension(const HypothesisClass& cls);

// Ldim(H) = max over x of 1 + min(Ldim(H_{x->0}), Ldim(H_{x->1})) when both
// restrictions are nonempty; 0 when |H| <= 1. Memoized on the surviving set.
int littlestone_dimension(const HypothesisClass& cls);

// Memoized Ldim over subsets of one fixed class. The online learners query
// version-space restrictions thousands of times, so the memo is shared across
// the whole lifetime of the evaluator (and across learner clones).
class LdimEvaluator {
public:
    explicit LdimEvaluator(const HypothesisClass& cls);

    // Indices must be sorted ascending and refer to the constructing class.
    int ldim(const std::vector<int>& members);

private:
    std::vector<std::vector<std::uint8_t>> cols_;
    std::map<std::vector<int>, int> memo_;
};

struct VcdUpperReport {
    int d;      // VC dimension of the base class
    int k;      // max out-degree of the graph
    int dbar;   // VC dimension of the induced class
    int bound;  // max(1, ceil(d * log2(max(2, k*d))))
    bool holds;
    bool within_one;  // holds with slack <= 1; reported, never a failure
};

VcdUpperReport verify_vcd_upper(const ManipulationGraph& graph, const HypothesisClass& cls);

}  // namespace sclab
