// Deterministic fixture generators: the binary-representation and star
// families with their product classes, and the unknown-graph families built
// from one optional arc per column.
#pragma once

#include <optional>
#include <string>

#include "sclab/graph.hpp"

namespace sclab {

struct Fixture {
    std::string name;
    std::optional<ManipulationGraph> graph;  // single-graph fixtures
    std::optional<GraphClass> graphs;        // unknown-graph fixtures
    HypothesisClass cls;
    std::vector<std::string> vertex_names;
    std::optional<int> target_hypothesis;
    std::optional<int> target_graph;
};

inline constexpr int kConstructionUniverseBudget = 2000;

// d copies of: per bit position i in [log2 k], a star with hub x_{i,0} and
// leaves x_{i,1..k}; hypothesis j labels leaf x_{i,j} by bit i of (j mod k).
// Flat index of x_{i,j} inside copy c is c*log2(k)*(k+1) + i*(k+1) + j, and
// the class is the d-fold product over per-copy choices j_c in 1..k (copy 0
// is the most significant digit in the member ordering).
Fixture binary_rep_construction(int d, int k);

// d stars, hub x_{i,0} with leaves x_{i,1..k}; each hypothesis picks exactly
// one positive leaf per star. Flat index of x_{i,j} is i*(k+1) + j.
Fixture star_singletons(int d, int k);

// Universe {o} + blocks X_0..X_n of n vertices each; hypotheses 1{X_i} for
// i in 1..n; graphs wire each x_{0,j} to at most one of x_{1,j}..x_{n,j}.
// The target graph sends every column to block i_star.
Fixture ug_pac_lb_construction(int n, int i_star);

// Same block structure without o; column t is consumed at round t by the
// online adversary. No target: the adversary commits one adaptively.
Fixture ug_online_lb_construction(int n);

// Vertices A, B, C_1..C_n; graph i is the path A -> B -> C_i; hypotheses are
// singletons over the C_i.
Fixture chain_construction(int n);

// The distribution used with ug_pac_lb_construction: mass 1-2*eps on (o,0)
// and 2*eps spread uniformly over the probe block as (x_{0,j},1).
AgentDistribution ug_pac_lb_distribution(int n, const Rational& eps);

// Lazy view of a product family with one optional arc per column: column j
// either adds the arc sources[j] -> targets[j][c] for one choice c or stays
// arcless. Membership, counting, and sampling work without materializing the
// (|targets|+1)^columns members; enumerate() materializes small families.
class ColumnArcFamily {
public:
    ColumnArcFamily(int universe, std::vector<VertexId> sources,
                    std::vector<std::vector<VertexId>> targets);

    int universe() const { return universe_; }
    int columns() const { return static_cast<int>(sources_.size()); }
    BigInt size() const;

    // choice[j] in [-1, |targets[j]|): -1 means no arc in column j.
    ManipulationGraph at(const std::vector<int>& choice) const;
    bool contains(const ManipulationGraph& graph) const;
    ManipulationGraph sample(Rng& rng) const;

    // Members whose column-j neighborhood covers v for every listed (x, v)
    // pair with x = sources[j]; pairs off the sources make the count 0.
    BigInt count_consistent(const std::vector<std::pair<VertexId, VertexId>>& xv) const;

    GraphClass enumerate() const;  // ResourceError past kDimClassBudget-sized counts

private:
    int universe_;
    std::vector<VertexId> sources_;
    std::vector<std::vector<VertexId>> targets_;
};

}  // namespace sclab
