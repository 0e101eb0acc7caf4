#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sclab/errors.hpp"
#include "sclab/rational.hpp"
#include "sclab/rng.hpp"

namespace sclab {

// A vertex is an index into a fixed finite universe [0, n).
using VertexId = int;

// Directed graph of feasible feature manipulations. An arc (x, x') means an
// agent observed at x can present itself as x'. Self-loops are never stored;
// the closed neighborhood adds the vertex itself on demand.
class ManipulationGraph {
public:
    ManipulationGraph(int n, std::vector<std::vector<VertexId>> adjacency, int declared_k);

    static ManipulationGraph arcless(int n);

    int size() const { return n_; }
    int declared_k() const { return declared_k_; }
    // Open out-neighborhood N(x), sorted ascending.
    const std::vector<VertexId>& neighbors(VertexId x) const;
    // Closed neighborhood N[x] = {x} ∪ N(x), sorted ascending.
    std::vector<VertexId> closed_neighbors(VertexId x) const;
    bool has_arc(VertexId from, VertexId to) const;
    int max_out_degree() const;
    int arc_count() const;

    // True when out-neighborhoods agree on every vertex (declared_k ignored).
    bool same_neighborhoods(const ManipulationGraph& other) const;
    // True when every arc of this graph is an arc of `other`.
    bool arc_subset_of(const ManipulationGraph& other) const;

    bool operator==(const ManipulationGraph& other) const {
        return n_ == other.n_ && adj_ == other.adj_;
    }

private:
    int n_ = 0;
    int declared_k_ = 0;
    std::vector<std::vector<VertexId>> adj_;
};

// A labeling of the universe; 1 marks the positive region.
class Hypothesis {
public:
    explicit Hypothesis(std::vector<std::uint8_t> labels);
    static Hypothesis zeros(int n);
    static Hypothesis ones(int n);

    int size() const { return static_cast<int>(labels_.size()); }
    int operator()(VertexId x) const { return labels_[static_cast<std::size_t>(x)]; }
    const std::vector<std::uint8_t>& labels() const { return labels_; }
    int positive_count() const;

    Hypothesis with_label(VertexId x, int bit) const;

    bool operator==(const Hypothesis& other) const { return labels_ == other.labels_; }
    bool operator<(const Hypothesis& other) const { return labels_ < other.labels_; }

private:
    std::vector<std::uint8_t> labels_;
};

class HypothesisClass {
public:
    explicit HypothesisClass(std::vector<Hypothesis> members);

    int universe() const { return universe_; }
    int size() const { return static_cast<int>(members_.size()); }
    const Hypothesis& at(int i) const { return members_[static_cast<std::size_t>(i)]; }
    const std::vector<Hypothesis>& members() const { return members_; }
    std::optional<int> index_of(const Hypothesis& h) const;

private:
    int universe_ = 0;
    std::vector<Hypothesis> members_;
};

class GraphClass {
public:
    explicit GraphClass(std::vector<ManipulationGraph> members);

    int universe() const { return universe_; }
    int declared_k() const { return declared_k_; }
    int size() const { return static_cast<int>(members_.size()); }
    const ManipulationGraph& at(int i) const { return members_[static_cast<std::size_t>(i)]; }
    const std::vector<ManipulationGraph>& members() const { return members_; }

private:
    int universe_ = 0;
    int declared_k_ = 0;
    std::vector<ManipulationGraph> members_;
};

struct Agent {
    VertexId x = 0;
    int y = 0;

    bool operator==(const Agent& other) const { return x == other.x && y == other.y; }
};

// How an agent picks among several admissible manipulation targets. LexMin is
// the deterministic default; UniformRandom carries its own seeded stream (the
// unknown-graph batch learners require it, with the same seed discipline at
// train and test time); Scripted replays externally chosen indices and only
// consumes an entry when there is a genuine tie (two or more options).
class TieBreak {
public:
    static TieBreak lex_min();
    static TieBreak uniform(std::uint64_t seed);
    static TieBreak scripted(std::vector<int> picks);

    // candidates: nonempty, sorted ascending. Mutates the rule's state.
    VertexId choose(const std::vector<VertexId>& candidates);

    std::string describe() const;

private:
    struct Lex {};
    struct Uniform {
        Rng rng;
        std::uint64_t seed = 0;
    };
    struct Scripted {
        std::vector<int> picks;
        std::size_t pos = 0;
    };
    std::variant<Lex, Uniform, Scripted> state_;

    TieBreak() : state_(Lex{}) {}
};

// The agent's move: stay when already labeled positive or when no reachable
// vertex is, otherwise move to a positive out-neighbor chosen by the rule.
VertexId best_response(const ManipulationGraph& graph, const Hypothesis& h, VertexId x,
                       TieBreak& rule);

// Label the agent ends up with once it best-responds. Independent of the
// tie-break rule: it is 1 exactly when h(x)=1 or some out-neighbor is positive.
int induced_label(const ManipulationGraph& graph, const Hypothesis& h, VertexId x);

// Same label computed the long way, through an explicit best response. Exists
// so tests can assert the rule-independence claim above.
int induced_label(const ManipulationGraph& graph, const Hypothesis& h, VertexId x,
                  TieBreak& rule);

// The full vertex-wise induced labeling of h under the graph.
Hypothesis induced_labeling(const ManipulationGraph& graph, const Hypothesis& h);

// 0-1 loss of the induced label against the agent's true label.
int strategic_loss(const ManipulationGraph& graph, const Hypothesis& h, const Agent& agent);
int strategic_loss(const ManipulationGraph& graph, const Hypothesis& h, const Agent& agent,
                   TieBreak& rule);

Rational empirical_strategic_loss(const ManipulationGraph& graph, const Hypothesis& h,
                                  const std::vector<Agent>& sample);

// Finite-support distribution over agents with exact rational weights.
class AgentDistribution {
public:
    explicit AgentDistribution(std::vector<std::pair<Agent, Rational>> support);

    const std::vector<std::pair<Agent, Rational>>& support() const { return support_; }
    Agent sample(Rng& rng) const;

private:
    std::vector<std::pair<Agent, Rational>> support_;
    // Cumulative weights scaled to a common denominator, for integer sampling.
    std::vector<BigInt> cumulative_;
    BigInt total_;
};

// Finite-support distribution over vertices (marginal over features).
class VertexDistribution {
public:
    explicit VertexDistribution(std::vector<std::pair<VertexId, Rational>> support);
    static VertexDistribution uniform(const std::vector<VertexId>& vertices);

    const std::vector<std::pair<VertexId, Rational>>& support() const { return support_; }
    VertexId sample(Rng& rng) const;

private:
    std::vector<std::pair<VertexId, Rational>> support_;
    std::vector<BigInt> cumulative_;
    BigInt total_;
};

Rational population_strategic_loss(const ManipulationGraph& graph, const Hypothesis& h,
                                   const AgentDistribution& dist);

}  // namespace sclab
