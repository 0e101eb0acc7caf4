#include "sclab/constructions.hpp"

#include <algorithm>
#include <set>

#include "sclab/dimensions.hpp"
#include "sclab/errors.hpp"

namespace sclab {

namespace {

bool power_of_two(int k) { return k >= 1 && (k & (k - 1)) == 0; }

int log2_int(int k) {
    int b = 0;
    while ((1 << b) < k) ++b;
    return b;
}

void check_universe(int n) {
    if (n > kConstructionUniverseBudget)
        throw ResourceError("construction: universe of " + std::to_string(n) +
                            " vertices exceeds budget " +
                            std::to_string(kConstructionUniverseBudget));
}

ColumnArcFamily ug_pac_lb_family(int n) {
    const auto idx = [n](int i, int j) { return 1 + i * n + (j - 1); };
    std::vector<VertexId> sources;
    std::vector<std::vector<VertexId>> targets;
    for (int j = 1; j <= n; ++j) {
        sources.push_back(idx(0, j));
        std::vector<VertexId> col;
        for (int i = 1; i <= n; ++i) col.push_back(idx(i, j));
        targets.push_back(std::move(col));
    }
    return ColumnArcFamily(1 + (n + 1) * n, std::move(sources), std::move(targets));
}

ColumnArcFamily ug_online_lb_family(int n) {
    const auto idx = [n](int i, int j) { return i * n + (j - 1); };
    std::vector<VertexId> sources;
    std::vector<std::vector<VertexId>> targets;
    for (int j = 1; j <= n; ++j) {
        sources.push_back(idx(0, j));
        std::vector<VertexId> col;
        for (int i = 1; i <= n; ++i) col.push_back(idx(i, j));
        targets.push_back(std::move(col));
    }
    return ColumnArcFamily((n + 1) * n, std::move(sources), std::move(targets));
}

}  // namespace

Fixture binary_rep_construction(int d, int k) {
    if (d < 1) throw ValidationError("binary_rep_construction: d must be positive");
    if (k < 2 || !power_of_two(k))
        throw ValidationError("binary_rep_construction: k must be a power of two >= 2");
    const int b = log2_int(k);
    const int n = d * b * (k + 1);
    check_universe(n);
    const auto idx = [b, k](int c, int i, int j) { return c * b * (k + 1) + i * (k + 1) + j; };

    std::vector<std::vector<VertexId>> adj(static_cast<std::size_t>(n));
    std::vector<std::string> names(static_cast<std::size_t>(n));
    for (int c = 0; c < d; ++c) {
        for (int i = 0; i < b; ++i) {
            auto& hub = adj[static_cast<std::size_t>(idx(c, i, 0))];
            for (int j = 1; j <= k; ++j) hub.push_back(idx(c, i, j));
            for (int j = 0; j <= k; ++j) {
                std::string tag = "x_{" + std::to_string(i) + "," + std::to_string(j) + "}";
                if (d > 1) tag = "x_{" + std::to_string(c) + "," + tag.substr(3);
                names[static_cast<std::size_t>(idx(c, i, j))] = tag;
            }
        }
    }
    ManipulationGraph graph(n, std::move(adj), k);

    // One hypothesis per choice vector (j_1..j_d), copy 0 most significant.
    // In copy c it labels leaf x_{c,i,j_c} by bit i of (j_c mod k); j_c = k
    // therefore contributes no positive vertex.
    std::vector<Hypothesis> members;
    long long count = 1;
    for (int c = 0; c < d; ++c) count *= k;
    for (long long code = 0; code < count; ++code) {
        std::vector<std::uint8_t> labels(static_cast<std::size_t>(n), 0);
        long long rest = code;
        for (int c = d - 1; c >= 0; --c) {
            const int j = static_cast<int>(rest % k) + 1;
            rest /= k;
            const int bits = j % k;
            for (int i = 0; i < b; ++i)
                if ((bits >> i) & 1)
                    labels[static_cast<std::size_t>(idx(c, i, j))] = 1;
        }
        members.emplace_back(std::move(labels));
    }

    return Fixture{"binrep(d=" + std::to_string(d) + ",k=" + std::to_string(k) + ")",
                   std::move(graph),
                   std::nullopt,
                   HypothesisClass(std::move(members)),
                   std::move(names),
                   std::nullopt,
                   std::nullopt};
}

Fixture star_singletons(int d, int k) {
    if (d < 1 || k < 1) throw ValidationError("star_singletons: d and k must be positive");
    const int n = d * (k + 1);
    check_universe(n);
    const auto idx = [k](int c, int j) { return c * (k + 1) + j; };

    std::vector<std::vector<VertexId>> adj(static_cast<std::size_t>(n));
    std::vector<std::string> names(static_cast<std::size_t>(n));
    for (int c = 0; c < d; ++c) {
        auto& hub = adj[static_cast<std::size_t>(idx(c, 0))];
        for (int j = 1; j <= k; ++j) hub.push_back(idx(c, j));
        for (int j = 0; j <= k; ++j)
            names[static_cast<std::size_t>(idx(c, j))] =
                "x_{" + std::to_string(c) + "," + std::to_string(j) + "}";
    }
    ManipulationGraph graph(n, std::move(adj), k);

    // One positive leaf per star; copy 0 is the most significant digit.
    std::vector<Hypothesis> members;
    long long count = 1;
    for (int c = 0; c < d; ++c) count *= k;
    for (long long code = 0; code < count; ++code) {
        std::vector<std::uint8_t> labels(static_cast<std::size_t>(n), 0);
        long long rest = code;
        for (int c = d - 1; c >= 0; --c) {
            const int j = static_cast<int>(rest % k) + 1;
            rest /= k;
            labels[static_cast<std::size_t>(idx(c, j))] = 1;
        }
        members.emplace_back(std::move(labels));
    }

    return Fixture{"star(d=" + std::to_string(d) + ",k=" + std::to_string(k) + ")",
                   std::move(graph),
                   std::nullopt,
                   HypothesisClass(std::move(members)),
                   std::move(names),
                   std::nullopt,
                   std::nullopt};
}

Fixture ug_pac_lb_construction(int n, int i_star) {
    if (n < 2) throw ValidationError("ug_pac_lb_construction: n must be >= 2");
    if (i_star < 1 || i_star > n)
        throw ValidationError("ug_pac_lb_construction: i_star must lie in 1..n");
    const int universe = 1 + (n + 1) * n;
    check_universe(universe);
    const auto idx = [n](int i, int j) { return 1 + i * n + (j - 1); };

    std::vector<std::string> names(static_cast<std::size_t>(universe));
    names[0] = "o";
    for (int i = 0; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            names[static_cast<std::size_t>(idx(i, j))] =
                "x_{" + std::to_string(i) + "," + std::to_string(j) + "}";

    std::vector<Hypothesis> members;
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint8_t> labels(static_cast<std::size_t>(universe), 0);
        for (int j = 1; j <= n; ++j) labels[static_cast<std::size_t>(idx(i, j))] = 1;
        members.emplace_back(std::move(labels));
    }

    GraphClass graphs = ug_pac_lb_family(n).enumerate();
    std::vector<std::vector<VertexId>> star_adj(static_cast<std::size_t>(universe));
    for (int j = 1; j <= n; ++j)
        star_adj[static_cast<std::size_t>(idx(0, j))] = {idx(i_star, j)};
    const ManipulationGraph g_star(universe, std::move(star_adj), 1);
    std::optional<int> target_graph;
    for (int g = 0; g < graphs.size(); ++g)
        if (graphs.at(g).same_neighborhoods(g_star)) {
            target_graph = g;
            break;
        }

    return Fixture{"ug-pac-lb(n=" + std::to_string(n) + ",i*=" + std::to_string(i_star) + ")",
                   std::nullopt,
                   std::move(graphs),
                   HypothesisClass(std::move(members)),
                   std::move(names),
                   i_star - 1,
                   target_graph};
}

Fixture ug_online_lb_construction(int n) {
    if (n < 2) throw ValidationError("ug_online_lb_construction: n must be >= 2");
    const int universe = (n + 1) * n;
    check_universe(universe);
    const auto idx = [n](int i, int j) { return i * n + (j - 1); };

    std::vector<std::string> names(static_cast<std::size_t>(universe));
    for (int i = 0; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            names[static_cast<std::size_t>(idx(i, j))] =
                "x_{" + std::to_string(i) + "," + std::to_string(j) + "}";

    std::vector<Hypothesis> members;
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint8_t> labels(static_cast<std::size_t>(universe), 0);
        for (int j = 1; j <= n; ++j) labels[static_cast<std::size_t>(idx(i, j))] = 1;
        members.emplace_back(std::move(labels));
    }

    return Fixture{"ug-online-lb(n=" + std::to_string(n) + ")",
                   std::nullopt,
                   ug_online_lb_family(n).enumerate(),
                   HypothesisClass(std::move(members)),
                   std::move(names),
                   std::nullopt,
                   std::nullopt};
}

Fixture chain_construction(int n) {
    if (n < 2) throw ValidationError("chain_construction: n must be >= 2");
    const int universe = n + 2;
    check_universe(universe);

    std::vector<std::string> names{"A", "B"};
    for (int i = 1; i <= n; ++i) names.push_back("C_" + std::to_string(i));

    std::vector<ManipulationGraph> graphs;
    for (int i = 1; i <= n; ++i) {
        std::vector<std::vector<VertexId>> adj(static_cast<std::size_t>(universe));
        adj[0] = {1};
        adj[1] = {1 + i};
        graphs.emplace_back(universe, std::move(adj), 1);
    }

    std::vector<Hypothesis> members;
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint8_t> labels(static_cast<std::size_t>(universe), 0);
        labels[static_cast<std::size_t>(1 + i)] = 1;
        members.emplace_back(std::move(labels));
    }

    return Fixture{"chain(n=" + std::to_string(n) + ")",
                   std::nullopt,
                   GraphClass(std::move(graphs)),
                   HypothesisClass(std::move(members)),
                   std::move(names),
                   std::nullopt,
                   std::nullopt};
}

AgentDistribution ug_pac_lb_distribution(int n, const Rational& eps) {
    if (n < 2) throw ValidationError("ug_pac_lb_distribution: n must be >= 2");
    if (eps <= 0 || eps >= make_rational(1, 2))
        throw ValidationError("ug_pac_lb_distribution: eps must lie in (0, 1/2)");
    std::vector<std::pair<Agent, Rational>> support;
    support.emplace_back(Agent{0, 0}, 1 - 2 * eps);
    for (int j = 1; j <= n; ++j)
        support.emplace_back(Agent{1 + (j - 1), 1}, 2 * eps / n);
    return AgentDistribution(std::move(support));
}

ColumnArcFamily::ColumnArcFamily(int universe, std::vector<VertexId> sources,
                                 std::vector<std::vector<VertexId>> targets)
    : universe_(universe), sources_(std::move(sources)), targets_(std::move(targets)) {
    if (sources_.size() != targets_.size())
        throw ValidationError("column family: sources/targets length mismatch");
    std::set<VertexId> seen;
    for (std::size_t j = 0; j < sources_.size(); ++j) {
        if (sources_[j] < 0 || sources_[j] >= universe_)
            throw ValidationError("column family: source out of range");
        if (!seen.insert(sources_[j]).second)
            throw ValidationError("column family: duplicate source");
        if (targets_[j].empty()) throw ValidationError("column family: empty target column");
        for (VertexId t : targets_[j])
            if (t < 0 || t >= universe_)
                throw ValidationError("column family: target out of range");
    }
}

BigInt ColumnArcFamily::size() const {
    BigInt total = 1;
    for (const auto& col : targets_) total *= BigInt(col.size() + 1);
    return total;
}

ManipulationGraph ColumnArcFamily::at(const std::vector<int>& choice) const {
    if (choice.size() != sources_.size())
        throw ValidationError("column family: choice length mismatch");
    std::vector<std::vector<VertexId>> adj(static_cast<std::size_t>(universe_));
    for (std::size_t j = 0; j < choice.size(); ++j) {
        if (choice[j] == -1) continue;
        if (choice[j] < 0 || choice[j] >= static_cast<int>(targets_[j].size()))
            throw ValidationError("column family: choice out of range");
        adj[static_cast<std::size_t>(sources_[j])] = {
            targets_[j][static_cast<std::size_t>(choice[j])]};
    }
    return ManipulationGraph(universe_, std::move(adj), 1);
}

bool ColumnArcFamily::contains(const ManipulationGraph& graph) const {
    if (graph.size() != universe_) return false;
    std::set<VertexId> sources(sources_.begin(), sources_.end());
    for (VertexId x = 0; x < universe_; ++x)
        if (!sources.count(x) && !graph.neighbors(x).empty()) return false;
    for (std::size_t j = 0; j < sources_.size(); ++j) {
        const auto& row = graph.neighbors(sources_[j]);
        if (row.empty()) continue;
        if (row.size() > 1) return false;
        if (std::find(targets_[j].begin(), targets_[j].end(), row.front()) == targets_[j].end())
            return false;
    }
    return true;
}

ManipulationGraph ColumnArcFamily::sample(Rng& rng) const {
    std::vector<int> choice;
    choice.reserve(sources_.size());
    for (const auto& col : targets_)
        choice.push_back(static_cast<int>(uniform_index(rng, col.size() + 1)) - 1);
    return at(choice);
}

BigInt ColumnArcFamily::count_consistent(
    const std::vector<std::pair<VertexId, VertexId>>& xv) const {
    // Columns are independent, so the count is a product of per-column counts.
    std::vector<std::set<VertexId>> required(sources_.size());
    for (const auto& [x, v] : xv) {
        const auto it = std::find(sources_.begin(), sources_.end(), x);
        if (it == sources_.end()) return 0;  // x never has out-arcs in this family
        required[static_cast<std::size_t>(it - sources_.begin())].insert(v);
    }
    BigInt total = 1;
    for (std::size_t j = 0; j < sources_.size(); ++j) {
        if (required[j].empty()) {
            total *= BigInt(targets_[j].size() + 1);
        } else if (required[j].size() > 1) {
            return 0;  // a single arc cannot cover two targets
        } else {
            const VertexId v = *required[j].begin();
            if (std::find(targets_[j].begin(), targets_[j].end(), v) == targets_[j].end())
                return 0;
        }
    }
    return total;
}

GraphClass ColumnArcFamily::enumerate() const {
    if (size() > kDimClassBudget)
        throw ResourceError("column family: " + size().str() +
                            " members exceed the enumeration budget");
    std::vector<ManipulationGraph> members;
    std::vector<int> choice(sources_.size(), -1);
    while (true) {
        members.push_back(at(choice));
        int j = static_cast<int>(choice.size()) - 1;
        // Mixed-radix increment, column 0 most significant, -1 before 0.
        while (j >= 0) {
            if (++choice[static_cast<std::size_t>(j)] <
                static_cast<int>(targets_[static_cast<std::size_t>(j)].size()))
                break;
            choice[static_cast<std::size_t>(j)] = -1;
            --j;
        }
        if (j < 0) break;
    }
    return GraphClass(std::move(members));
}

}  // namespace sclab
