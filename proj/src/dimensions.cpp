#include "sclab/dimensions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sclab/errors.hpp"

namespace sclab {

namespace {

// Distinct label columns: column j is the vector (h_0(j), ..., h_{m-1}(j)).
// Two vertices with equal columns behave identically in every shattering or
// mistake-tree argument, so only one representative is kept.
std::vector<std::vector<std::uint8_t>> distinct_columns(const HypothesisClass& cls) {
    std::set<std::vector<std::uint8_t>> seen;
    std::vector<std::vector<std::uint8_t>> cols;
    for (int x = 0; x < cls.universe(); ++x) {
        std::vector<std::uint8_t> col;
        col.reserve(static_cast<std::size_t>(cls.size()));
        for (const auto& h : cls.members()) col.push_back(static_cast<std::uint8_t>(h(x)));
        if (seen.insert(col).second) cols.push_back(std::move(col));
    }
    return cols;
}

void check_budgets(const HypothesisClass& cls, std::size_t columns) {
    if (cls.size() > kDimClassBudget)
        throw ResourceError("dimension oracle: class size " + std::to_string(cls.size()) +
                            " exceeds budget " + std::to_string(kDimClassBudget));
    if (static_cast<int>(columns) > kDimColumnBudget)
        throw ResourceError("dimension oracle: " + std::to_string(columns) +
                            " distinct label columns exceed budget " +
                            std::to_string(kDimColumnBudget));
}

bool is_shattered(const std::vector<std::vector<std::uint8_t>>& cols,
                  const std::vector<int>& subset, int members) {
    const std::size_t want = std::size_t{1} << subset.size();
    std::vector<char> seen(want, 0);
    std::size_t found = 0;
    for (int m = 0; m < members; ++m) {
        std::size_t pattern = 0;
        for (std::size_t i = 0; i < subset.size(); ++i)
            pattern |= static_cast<std::size_t>(cols[static_cast<std::size_t>(subset[i])]
                                                    [static_cast<std::size_t>(m)])
                       << i;
        if (!seen[pattern]) {
            seen[pattern] = 1;
            if (++found == want) return true;
        }
    }
    return false;
}

int floor_log2(std::size_t v) {
    int r = 0;
    while (v >>= 1) ++r;
    return r;
}

struct LdimSolver {
    const std::vector<std::vector<std::uint8_t>>& cols;
    std::map<std::vector<int>, int>& memo;

    int solve(const std::vector<int>& alive) {
        if (alive.size() <= 1) return 0;
        if (auto it = memo.find(alive); it != memo.end()) return it->second;
        const int ub = floor_log2(alive.size());

        // Balanced splits first: they are the only way to reach the log2 upper
        // bound, and hitting it ends the scan.
        std::vector<std::pair<int, std::size_t>> order;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            std::size_t ones = 0;
            for (int m : alive) ones += cols[j][static_cast<std::size_t>(m)];
            if (ones == 0 || ones == alive.size()) continue;
            order.emplace_back(-static_cast<int>(std::min(ones, alive.size() - ones)), j);
        }
        std::sort(order.begin(), order.end());

        int best = 0;
        for (const auto& [neg_balance, j] : order) {
            const auto smaller = static_cast<std::size_t>(-neg_balance);
            if (1 + floor_log2(smaller) <= best) break;  // sorted, so no later column helps
            std::vector<int> zero, one;
            for (int m : alive)
                (cols[j][static_cast<std::size_t>(m)] ? one : zero).push_back(m);
            best = std::max(best, 1 + std::min(solve(zero), solve(one)));
            if (best == ub) break;
        }
        memo[alive] = best;
        return best;
    }
};

}  // namespace

HypothesisClass induce_class(const ManipulationGraph& graph, const HypothesisClass& cls) {
    if (graph.size() != cls.universe())
        throw ValidationError("induce_class: graph and class universe sizes differ");
    std::vector<Hypothesis> members;
    std::set<std::vector<std::uint8_t>> seen;
    for (const auto& h : cls.members()) {
        Hypothesis induced = induced_labeling(graph, h);
        if (seen.insert(induced.labels()).second) members.push_back(std::move(induced));
    }
    return HypothesisClass(std::move(members));
}

int vc_dimension(const HypothesisClass& cls) {
    const auto cols = distinct_columns(cls);
    check_budgets(cls, cols.size());
    const int m = cls.size();

    std::vector<std::vector<int>> shattered;  // current level, as sorted index tuples
    for (std::size_t j = 0; j < cols.size(); ++j)
        if (is_shattered(cols, {static_cast<int>(j)}, m))
            shattered.push_back({static_cast<int>(j)});
    if (shattered.empty()) return 0;

    int dim = 1;
    // A shattered set minus its largest element is shattered, so extending the
    // previous level by strictly larger columns reaches every candidate.
    while (true) {
        std::vector<std::vector<int>> next;
        for (const auto& tuple : shattered) {
            for (int j = tuple.back() + 1; j < static_cast<int>(cols.size()); ++j) {
                auto extended = tuple;
                extended.push_back(j);
                if (is_shattered(cols, extended, m)) next.push_back(std::move(extended));
            }
        }
        if (next.empty()) return dim;
        shattered = std::move(next);
        ++dim;
    }
}

int littlestone_dimension(const HypothesisClass& cls) {
    const auto cols = distinct_columns(cls);
    check_budgets(cls, cols.size());
    std::vector<int> alive(static_cast<std::size_t>(cls.size()));
    for (int i = 0; i < cls.size(); ++i) alive[static_cast<std::size_t>(i)] = i;
    std::map<std::vector<int>, int> memo;
    LdimSolver solver{cols, memo};
    return solver.solve(alive);
}

LdimEvaluator::LdimEvaluator(const HypothesisClass& cls) : cols_(distinct_columns(cls)) {
    check_budgets(cls, cols_.size());
}

int LdimEvaluator::ldim(const std::vector<int>& members) {
    LdimSolver solver{cols_, memo_};
    return solver.solve(members);
}

VcdUpperReport verify_vcd_upper(const ManipulationGraph& graph, const HypothesisClass& cls) {
    VcdUpperReport r{};
    r.d = vc_dimension(cls);
    r.k = graph.max_out_degree();
    r.dbar = vc_dimension(induce_class(graph, cls));
    r.bound = std::max(
        1, static_cast<int>(std::ceil(r.d * std::log2(std::max(2, r.k * r.d)))));
    r.holds = r.dbar <= r.bound;
    r.within_one = r.holds && (r.bound - r.dbar <= 1);
    return r;
}

}  // namespace sclab
