#include "sclab/graph.hpp"

#include <algorithm>
#include <set>

namespace sclab {

ManipulationGraph::ManipulationGraph(int n, std::vector<std::vector<VertexId>> adjacency,
                                     int declared_k)
    : n_(n), declared_k_(declared_k), adj_(std::move(adjacency)) {
    if (n < 0) throw ValidationError("graph: negative universe size");
    if (declared_k < 0) throw ValidationError("graph: negative degree bound");
    if (static_cast<int>(adj_.size()) != n)
        throw ValidationError("graph: adjacency rows != universe size");
    for (int x = 0; x < n; ++x) {
        auto& row = adj_[static_cast<std::size_t>(x)];
        std::sort(row.begin(), row.end());
        if (static_cast<int>(row.size()) > declared_k)
            throw ValidationError("graph: out-degree of vertex " + std::to_string(x) +
                                  " exceeds declared bound " + std::to_string(declared_k));
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] < 0 || row[i] >= n)
                throw ValidationError("graph: neighbor index out of range at vertex " +
                                      std::to_string(x));
            if (row[i] == x)
                throw ValidationError("graph: self-loop at vertex " + std::to_string(x));
            if (i > 0 && row[i] == row[i - 1])
                throw ValidationError("graph: duplicate neighbor at vertex " + std::to_string(x));
        }
    }
}

ManipulationGraph ManipulationGraph::arcless(int n) {
    return ManipulationGraph(n, std::vector<std::vector<VertexId>>(static_cast<std::size_t>(n)),
                             0);
}

const std::vector<VertexId>& ManipulationGraph::neighbors(VertexId x) const {
    if (x < 0 || x >= n_) throw ValidationError("graph: vertex out of range");
    return adj_[static_cast<std::size_t>(x)];
}

std::vector<VertexId> ManipulationGraph::closed_neighbors(VertexId x) const {
    const auto& open = neighbors(x);
    std::vector<VertexId> out;
    out.reserve(open.size() + 1);
    bool inserted = false;
    for (VertexId v : open) {
        if (!inserted && x < v) {
            out.push_back(x);
            inserted = true;
        }
        out.push_back(v);
    }
    if (!inserted) out.push_back(x);
    return out;
}

bool ManipulationGraph::has_arc(VertexId from, VertexId to) const {
    const auto& row = neighbors(from);
    return std::binary_search(row.begin(), row.end(), to);
}

int ManipulationGraph::max_out_degree() const {
    std::size_t best = 0;
    for (const auto& row : adj_) best = std::max(best, row.size());
    return static_cast<int>(best);
}

int ManipulationGraph::arc_count() const {
    std::size_t total = 0;
    for (const auto& row : adj_) total += row.size();
    return static_cast<int>(total);
}

bool ManipulationGraph::same_neighborhoods(const ManipulationGraph& other) const {
    return n_ == other.n_ && adj_ == other.adj_;
}

bool ManipulationGraph::arc_subset_of(const ManipulationGraph& other) const {
    if (n_ != other.n_) return false;
    for (int x = 0; x < n_; ++x) {
        const auto& mine = adj_[static_cast<std::size_t>(x)];
        const auto& theirs = other.adj_[static_cast<std::size_t>(x)];
        if (!std::includes(theirs.begin(), theirs.end(), mine.begin(), mine.end())) return false;
    }
    return true;
}

Hypothesis::Hypothesis(std::vector<std::uint8_t> labels) : labels_(std::move(labels)) {
    for (auto b : labels_)
        if (b > 1) throw ValidationError("hypothesis: labels must be bits");
}

Hypothesis Hypothesis::zeros(int n) {
    return Hypothesis(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0));
}

Hypothesis Hypothesis::ones(int n) {
    return Hypothesis(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1));
}

int Hypothesis::positive_count() const {
    int c = 0;
    for (auto b : labels_) c += b;
    return c;
}

Hypothesis Hypothesis::with_label(VertexId x, int bit) const {
    auto copy = labels_;
    copy.at(static_cast<std::size_t>(x)) = static_cast<std::uint8_t>(bit);
    return Hypothesis(std::move(copy));
}

HypothesisClass::HypothesisClass(std::vector<Hypothesis> members) : members_(std::move(members)) {
    if (members_.empty()) throw ValidationError("hypothesis class: empty");
    universe_ = members_.front().size();
    std::set<std::vector<std::uint8_t>> seen;
    for (const auto& h : members_) {
        if (h.size() != universe_)
            throw ValidationError("hypothesis class: mixed universe sizes");
        if (!seen.insert(h.labels()).second)
            throw ValidationError("hypothesis class: duplicate member");
    }
}

std::optional<int> HypothesisClass::index_of(const Hypothesis& h) const {
    for (int i = 0; i < size(); ++i)
        if (members_[static_cast<std::size_t>(i)] == h) return i;
    return std::nullopt;
}

GraphClass::GraphClass(std::vector<ManipulationGraph> members) : members_(std::move(members)) {
    if (members_.empty()) throw ValidationError("graph class: empty");
    universe_ = members_.front().size();
    declared_k_ = members_.front().declared_k();
    for (const auto& g : members_) {
        if (g.size() != universe_) throw ValidationError("graph class: mixed universe sizes");
        if (g.declared_k() != declared_k_)
            throw ValidationError("graph class: mixed degree bounds");
    }
}

TieBreak TieBreak::lex_min() { return TieBreak(); }

TieBreak TieBreak::uniform(std::uint64_t seed) {
    TieBreak t;
    Uniform u;
    u.rng.seed(seed);
    u.seed = seed;
    t.state_ = std::move(u);
    return t;
}

TieBreak TieBreak::scripted(std::vector<int> picks) {
    TieBreak t;
    t.state_ = Scripted{std::move(picks), 0};
    return t;
}

VertexId TieBreak::choose(const std::vector<VertexId>& candidates) {
    if (candidates.empty()) throw ValidationError("tie-break: empty candidate set");
    if (std::holds_alternative<Lex>(state_)) return candidates.front();
    if (auto* u = std::get_if<Uniform>(&state_)) {
        return candidates[uniform_index(u->rng, candidates.size())];
    }
    auto& s = std::get<Scripted>(state_);
    if (candidates.size() == 1) return candidates.front();
    if (s.pos >= s.picks.size()) throw TieBreakError("tie-break: script exhausted");
    int pick = s.picks[s.pos++];
    if (pick < 0 || pick >= static_cast<int>(candidates.size()))
        throw TieBreakError("tie-break: scripted index " + std::to_string(pick) +
                            " outside tie set of size " + std::to_string(candidates.size()));
    return candidates[static_cast<std::size_t>(pick)];
}

std::string TieBreak::describe() const {
    if (std::holds_alternative<Lex>(state_)) return "lexmin";
    if (auto* u = std::get_if<Uniform>(&state_)) return "uniform(" + std::to_string(u->seed) + ")";
    return "scripted";
}

VertexId best_response(const ManipulationGraph& graph, const Hypothesis& h, VertexId x,
                       TieBreak& rule) {
    if (h.size() != graph.size()) throw ValidationError("best_response: universe mismatch");
    if (h(x) == 1) return x;
    std::vector<VertexId> positive;
    for (VertexId v : graph.neighbors(x))
        if (h(v) == 1) positive.push_back(v);
    if (positive.empty()) return x;
    return rule.choose(positive);
}

int induced_label(const ManipulationGraph& graph, const Hypothesis& h, VertexId x) {
    if (h.size() != graph.size()) throw ValidationError("induced_label: universe mismatch");
    if (h(x) == 1) return 1;
    for (VertexId v : graph.neighbors(x))
        if (h(v) == 1) return 1;
    return 0;
}

int induced_label(const ManipulationGraph& graph, const Hypothesis& h, VertexId x,
                  TieBreak& rule) {
    return h(best_response(graph, h, x, rule));
}

Hypothesis induced_labeling(const ManipulationGraph& graph, const Hypothesis& h) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(graph.size()), 0);
    for (VertexId x = 0; x < graph.size(); ++x)
        out[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(induced_label(graph, h, x));
    return Hypothesis(std::move(out));
}

int strategic_loss(const ManipulationGraph& graph, const Hypothesis& h, const Agent& agent) {
    return induced_label(graph, h, agent.x) != agent.y ? 1 : 0;
}

int strategic_loss(const ManipulationGraph& graph, const Hypothesis& h, const Agent& agent,
                   TieBreak& rule) {
    return induced_label(graph, h, agent.x, rule) != agent.y ? 1 : 0;
}

Rational empirical_strategic_loss(const ManipulationGraph& graph, const Hypothesis& h,
                                  const std::vector<Agent>& sample) {
    if (sample.empty()) throw ValidationError("empirical loss: empty sample");
    long long total = 0;
    for (const auto& a : sample) total += strategic_loss(graph, h, a);
    return make_rational(total, static_cast<long long>(sample.size()));
}

namespace {

// Shared by both distribution types: validate exact weights and build integer
// cumulative sums over the common denominator so sampling stays exact.
template <typename Item>
void build_cumulative(const std::vector<std::pair<Item, Rational>>& support,
                      std::vector<BigInt>& cumulative, BigInt& total) {
    if (support.empty()) throw ValidationError("distribution: empty support");
    Rational sum = 0;
    BigInt denom = 1;
    for (const auto& [item, w] : support) {
        (void)item;
        if (w <= 0) throw ValidationError("distribution: non-positive weight");
        sum += w;
        denom = boost::multiprecision::lcm(denom, boost::multiprecision::denominator(w));
    }
    if (sum != 1) throw ValidationError("distribution: weights must sum to 1");
    cumulative.clear();
    BigInt acc = 0;
    for (const auto& [item, w] : support) {
        (void)item;
        acc += boost::multiprecision::numerator(w) * (denom / boost::multiprecision::denominator(w));
        cumulative.push_back(acc);
    }
    total = denom;
}

template <typename Item>
const Item& sample_from(const std::vector<std::pair<Item, Rational>>& support,
                        const std::vector<BigInt>& cumulative, const BigInt& total, Rng& rng) {
    // Draw an integer uniformly in [0, total) via 64-bit chunks. Supports in
    // this codebase have small denominators, so one chunk suffices in practice.
    BigInt draw;
    if (total <= BigInt(UINT64_MAX)) {
        draw = BigInt(uniform_index(rng, total.convert_to<std::uint64_t>()));
    } else {
        // Rejection sampling over the number of bits of `total`.
        const unsigned bits = boost::multiprecision::msb(total) + 1;
        do {
            draw = 0;
            for (unsigned got = 0; got < bits; got += 64) {
                draw <<= 64;
                draw += BigInt(rng());
            }
            draw >>= (((bits + 63) / 64) * 64 - bits);
        } while (draw >= total);
    }
    for (std::size_t i = 0; i < cumulative.size(); ++i)
        if (draw < cumulative[i]) return support[i].first;
    return support.back().first;
}

}  // namespace

AgentDistribution::AgentDistribution(std::vector<std::pair<Agent, Rational>> support)
    : support_(std::move(support)) {
    build_cumulative(support_, cumulative_, total_);
}

Agent AgentDistribution::sample(Rng& rng) const {
    return sample_from(support_, cumulative_, total_, rng);
}

VertexDistribution::VertexDistribution(std::vector<std::pair<VertexId, Rational>> support)
    : support_(std::move(support)) {
    build_cumulative(support_, cumulative_, total_);
}

VertexDistribution VertexDistribution::uniform(const std::vector<VertexId>& vertices) {
    std::vector<std::pair<VertexId, Rational>> support;
    const auto n = static_cast<long long>(vertices.size());
    for (VertexId v : vertices) support.emplace_back(v, make_rational(1, n));
    return VertexDistribution(std::move(support));
}

VertexId VertexDistribution::sample(Rng& rng) const {
    return sample_from(support_, cumulative_, total_, rng);
}

Rational population_strategic_loss(const ManipulationGraph& graph, const Hypothesis& h,
                                   const AgentDistribution& dist) {
    Rational total = 0;
    for (const auto& [agent, w] : dist.support())
        if (strategic_loss(graph, h, agent) == 1) total += w;
    return total;
}

}  // namespace sclab
