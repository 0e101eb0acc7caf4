#include "sclab/pac.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "sclab/errors.hpp"

namespace sclab {

namespace {

// Observations compressed per distinct x: how often it appeared, the labels
// seen, and the moved-to vertices. Selection costs then scale with the
// number of distinct positions, not the sample size.
struct Compressed {
    std::map<VertexId, std::tuple<long long, std::vector<int>, std::vector<VertexId>>> by_x;
};

Compressed compress(const std::vector<LabeledObservation>& sample) {
    Compressed c;
    for (const auto& ob : sample) {
        auto& [count, labels, moves] = c.by_x[ob.x];
        ++count;
        if (std::find(labels.begin(), labels.end(), ob.y) == labels.end())
            labels.push_back(ob.y);
        if (ob.v != ob.x && std::find(moves.begin(), moves.end(), ob.v) == moves.end())
            moves.push_back(ob.v);
    }
    return c;
}

int set_difference_size(const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
    // both sorted; |a \ b|
    int out = 0;
    auto it = b.begin();
    for (VertexId u : a) {
        while (it != b.end() && *it < u) ++it;
        if (it == b.end() || *it != u) ++out;
    }
    return out;
}

}  // namespace

int erm_strategic_index(const ManipulationGraph& graph, const HypothesisClass& cls,
                        const std::vector<Agent>& sample) {
    if (sample.empty()) throw ValidationError("erm: empty sample");
    int best = -1;
    long long best_loss = 0;
    for (int i = 0; i < cls.size(); ++i) {
        long long loss = 0;
        for (const auto& agent : sample) loss += strategic_loss(graph, cls.at(i), agent);
        if (best < 0 || loss < best_loss) {
            best = i;
            best_loss = loss;
        }
    }
    return best;
}

Hypothesis erm_strategic(const ManipulationGraph& graph, const HypothesisClass& cls,
                         const std::vector<Agent>& sample) {
    return cls.at(erm_strategic_index(graph, cls, sample));
}

GraphHypothesisPair ug_realizable(const GraphClass& graphs, const HypothesisClass& cls,
                                  const std::vector<LabeledObservation>& sample) {
    if (sample.empty()) throw ValidationError("ug_realizable: empty sample");
    if (graphs.universe() != cls.universe())
        throw ValidationError("ug_realizable: graph and hypothesis universes differ");
    const Compressed c = compress(sample);

    bool found = false;
    long long best_degree = 0;
    GraphHypothesisPair best;
    for (int g = 0; g < graphs.size(); ++g) {
        const auto& graph = graphs.at(g);
        bool moves_ok = true;
        long long degree = 0;
        for (const auto& [x, info] : c.by_x) {
            const auto& [count, labels, moves] = info;
            degree += count * static_cast<long long>(graph.neighbors(x).size());
            for (VertexId v : moves)
                if (!graph.has_arc(x, v)) {
                    moves_ok = false;
                    break;
                }
            if (!moves_ok) break;
        }
        if (!moves_ok) continue;
        if (found && degree > best_degree) continue;

        for (int h = 0; h < cls.size(); ++h) {
            bool labels_ok = true;
            for (const auto& [x, info] : c.by_x) {
                const auto& labels = std::get<1>(info);
                for (int y : labels)
                    if (induced_label(graph, cls.at(h), x) != y) {
                        labels_ok = false;
                        break;
                    }
                if (!labels_ok) break;
            }
            if (!labels_ok) continue;
            if (!found || degree < best_degree) {
                found = true;
                best_degree = degree;
                best = {g, h};
            }
            break;  // later h of the same graph only loses the index tie
        }
    }
    if (!found) throw RealizabilityError("ug_realizable: no consistent (graph, hypothesis) pair");
    return best;
}

Rational empirical_proxy_loss(const ManipulationGraph& graph,
                              const std::vector<LabeledObservation>& sample, int k_bound) {
    if (sample.empty()) throw ValidationError("proxy loss: empty sample");
    if (k_bound < 1) throw ValidationError("proxy loss: degree bound must be at least 1");
    long long misses = 0;
    long long degree = 0;
    for (const auto& ob : sample) {
        if (ob.v != ob.x && !graph.has_arc(ob.x, ob.v)) ++misses;
        degree += static_cast<long long>(graph.neighbors(ob.x).size());
    }
    const auto t = static_cast<long long>(sample.size());
    return make_rational(2 * misses, t) + make_rational(degree, k_bound * t);
}

Rational exact_neighborhood_loss(const ManipulationGraph& candidate,
                                 const ManipulationGraph& truth,
                                 const VertexDistribution& marginal) {
    if (candidate.size() != truth.size())
        throw ValidationError("neighborhood loss: graph sizes differ");
    Rational loss = 0;
    for (const auto& [x, w] : marginal.support())
        if (candidate.neighbors(x) != truth.neighbors(x)) loss += w;
    return loss;
}

Rational exact_proxy_loss(const ManipulationGraph& candidate, const ManipulationGraph& truth,
                          const VertexDistribution& marginal, int k_bound) {
    if (candidate.size() != truth.size()) throw ValidationError("proxy loss: graph sizes differ");
    if (k_bound < 1) throw ValidationError("proxy loss: degree bound must be at least 1");
    Rational loss = 0;
    for (const auto& [x, w] : marginal.support()) {
        const auto& true_nb = truth.neighbors(x);
        const auto& cand_nb = candidate.neighbors(x);
        if (!true_nb.empty()) {
            const int missed = set_difference_size(true_nb, cand_nb);
            loss += w * 2 * make_rational(missed, static_cast<long long>(true_nb.size()));
        }
        loss += w * make_rational(static_cast<long long>(cand_nb.size()) -
                                      static_cast<long long>(true_nb.size()),
                                  k_bound);
    }
    return loss;
}

GraphHypothesisPair ug_agnostic(const GraphClass& graphs, const HypothesisClass& cls,
                                const std::vector<LabeledObservation>& first,
                                const std::vector<LabeledObservation>& second, int k_bound) {
    if (first.empty() || second.empty()) throw ValidationError("ug_agnostic: empty sample");
    if (graphs.universe() != cls.universe())
        throw ValidationError("ug_agnostic: graph and hypothesis universes differ");

    int best_g = 0;
    Rational best_proxy = empirical_proxy_loss(graphs.at(0), first, k_bound);
    for (int g = 1; g < graphs.size(); ++g) {
        Rational proxy = empirical_proxy_loss(graphs.at(g), first, k_bound);
        if (proxy < best_proxy) {
            best_proxy = std::move(proxy);
            best_g = g;
        }
    }

    std::vector<Agent> agents;
    agents.reserve(second.size());
    for (const auto& ob : second) agents.push_back({ob.x, ob.y});
    return {best_g, erm_strategic_index(graphs.at(best_g), cls, agents)};
}

int learn_neighborhoods(const GraphClass& graphs, const std::vector<ClickRecord>& clicks,
                        NeighborhoodMode mode, int k_bound) {
    if (clicks.empty()) throw ValidationError("learn_neighborhoods: empty click stream");

    if (mode == NeighborhoodMode::Agnostic) {
        std::vector<LabeledObservation> sample;
        sample.reserve(clicks.size());
        for (const auto& c : clicks) sample.push_back({c.x, c.v, 0});
        int best = 0;
        Rational best_proxy = empirical_proxy_loss(graphs.at(0), sample, k_bound);
        for (int g = 1; g < graphs.size(); ++g) {
            Rational proxy = empirical_proxy_loss(graphs.at(g), sample, k_bound);
            if (proxy < best_proxy) {
                best_proxy = std::move(proxy);
                best = g;
            }
        }
        return best;
    }

    int best = -1;
    long long best_degree = 0;
    for (int g = 0; g < graphs.size(); ++g) {
        const auto& graph = graphs.at(g);
        bool ok = true;
        long long degree = 0;
        for (const auto& c : clicks) {
            if (c.v != c.x && !graph.has_arc(c.x, c.v)) {
                ok = false;
                break;
            }
            degree += static_cast<long long>(graph.neighbors(c.x).size());
        }
        if (!ok) continue;
        if (best < 0 || degree < best_degree) {
            best = g;
            best_degree = degree;
        }
    }
    if (best < 0) throw RealizabilityError("learn_neighborhoods: no graph explains the clicks");
    return best;
}

}  // namespace sclab
