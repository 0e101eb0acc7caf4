// Command-line front end: fixture files, dimension reports, online runs, the
// learner-by-setting matrix, and neighborhood learning from click logs.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sclab/config.hpp"
#include "sclab/constructions.hpp"
#include "sclab/dimensions.hpp"
#include "sclab/errors.hpp"
#include "sclab/graph.hpp"
#include "sclab/io.hpp"
#include "sclab/online_agnostic.hpp"
#include "sclab/online_standard.hpp"
#include "sclab/online_strategic.hpp"
#include "sclab/pac.hpp"
#include "sclab/protocol.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

using namespace sclab;

// Raised when an enabled ceiling/floor/invariant check fails; exit code 1.
struct AssertionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::map<std::string, std::set<std::string>> kOnlineLearners = {
    {"soa", {"fi", "pmf-x", "pmf-v", "ug", "ug-pair"}},
    {"halving", {"fi", "pmf-x", "pmf-v", "ug", "ug-pair"}},
    {"red2fi", {"fi"}},
    {"red2pmf", {"pmf-x", "pmf-v"}},
    {"ug-online", {"ug"}},
    {"pair-halving", {"ug-pair"}},
    {"mw-agnostic-fi", {"fi"}},
};
const std::set<std::string> kPacLearners = {"erm", "ug-rel", "ug-agn"};

long long param_or(const std::map<std::string, long long>& params, const std::string& key,
                   long long fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

Fixture build_arcless(int n) {
    if (n < 1) throw ValidationError("arcless fixture: n must be positive");
    std::vector<Hypothesis> members;
    members.reserve(static_cast<std::size_t>(n));
    for (VertexId v = 0; v < n; ++v) members.push_back(Hypothesis::zeros(n).with_label(v, 1));
    std::vector<std::string> names;
    for (VertexId v = 0; v < n; ++v) names.push_back("x_" + std::to_string(v));
    return Fixture{"arcless(n=" + std::to_string(n) + ")",
                   ManipulationGraph::arcless(n),
                   std::nullopt,
                   HypothesisClass(std::move(members)),
                   std::move(names),
                   std::nullopt,
                   std::nullopt};
}

Fixture build_fixture(const ExperimentConfig& cfg) {
    if (cfg.fixture.empty()) {
        ManipulationGraph graph = read_graph_file(cfg.graph_file);
        HypothesisClass cls = read_class_file(cfg.class_file);
        if (cls.universe() != graph.size())
            throw ValidationError("class universe does not match the graph size");
        return Fixture{"files(" + cfg.graph_file + "," + cfg.class_file + ")",
                       std::move(graph),
                       std::nullopt,
                       std::move(cls),
                       {},
                       std::nullopt,
                       std::nullopt};
    }
    const auto& p = cfg.params;
    if (cfg.fixture == "binrep")
        return binary_rep_construction(static_cast<int>(param_or(p, "d", 1)),
                                       static_cast<int>(param_or(p, "k", 2)));
    if (cfg.fixture == "star")
        return star_singletons(static_cast<int>(param_or(p, "d", 1)),
                               static_cast<int>(param_or(p, "k", 2)));
    if (cfg.fixture == "ug-pac-lb")
        return ug_pac_lb_construction(static_cast<int>(param_or(p, "n", 3)),
                                      static_cast<int>(param_or(p, "istar", 1)));
    if (cfg.fixture == "ug-online-lb")
        return ug_online_lb_construction(static_cast<int>(param_or(p, "n", 3)));
    if (cfg.fixture == "chain")
        return chain_construction(static_cast<int>(param_or(p, "n", 3)));
    if (cfg.fixture == "arcless") return build_arcless(static_cast<int>(param_or(p, "n", 4)));
    throw ValidationError("unknown fixture name: " + cfg.fixture);
}

std::string fixture_slug(const ExperimentConfig& cfg) {
    if (cfg.fixture.empty()) return "files";
    std::string slug = cfg.fixture;
    for (const auto& [key, value] : cfg.params) slug += "-" + key + std::to_string(value);
    return slug;
}

int fixture_k(const Fixture& fx) {
    if (fx.graph) return fx.graph->max_out_degree();
    if (fx.graphs) return fx.graphs->declared_k();
    return 0;
}

long long floor_log2(BigInt n) {
    long long f = 0;
    while (n >= 2) {
        n /= 2;
        ++f;
    }
    return f;
}

// The scripted lower-bound adversary matching (fixture, setting), when one
// exists.
std::unique_ptr<AgentSource> make_adversary(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    if (cfg.fixture == "binrep" && cfg.setting == "fi")
        return fi_binrep_adversary(static_cast<int>(param_or(p, "d", 1)),
                                   static_cast<int>(param_or(p, "k", 2)));
    if (cfg.fixture == "star" && (cfg.setting == "pmf-x" || cfg.setting == "pmf-v"))
        return pmf_star_adversary(static_cast<int>(param_or(p, "d", 1)),
                                  static_cast<int>(param_or(p, "k", 2)));
    if (cfg.fixture == "ug-online-lb" && cfg.setting == "ug")
        return ug_online_lb_adversary(static_cast<int>(param_or(p, "n", 3)));
    if (cfg.fixture == "chain" && cfg.setting == "ug-pair")
        return ug_chain_adversary(static_cast<int>(param_or(p, "n", 3)));
    return nullptr;
}

// Realizable i.i.d. stream: x uniform over the universe, y the target's
// induced label.
std::unique_ptr<AgentSource> make_iid_realizable(const ManipulationGraph& graph,
                                                 const HypothesisClass& cls, int target_index,
                                                 std::uint64_t seed) {
    if (target_index < 0 || target_index >= cls.size())
        throw ValidationError("target hypothesis index out of range");
    const Hypothesis& target = cls.at(target_index);
    std::vector<std::pair<Agent, Rational>> support;
    for (VertexId x = 0; x < graph.size(); ++x)
        support.push_back({Agent{x, induced_label(graph, target, x)}, make_rational(1, graph.size())});
    return iid_source(graph, AgentDistribution(std::move(support)), seed, target);
}

// Pure-noise stream: (x, y) uniform over universe x {0,1}; never realizable.
std::unique_ptr<AgentSource> make_iid_noise(const ManipulationGraph& graph, std::uint64_t seed) {
    std::vector<std::pair<Agent, Rational>> support;
    for (VertexId x = 0; x < graph.size(); ++x)
        for (int y = 0; y <= 1; ++y)
            support.push_back({Agent{x, y}, make_rational(1, 2LL * graph.size())});
    return iid_source(graph, AgentDistribution(std::move(support)), seed);
}

struct OnlineRunRecord {
    std::string fixture_pretty;
    std::string fixture_slug;
    std::string learner;
    std::string setting;
    std::string stream;
    long long rounds = 0;
    std::uint64_t seed = 0;
    int mistakes = 0;
    long long hindsight_loss = 0;
    bool realizable = false;
    std::optional<long long> ceiling;
    std::string ceiling_rule;
    bool ceiling_checked = false;
    bool ceiling_ok = true;
    std::optional<long long> floor;
    std::string floor_rule;
    bool floor_checked = false;
    bool floor_ok = true;
    std::optional<double> regret;
    std::optional<double> regret_bound;
    bool regret_checked = false;
    bool regret_ok = true;
    RunResult run;
};

// One online run for one seed: fixture, learner, stream, engine, bounds.
OnlineRunRecord execute_online_run(const ExperimentConfig& cfg, std::uint64_t seed) {
    auto compat = kOnlineLearners.find(cfg.learner);
    if (compat == kOnlineLearners.end())
        throw ValidationError("unknown online learner: " + cfg.learner);
    if (compat->second.count(cfg.setting) == 0)
        throw ValidationError("learner " + cfg.learner + " does not run under setting " +
                              cfg.setting);

    Fixture fx = build_fixture(cfg);
    const FeedbackSetting setting = parse_setting(cfg.setting);
    const int universe = fx.graph ? fx.graph->size() : fx.graphs->universe();
    const int k = fixture_k(fx);
    const long long rounds = cfg.rounds;

    // Stream selection.
    std::string stream = cfg.stream;
    std::unique_ptr<AgentSource> source;
    if (stream == "adversary" || stream == "auto") {
        source = make_adversary(cfg);
        if (!source && stream == "adversary")
            throw ValidationError("no scripted adversary for fixture " + cfg.fixture +
                                  " under setting " + cfg.setting);
        if (source) stream = "adversary";
    }
    if (!source && stream == "noise") {
        if (!fx.graph) throw ValidationError("noise stream needs a single-graph fixture");
        source = make_iid_noise(*fx.graph, seed);
    }
    if (!source) {
        stream = "iid";
        const ManipulationGraph* graph = nullptr;
        ManipulationGraph picked = ManipulationGraph::arcless(1);
        if (fx.graph) {
            graph = &*fx.graph;
        } else {
            const int gi = static_cast<int>(
                param_or(cfg.params, "target_graph",
                         fx.target_graph ? *fx.target_graph : 0));
            if (gi < 0 || gi >= fx.graphs->size())
                throw ValidationError("target graph index out of range");
            picked = fx.graphs->at(gi);
            graph = &picked;
        }
        const int target = static_cast<int>(param_or(
            cfg.params, "target", fx.target_hypothesis ? *fx.target_hypothesis : 0));
        source = make_iid_realizable(*graph, fx.cls, target, seed);
    }

    // Learner; the agnostic learner keeps its concrete type for the regret
    // accounting below.
    std::unique_ptr<HedgeLearner> hedge;
    std::unique_ptr<StrategicOnlineLearner> learner;
    if (cfg.learner == "soa") {
        learner = standard_as_strategic(soa(fx.cls), universe, "soa");
    } else if (cfg.learner == "halving") {
        learner = standard_as_strategic(halving(fx.cls), universe, "halving");
    } else if (cfg.learner == "red2fi") {
        if (!fx.graph) throw ValidationError("red2fi needs a single-graph fixture");
        learner = red2online_fi(soa(fx.cls), *fx.graph);
    } else if (cfg.learner == "red2pmf") {
        learner = red2online_pmf(soa(fx.cls), std::max(1, k), universe);
    } else if (cfg.learner == "ug-online") {
        if (!fx.graphs) throw ValidationError("ug-online needs a graph-family fixture");
        const HypothesisClass cls = fx.cls;
        learner = ug_online([cls]() { return soa(cls); }, *fx.graphs, std::max(1, k));
    } else if (cfg.learner == "pair-halving") {
        if (!fx.graphs) throw ValidationError("pair-halving needs a graph-family fixture");
        learner = pair_halving(*fx.graphs, fx.cls);
    } else if (cfg.learner == "mw-agnostic-fi") {
        if (!fx.graph) throw ValidationError("mw-agnostic-fi needs a single-graph fixture");
        hedge = agnostic_online_fi(fx.cls, *fx.graph, static_cast<int>(rounds), seed);
    }
    StrategicOnlineLearner& ref = hedge ? static_cast<StrategicOnlineLearner&>(*hedge) : *learner;

    OnlineRunRecord rec;
    rec.fixture_pretty = fx.name;
    rec.fixture_slug = fixture_slug(cfg);
    rec.learner = cfg.learner;
    rec.setting = cfg.setting;
    rec.stream = stream;
    rec.rounds = rounds;
    rec.seed = seed;
    rec.run = run_online(ref, *source, setting, static_cast<int>(rounds), TieBreak::lex_min());
    rec.mistakes = rec.run.mistakes;
    rec.realizable = rec.run.target.has_value();

    const ManipulationGraph& hindsight_graph =
        rec.run.target ? rec.run.target->first : source->round_graph();
    rec.hindsight_loss = best_in_hindsight(fx.cls, hindsight_graph, rec.run.agents()).loss;

    const int ldim = littlestone_dimension(fx.cls);
    if (cfg.learner == "red2fi") {
        rec.ceiling = red2fi_mistake_ceiling(ldim, k);
        rec.ceiling_rule = "floor(4*Ldim*ln(2(k+1)))";
    } else if (cfg.learner == "red2pmf") {
        rec.ceiling = red2pmf_mistake_ceiling(ldim, std::max(1, k));
        rec.ceiling_rule = "floor(4k*Ldim*ln(2(k+1)))";
    } else if (cfg.learner == "ug-online") {
        rec.ceiling = ug_online_mistake_ceiling(ldim, std::max(1, k), BigInt(fx.graphs->size()));
        rec.ceiling_rule = "ceil(log2|G|)+floor(8k*Ldim*ln(2(2k+1)))";
    } else if (cfg.learner == "soa" && k == 0) {
        rec.ceiling = ldim;
        rec.ceiling_rule = "Ldim (arcless: strategic = standard)";
    } else if (cfg.learner == "halving" && k == 0) {
        rec.ceiling = floor_log2(BigInt(fx.cls.size()));
        rec.ceiling_rule = "floor(log2|H|) (arcless: strategic = standard)";
    }
    if (rec.ceiling && cfg.assert_ceilings && rec.realizable) {
        rec.ceiling_checked = true;
        rec.ceiling_ok = rec.mistakes <= *rec.ceiling;
    }

    if (stream == "adversary") {
        const auto& p = cfg.params;
        if (cfg.fixture == "binrep") {
            int b = 0;
            while ((1LL << (b + 1)) <= param_or(p, "k", 2)) ++b;
            rec.floor = param_or(p, "d", 1) * b;
            rec.floor_rule = "d*log2(k) forced mistakes";
        } else if (cfg.fixture == "star") {
            rec.floor = param_or(p, "d", 1) * (param_or(p, "k", 2) - 1);
            rec.floor_rule = "d*(k-1) forced mistakes";
        } else if (cfg.fixture == "ug-online-lb" || cfg.fixture == "chain") {
            rec.floor = param_or(p, "n", 3) - 1;
            rec.floor_rule = "n-1 forced mistakes";
        }
        if (rec.floor && cfg.assert_floors && rounds >= *rec.floor) {
            rec.floor_checked = true;
            rec.floor_ok = rec.mistakes >= *rec.floor;
        }
    }

    // Arcless equality: the strategic wrapper must match the standard learner
    // replayed on the identical stream, mistake for mistake.
    if (k == 0 && (cfg.learner == "soa" || cfg.learner == "halving") && cfg.assert_invariants) {
        auto baseline = cfg.learner == "soa" ? soa(fx.cls) : halving(fx.cls);
        long long base_mistakes = 0;
        for (const Agent& agent : rec.run.agents()) {
            if (baseline->predict(agent.x) != agent.y) ++base_mistakes;
            baseline->absorb(agent.x, agent.y);
        }
        rec.floor = base_mistakes;
        rec.floor_rule = "standard-learner mistakes (arcless equality)";
        rec.floor_checked = true;
        rec.floor_ok = rec.mistakes >= base_mistakes;
        if (!rec.ceiling) {
            rec.ceiling = base_mistakes;
            rec.ceiling_rule = rec.floor_rule;
        } else {
            rec.ceiling = std::min<long long>(*rec.ceiling, base_mistakes);
        }
        rec.ceiling_checked = true;
        rec.ceiling_ok = rec.mistakes <= *rec.ceiling;
    }

    if (hedge) {
        rec.regret = hedge->expected_cumulative_loss() - static_cast<double>(rec.hindsight_loss);
        rec.regret_bound = hedge_regret_bound(static_cast<int>(rounds), BigInt(hedge->cover_size()));
        if (cfg.assert_ceilings) {
            rec.regret_checked = true;
            rec.regret_ok = *rec.regret <= *rec.regret_bound + 1e-9;
        }
    }
    return rec;
}

std::string format_double(double value) {
    std::ostringstream os;
    os << std::setprecision(12) << value;
    return os.str();
}

std::string digest_hex(std::uint64_t digest) {
    std::ostringstream os;
    os << "0x" << std::hex << digest;
    return os.str();
}

std::optional<std::string> record_failure(const OnlineRunRecord& rec) {
    if (rec.ceiling_checked && !rec.ceiling_ok)
        return "mistakes " + std::to_string(rec.mistakes) + " exceed ceiling " +
               rec.ceiling_rule + " = " + std::to_string(*rec.ceiling) + " (fixture " +
               rec.fixture_pretty + ", learner " + rec.learner + ", seed " +
               std::to_string(rec.seed) + ")";
    if (rec.floor_checked && !rec.floor_ok)
        return "mistakes " + std::to_string(rec.mistakes) + " fall below floor " +
               rec.floor_rule + " = " + std::to_string(*rec.floor) + " (fixture " +
               rec.fixture_pretty + ", learner " + rec.learner + ", seed " +
               std::to_string(rec.seed) + ")";
    if (rec.regret_checked && !rec.regret_ok)
        return "regret " + format_double(*rec.regret) + " exceeds bound " +
               format_double(*rec.regret_bound) + " (fixture " + rec.fixture_pretty +
               ", learner " + rec.learner + ", seed " + std::to_string(rec.seed) + ")";
    return std::nullopt;
}

void write_run_files(const ExperimentConfig& cfg, const OnlineRunRecord& rec) {
    fs::create_directories(cfg.out_dir);
    const std::string base = "run_" + rec.fixture_slug + "_" + rec.learner + "_" + rec.setting +
                             "_seed" + std::to_string(rec.seed);
    {
        std::ofstream csv(fs::path(cfg.out_dir) / (base + ".csv"));
        if (!csv) throw ValidationError("cannot write transcript in " + cfg.out_dir);
        write_transcript_csv(csv, rec.run);
    }
    ordered_json meta;
    meta["fixture"] = rec.fixture_pretty;
    meta["learner"] = rec.learner;
    meta["setting"] = rec.setting;
    meta["stream"] = rec.stream;
    meta["mode"] = "online";
    meta["seed"] = rec.seed;
    meta["rounds"] = rec.rounds;
    meta["mistakes"] = rec.mistakes;
    meta["realizable"] = rec.realizable;
    meta["hindsight_loss"] = rec.hindsight_loss;
    meta["ceiling"] = rec.ceiling ? ordered_json(*rec.ceiling) : ordered_json(nullptr);
    meta["ceiling_rule"] = rec.ceiling_rule.empty() ? ordered_json(nullptr)
                                                    : ordered_json(rec.ceiling_rule);
    meta["ceiling_asserted"] = rec.ceiling_checked;
    meta["floor"] = rec.floor ? ordered_json(*rec.floor) : ordered_json(nullptr);
    meta["floor_rule"] = rec.floor_rule.empty() ? ordered_json(nullptr)
                                                : ordered_json(rec.floor_rule);
    meta["floor_asserted"] = rec.floor_checked;
    meta["regret"] = rec.regret ? ordered_json(*rec.regret) : ordered_json(nullptr);
    meta["regret_bound"] =
        rec.regret_bound ? ordered_json(*rec.regret_bound) : ordered_json(nullptr);
    meta["regret_asserted"] = rec.regret_checked;
    if (rec.run.rows.empty()) {
        meta["final_proposal_digest"] = nullptr;
        meta["final_proposal_positives"] = nullptr;
    } else {
        meta["final_proposal_digest"] = digest_hex(hypothesis_digest(rec.run.rows.back().h));
        meta["final_proposal_positives"] = rec.run.rows.back().h.positive_count();
    }
    std::ofstream side(fs::path(cfg.out_dir) / (base + ".json"));
    if (!side) throw ValidationError("cannot write sidecar in " + cfg.out_dir);
    side << meta.dump(2) << "\n";
}

// PAC run for one seed: draw samples, learn, score exactly.
void execute_pac_run(const ExperimentConfig& cfg, std::uint64_t seed,
                     std::vector<std::string>& failures) {
    if (kPacLearners.count(cfg.learner) == 0)
        throw ValidationError("unknown pac learner: " + cfg.learner);
    Fixture fx = build_fixture(cfg);
    const int k = fixture_k(fx);

    // Deployment graph and sampling distribution.
    std::optional<ManipulationGraph> graph_star;
    std::optional<AgentDistribution> dist;
    if (cfg.fixture == "ug-pac-lb") {
        const int n = static_cast<int>(param_or(cfg.params, "n", 3));
        const Rational eps = make_rational(param_or(cfg.params, "eps_num", 1),
                                           param_or(cfg.params, "eps_den", 10));
        graph_star = fx.graphs->at(*fx.target_graph);
        dist = ug_pac_lb_distribution(n, eps);
    } else {
        if (!fx.graph)
            throw ValidationError("pac mode needs a single-graph fixture or ug-pac-lb");
        graph_star = *fx.graph;
        const int target = static_cast<int>(param_or(
            cfg.params, "target", fx.target_hypothesis ? *fx.target_hypothesis : 0));
        const Hypothesis& h_star = fx.cls.at(target);
        std::vector<std::pair<Agent, Rational>> support;
        for (VertexId x = 0; x < graph_star->size(); ++x)
            support.push_back({Agent{x, induced_label(*graph_star, h_star, x)},
                               make_rational(1, graph_star->size())});
        dist = AgentDistribution(std::move(support));
    }

    long long samples = cfg.rounds;
    long long t1 = cfg.t1;
    long long t2 = cfg.t2;
    std::optional<int> chosen_graph;
    int chosen_hypothesis = 0;
    std::vector<LabeledObservation> logged;

    if (cfg.learner == "erm") {
        logged = collect_pac_sample(*graph_star, *dist, static_cast<int>(samples),
                                    Probe::AllPositive, seed);
        std::vector<Agent> agents;
        for (const auto& obs : logged) agents.push_back({obs.x, obs.y});
        chosen_hypothesis = erm_strategic_index(*graph_star, fx.cls, agents);
    } else if (cfg.learner == "ug-rel") {
        if (!fx.graphs) throw ValidationError("ug-rel needs a graph-family fixture");
        logged = collect_pac_sample(*graph_star, *dist, static_cast<int>(samples),
                                    Probe::AllPositiveButX, seed);
        GraphHypothesisPair pair = ug_realizable(*fx.graphs, fx.cls, logged);
        chosen_graph = pair.graph;
        chosen_hypothesis = pair.hypothesis;
    } else {  // ug-agn
        if (!fx.graphs) throw ValidationError("ug-agn needs a graph-family fixture");
        if (t1 == 0 && t2 == 0) {
            const long long ratio = std::min<long long>(std::max(1, k) * std::max(1, k), 9);
            t1 = samples * ratio / (ratio + 1);
            t2 = samples - t1;
        }
        auto first = collect_pac_sample(*graph_star, *dist, static_cast<int>(t1),
                                        Probe::AllPositiveButX, seed);
        auto second = collect_pac_sample(*graph_star, *dist, static_cast<int>(t2),
                                         Probe::AllPositive, seed ^ 0x517cc1b727220a95ULL);
        GraphHypothesisPair pair = ug_agnostic(*fx.graphs, fx.cls, first, second, std::max(1, k));
        chosen_graph = pair.graph;
        chosen_hypothesis = pair.hypothesis;
        logged = std::move(first);
        logged.insert(logged.end(), second.begin(), second.end());
    }

    const Hypothesis& chosen = fx.cls.at(chosen_hypothesis);
    const Rational loss = population_strategic_loss(*graph_star, chosen, *dist);

    // Files: the sample replayed under the learned hypothesis, plus metadata.
    fs::create_directories(cfg.out_dir);
    const std::string base = "pac_" + fixture_slug(cfg) + "_" + cfg.learner + "_seed" +
                             std::to_string(seed);
    {
        std::ofstream csv(fs::path(cfg.out_dir) / (base + ".csv"));
        if (!csv) throw ValidationError("cannot write sample log in " + cfg.out_dir);
        RunResult replay;
        int t = 0;
        for (const auto& obs : logged) {
            const int yhat = induced_label(*graph_star, chosen, obs.x);
            replay.rows.push_back({++t, obs.x, obs.v, yhat, obs.y, yhat != obs.y ? 1 : 0, 1,
                                   make_rational(1), chosen});
        }
        write_transcript_csv(csv, replay);
    }
    ordered_json meta;
    meta["fixture"] = fx.name;
    meta["learner"] = cfg.learner;
    meta["mode"] = "pac";
    meta["seed"] = seed;
    meta["samples"] = samples;
    meta["t1"] = t1;
    meta["t2"] = t2;
    meta["chosen_graph"] = chosen_graph ? ordered_json(*chosen_graph) : ordered_json(nullptr);
    meta["chosen_hypothesis"] = chosen_hypothesis;
    meta["population_loss"] = loss.str();
    meta["population_loss_double"] = loss.convert_to<double>();
    std::ofstream side(fs::path(cfg.out_dir) / (base + ".json"));
    side << meta.dump(2) << "\n";

    std::cout << "pac fixture=" << fx.name << " learner=" << cfg.learner << " seed=" << seed
              << " samples=" << samples << " chosen_h=" << chosen_hypothesis;
    if (chosen_graph) std::cout << " chosen_g=" << *chosen_graph;
    std::cout << " loss=" << loss.str() << "\n";

    const long long cap = param_or(cfg.params, "loss_cap_permille", -1);
    if (cap >= 0 && cfg.assert_invariants && loss > make_rational(cap, 1000))
        failures.push_back("population loss " + loss.str() + " exceeds cap " +
                           std::to_string(cap) + "/1000 (fixture " + fx.name + ", learner " +
                           cfg.learner + ", seed " + std::to_string(seed) + ")");
}

int cmd_run(const ExperimentConfig& cfg) {
    std::vector<std::string> failures;
    for (std::uint64_t seed : cfg.seeds) {
        if (cfg.mode == "pac") {
            execute_pac_run(cfg, seed, failures);
            continue;
        }
        OnlineRunRecord rec = execute_online_run(cfg, seed);
        write_run_files(cfg, rec);
        std::cout << "run fixture=" << rec.fixture_pretty << " learner=" << rec.learner
                  << " setting=" << rec.setting << " stream=" << rec.stream
                  << " seed=" << rec.seed << " rounds=" << rec.rounds
                  << " mistakes=" << rec.mistakes;
        if (rec.ceiling) std::cout << " ceiling=" << *rec.ceiling;
        if (rec.floor) std::cout << " floor=" << *rec.floor;
        if (rec.regret)
            std::cout << " regret=" << format_double(*rec.regret)
                      << " regret_bound=" << format_double(*rec.regret_bound);
        const auto failure = record_failure(rec);
        std::cout << " status=" << (failure ? "FAIL" : "pass") << "\n";
        if (failure) failures.push_back(*failure);
    }
    if (!failures.empty()) throw AssertionFailure(failures.front());
    std::cout << "all enabled assertions passed\n";
    return 0;
}

struct MatrixCell {
    std::string fixture;
    std::map<std::string, long long> params;
    std::string learner;
    std::string setting;
    std::string stream;
    long long rounds;
};

int cmd_matrix(const ExperimentConfig& cfg) {
    // The grid, one row family per feedback setting: the two known-graph
    // reductions against their adversaries, the unknown-graph learner, the
    // pair-feedback family where no ceiling exists, the agnostic learner on a
    // noise stream, and the arcless equality check.
    const std::vector<MatrixCell> cells = {
        {"binrep", {{"d", 2}, {"k", 4}}, "red2fi", "fi", "adversary", 10},
        {"star", {{"d", 2}, {"k", 4}}, "red2pmf", "pmf-v", "adversary", 80},
        {"ug-online-lb", {{"n", 4}}, "ug-online", "ug", "adversary", 12},
        {"chain", {{"n", 5}}, "pair-halving", "ug-pair", "adversary", 12},
        {"star", {{"d", 1}, {"k", 3}}, "mw-agnostic-fi", "fi", "noise", 40},
        {"arcless", {{"n", 6}, {"target", 2}}, "soa", "fi", "iid", 30},
    };

    std::vector<std::future<std::vector<OnlineRunRecord>>> futures;
    for (const MatrixCell& cell : cells) {
        ExperimentConfig cell_cfg = cfg;
        cell_cfg.fixture = cell.fixture;
        cell_cfg.params = cell.params;
        cell_cfg.learner = cell.learner;
        cell_cfg.setting = cell.setting;
        cell_cfg.stream = cell.stream;
        cell_cfg.rounds = cfg.rounds > 0 ? cfg.rounds : cell.rounds;
        futures.push_back(std::async(std::launch::async, [cell_cfg]() {
            std::vector<OnlineRunRecord> records;
            for (std::uint64_t seed : cell_cfg.seeds)
                records.push_back(execute_online_run(cell_cfg, seed));
            return records;
        }));
    }

    std::ostringstream csv;
    csv << "fixture,learner,setting,stream,rounds,seed,mistakes,hindsight_loss,regret,"
           "ceiling,floor,within_ceiling,meets_floor\n";
    std::vector<std::string> failures;
    for (auto& future : futures) {
        for (const OnlineRunRecord& rec : future.get()) {
            csv << rec.fixture_slug << ',' << rec.learner << ',' << rec.setting << ','
                << rec.stream << ',' << rec.rounds << ',' << rec.seed << ',' << rec.mistakes
                << ',' << rec.hindsight_loss << ',';
            if (rec.regret) csv << format_double(*rec.regret);
            csv << ',';
            if (rec.regret_bound)
                csv << format_double(*rec.regret_bound);
            else if (rec.ceiling)
                csv << *rec.ceiling;
            csv << ',';
            if (rec.floor) csv << *rec.floor;
            csv << ',';
            if (rec.ceiling_checked || rec.regret_checked)
                csv << ((rec.ceiling_checked ? rec.ceiling_ok : true) &&
                                (rec.regret_checked ? rec.regret_ok : true)
                            ? "yes"
                            : "no");
            csv << ',';
            if (rec.floor_checked) csv << (rec.floor_ok ? "yes" : "no");
            csv << '\n';
            if (auto failure = record_failure(rec)) failures.push_back(*failure);
        }
    }

    fs::create_directories(cfg.out_dir);
    std::ofstream out(fs::path(cfg.out_dir) / "matrix.csv");
    if (!out) throw ValidationError("cannot write matrix.csv in " + cfg.out_dir);
    out << csv.str();
    std::cout << csv.str();
    if (!failures.empty()) throw AssertionFailure(failures.front());
    std::cout << "all enabled assertions passed\n";
    return 0;
}

int cmd_construct(const std::string& name, const std::map<std::string, long long>& params,
                  const std::string& out_dir) {
    ExperimentConfig probe;
    probe.fixture = name;
    probe.params = params;
    if (name == "arcless" || name.empty())
        throw ValidationError("construct expects one of: binrep, star, ug-pac-lb, ug-online-lb, chain");
    Fixture fx = build_fixture(probe);

    fs::create_directories(out_dir);
    ordered_json manifest;
    manifest["name"] = name;
    manifest["label"] = fx.name;
    ordered_json jparams = ordered_json::object();
    for (const auto& [key, value] : params) jparams[key] = value;
    manifest["params"] = jparams;
    manifest["universe"] = fx.cls.universe();
    manifest["hypotheses"] = fx.cls.size();

    const std::string class_file = name + "_class.txt";
    write_class_file((fs::path(out_dir) / class_file).string(), fx.cls);
    manifest["class_file"] = class_file;
    if (fx.graph) {
        const std::string graph_file = name + "_graph.txt";
        write_graph_file((fs::path(out_dir) / graph_file).string(), *fx.graph);
        manifest["graph_file"] = graph_file;
        manifest["max_out_degree"] = fx.graph->max_out_degree();
    } else {
        manifest["graph_file"] = nullptr;
    }
    if (fx.graphs) {
        const std::string graphs_file = name + "_graphs.txt";
        write_graph_class_file((fs::path(out_dir) / graphs_file).string(), *fx.graphs);
        manifest["graphs_file"] = graphs_file;
        manifest["graph_count"] = fx.graphs->size();
        manifest["declared_k"] = fx.graphs->declared_k();
    } else {
        manifest["graphs_file"] = nullptr;
    }
    manifest["target_hypothesis"] =
        fx.target_hypothesis ? ordered_json(*fx.target_hypothesis) : ordered_json(nullptr);
    manifest["target_graph"] =
        fx.target_graph ? ordered_json(*fx.target_graph) : ordered_json(nullptr);

    std::ofstream mf(fs::path(out_dir) / (name + "_manifest.json"));
    if (!mf) throw ValidationError("cannot write manifest in " + out_dir);
    mf << manifest.dump(2) << "\n";
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

int cmd_dims(const std::string& class_file, const std::string& graph_file) {
    HypothesisClass cls = read_class_file(class_file);
    ordered_json report;
    if (!graph_file.empty()) {
        ManipulationGraph graph = read_graph_file(graph_file);
        if (cls.universe() != graph.size())
            throw ValidationError("class universe does not match the graph size");
        const VcdUpperReport upper = verify_vcd_upper(graph, cls);
        const HypothesisClass induced = induce_class(graph, cls);
        report["d"] = upper.d;
        report["dbar"] = upper.dbar;
        report["ldim"] = littlestone_dimension(cls);
        report["ldim_induced"] = littlestone_dimension(induced);
        report["universe"] = cls.universe();
        report["hypotheses"] = cls.size();
        report["induced_hypotheses"] = induced.size();
        report["k"] = upper.k;
        report["vc_bound"] = upper.bound;
        report["vc_bound_holds"] = upper.holds;
        report["vc_bound_within_one"] = upper.within_one;
    } else {
        report["d"] = vc_dimension(cls);
        report["ldim"] = littlestone_dimension(cls);
        report["universe"] = cls.universe();
        report["hypotheses"] = cls.size();
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_learn_graph(const std::string& graphs_file, const std::string& clicks_file,
                    const std::string& mode_name, int k_bound, const std::string& out_file) {
    GraphClass graphs = read_graph_class_file(graphs_file);
    std::ifstream in(clicks_file);
    if (!in) throw ValidationError("cannot open clicks file: " + clicks_file);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("clicks file is not valid JSON: ") + e.what());
    }
    std::vector<ClickRecord> clicks;
    for (const auto& entry : j.at("clicks")) {
        const std::string shown = entry.at("shown").get<std::string>();
        if (static_cast<int>(shown.size()) != graphs.universe())
            throw ValidationError("shown bit-string length does not match the graph universe");
        std::vector<std::uint8_t> bits;
        for (char c : shown) {
            if (c != '0' && c != '1') throw ValidationError("shown must be a 0/1 string");
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        clicks.push_back({entry.at("x").get<VertexId>(), Hypothesis(std::move(bits)),
                          entry.at("v").get<VertexId>()});
    }
    NeighborhoodMode mode;
    if (mode_name == "realizable")
        mode = NeighborhoodMode::Realizable;
    else if (mode_name == "agnostic")
        mode = NeighborhoodMode::Agnostic;
    else
        throw ValidationError("mode must be 'realizable' or 'agnostic'");

    const int chosen = learn_neighborhoods(graphs, clicks, mode, std::max(1, k_bound));
    long long degree = 0;
    for (const auto& click : clicks)
        degree += static_cast<long long>(graphs.at(chosen).neighbors(click.x).size());
    ordered_json report;
    report["chosen_graph"] = chosen;
    report["mode"] = mode_name;
    report["clicks"] = clicks.size();
    report["graphs"] = graphs.size();
    report["clicked_degree_sum"] = degree;
    if (!out_file.empty()) {
        std::ofstream out(out_file);
        if (!out) throw ValidationError("cannot write " + out_file);
        out << report.dump(2) << "\n";
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

// Flag overrides shared by run and matrix.
struct RunFlags {
    std::string config_file;
    std::string fixture;
    std::string learner;
    std::string setting;
    std::string stream;
    std::string out;
    std::string mode;
    long long rounds = -1;
    std::vector<std::uint64_t> seeds;
    std::map<std::string, long long> params;
};

ExperimentConfig resolve_config(const RunFlags& flags, bool learner_required) {
    ExperimentConfig cfg;
    if (!flags.config_file.empty()) {
        cfg = load_config_file(flags.config_file);
    } else {
        cfg.setting = "fi";
    }
    if (!flags.fixture.empty()) cfg.fixture = flags.fixture;
    if (!flags.learner.empty()) cfg.learner = flags.learner;
    if (!flags.setting.empty()) cfg.setting = flags.setting;
    if (!flags.stream.empty()) cfg.stream = flags.stream;
    if (!flags.out.empty()) cfg.out_dir = flags.out;
    if (!flags.mode.empty()) cfg.mode = flags.mode;
    if (flags.rounds >= 0) cfg.rounds = flags.rounds;
    if (!flags.seeds.empty()) cfg.seeds = flags.seeds;
    for (const auto& [key, value] : flags.params) cfg.params[key] = value;
    if (cfg.out_dir.empty()) cfg.out_dir = "out";
    if (cfg.rounds == 0 && cfg.mode == "online") cfg.rounds = 40;
    if (cfg.rounds == 0 && cfg.mode == "pac") cfg.rounds = 200;
    if (learner_required && cfg.learner.empty())
        throw ValidationError("a learner is required (config 'learner' or --learner)");
    // Round-tripping through the parser reuses its validation wholesale.
    return parse_config(serialize_config(cfg));
}

void add_param_flags(CLI::App* sub, std::map<std::string, long long>& params) {
    static const std::vector<std::string> keys = {"d",          "k",       "n",
                                                  "istar",      "target",  "target_graph",
                                                  "eps_num",    "eps_den", "loss_cap_permille",
                                                  "t1",         "t2"};
    for (const std::string& key : keys) {
        auto* opt = sub->add_option_function<long long>(
            "--" + key, [&params, key](long long value) { params[key] = value; });
        opt->description("fixture/learner parameter " + key);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strategic-classification laboratory"};
    app.require_subcommand(1);

    // construct
    auto* construct = app.add_subcommand("construct", "generate a named fixture's files");
    std::string c_name, c_out = "out";
    std::map<std::string, long long> c_params;
    construct->add_option("name", c_name, "binrep|star|ug-pac-lb|ug-online-lb|chain")->required();
    construct->add_option("--out", c_out, "output directory");
    add_param_flags(construct, c_params);

    // dims
    auto* dims = app.add_subcommand("dims", "dimension report for class (and graph) files");
    std::string d_class, d_graph;
    dims->add_option("--class", d_class, "hypothesis-class file")->required();
    dims->add_option("--graph", d_graph, "manipulation-graph file");

    // run
    auto* run = app.add_subcommand("run", "one experiment per seed, with transcripts");
    RunFlags run_flags;
    run->add_option("--config", run_flags.config_file, "config JSON file");
    run->add_option("--fixture", run_flags.fixture, "fixture name");
    run->add_option("--learner", run_flags.learner, "learner name");
    run->add_option("--setting", run_flags.setting, "fi|pmf-x|pmf-v|ug|ug-pair");
    run->add_option("--stream", run_flags.stream, "auto|adversary|iid|noise");
    run->add_option("--mode", run_flags.mode, "online|pac");
    run->add_option("--rounds", run_flags.rounds, "rounds (online) or sample size (pac)");
    run->add_option("--seed", run_flags.seeds, "seed (repeatable; replaces config seeds)");
    run->add_option("--out", run_flags.out, "output directory");
    add_param_flags(run, run_flags.params);

    // matrix
    auto* matrix = app.add_subcommand("matrix", "learner-by-setting sweep with bound columns");
    RunFlags matrix_flags;
    matrix->add_option("--config", matrix_flags.config_file, "config JSON file");
    matrix->add_option("--rounds", matrix_flags.rounds, "override every cell's round count");
    matrix->add_option("--seed", matrix_flags.seeds, "seed (repeatable)");
    matrix->add_option("--out", matrix_flags.out, "output directory");

    // learn-graph
    auto* learn = app.add_subcommand("learn-graph", "pick a graph from a click log");
    std::string l_graphs, l_clicks, l_mode = "realizable", l_out;
    int l_k = 1;
    learn->add_option("--graphs", l_graphs, "graph-class file")->required();
    learn->add_option("--clicks", l_clicks, "click-log JSON file")->required();
    learn->add_option("--mode", l_mode, "realizable|agnostic");
    learn->add_option("--k", l_k, "degree bound used by the proxy loss");
    learn->add_option("--out", l_out, "also write the report to this file");

    try {
        app.parse(argc, argv);
        if (construct->parsed()) return cmd_construct(c_name, c_params, c_out);
        if (dims->parsed()) return cmd_dims(d_class, d_graph);
        if (run->parsed()) return cmd_run(resolve_config(run_flags, true));
        if (matrix->parsed()) {
            ExperimentConfig cfg;
            if (!matrix_flags.config_file.empty()) cfg = load_config_file(matrix_flags.config_file);
            if (matrix_flags.rounds >= 0) cfg.rounds = matrix_flags.rounds;
            if (!matrix_flags.seeds.empty()) cfg.seeds = matrix_flags.seeds;
            if (!matrix_flags.out.empty()) cfg.out_dir = matrix_flags.out;
            if (cfg.out_dir.empty()) cfg.out_dir = "out";
            if (cfg.seeds.empty())
                throw ValidationError("matrix needs seeds (config 'seeds' or --seed)");
            return cmd_matrix(cfg);
        }
        if (learn->parsed()) return cmd_learn_graph(l_graphs, l_clicks, l_mode, l_k, l_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const AssertionFailure& e) {
        std::cerr << "assertion failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
