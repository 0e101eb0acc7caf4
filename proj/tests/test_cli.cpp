// Drives the command-line binary end to end: exit codes, stdout transcripts,
// and the files each subcommand leaves behind.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "sclab/config.hpp"
#include "sclab/errors.hpp"
#include "sclab/graph.hpp"
#include "sclab/io.hpp"

using namespace sclab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Fresh scratch directory per test case, wiped up front so reruns start clean.
fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("sclab_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = fs::temp_directory_path() / ("sclab_cli_stdout_" + std::to_string(counter) + ".txt");
    const fs::path err = fs::temp_directory_path() / ("sclab_cli_stderr_" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string("\"") + SCLAB_CLI_PATH + "\" " + args + " > \"" +
                            out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliResult result;
    if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
    result.out = slurp(out);
    result.err = slurp(err);
    fs::remove(out);
    fs::remove(err);
    return result;
}

json parse_file(const fs::path& path) {
    REQUIRE(fs::exists(path));
    return json::parse(slurp(path));
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("construct writes a manifest plus loadable fixture files") {
    const fs::path dir = fresh_dir("construct_binrep");
    const CliResult r = run_cli("construct binrep --d 1 --k 8 --out \"" + dir.string() + "\"");
    CHECK(r.code == 0);

    const json manifest = parse_file(dir / "binrep_manifest.json");
    CHECK(manifest.at("name") == "binrep");
    CHECK(manifest.at("params").at("d") == 1);
    CHECK(manifest.at("params").at("k") == 8);
    CHECK(manifest.at("universe") == 27);
    CHECK(manifest.at("hypotheses") == 8);
    CHECK(manifest.at("class_file") == "binrep_class.txt");
    CHECK(manifest.at("graph_file") == "binrep_graph.txt");
    CHECK(manifest.at("max_out_degree") == 8);
    CHECK(manifest.at("graphs_file").is_null());

    // stdout repeats the manifest verbatim.
    CHECK(json::parse(r.out) == manifest);

    // The written files load back through the library with the right shape.
    const ManipulationGraph graph = read_graph_file((dir / "binrep_graph.txt").string());
    const HypothesisClass cls = read_class_file((dir / "binrep_class.txt").string());
    CHECK(graph.size() == 27);
    CHECK(graph.max_out_degree() == 8);
    CHECK(cls.universe() == 27);
    CHECK(cls.size() == 8);
}

TEST_CASE("construct records graph families and their planted targets") {
    const fs::path dir = fresh_dir("construct_family");

    const CliResult star = run_cli("construct star --d 1 --k 3 --out \"" + dir.string() + "\"");
    CHECK(star.code == 0);
    const json sm = parse_file(dir / "star_manifest.json");
    CHECK(sm.at("universe") == 4);
    CHECK(sm.at("hypotheses") == 3);
    CHECK(sm.at("graph_file") == "star_graph.txt");

    const CliResult ug = run_cli("construct ug-pac-lb --n 3 --istar 2 --out \"" + dir.string() + "\"");
    CHECK(ug.code == 0);
    const json um = parse_file(dir / "ug-pac-lb_manifest.json");
    CHECK(um.at("universe") == 13);
    CHECK(um.at("hypotheses") == 3);
    CHECK(um.at("graph_file").is_null());
    CHECK(um.at("graphs_file") == "ug-pac-lb_graphs.txt");
    CHECK(um.at("graph_count") == 64);
    CHECK(um.at("declared_k") == 1);
    CHECK(um.at("target_hypothesis") == 1);
    CHECK(um.at("target_graph") == 42);

    const GraphClass graphs = read_graph_class_file((dir / "ug-pac-lb_graphs.txt").string());
    CHECK(graphs.size() == 64);
    CHECK(graphs.universe() == 13);
    CHECK(graphs.declared_k() == 1);
}

TEST_CASE("construct rejects bad names and parameters with nonzero exits") {
    const fs::path dir = fresh_dir("construct_bad");
    const std::string out = " --out \"" + dir.string() + "\"";

    const CliResult odd_k = run_cli("construct binrep --d 1 --k 3" + out);
    CHECK(odd_k.code == 2);
    CHECK(contains(odd_k.err, "error:"));

    const CliResult too_big = run_cli("construct binrep --d 1 --k 1024" + out);
    CHECK(too_big.code == 2);
    CHECK(contains(too_big.err, "error:"));

    const CliResult arcless = run_cli("construct arcless" + out);
    CHECK(arcless.code == 2);

    const CliResult no_name = run_cli("construct");
    CHECK(no_name.code != 0);
}

TEST_CASE("dims reports the dimension identities of constructed fixtures") {
    const fs::path dir = fresh_dir("dims");
    REQUIRE(run_cli("construct binrep --d 1 --k 8 --out \"" + dir.string() + "\"").code == 0);
    REQUIRE(run_cli("construct star --d 1 --k 3 --out \"" + dir.string() + "\"").code == 0);

    const CliResult with_graph = run_cli("dims --class \"" + (dir / "binrep_class.txt").string() +
                                         "\" --graph \"" + (dir / "binrep_graph.txt").string() + "\"");
    CHECK(with_graph.code == 0);
    const json report = json::parse(with_graph.out);
    CHECK(report.at("d") == 1);
    CHECK(report.at("dbar") == 3);
    CHECK(report.at("ldim") == 1);
    CHECK(report.at("ldim_induced") == 3);
    CHECK(report.at("universe") == 27);
    CHECK(report.at("hypotheses") == 8);
    CHECK(report.at("induced_hypotheses") == 8);
    CHECK(report.at("k") == 8);
    CHECK(report.at("vc_bound") == 3);
    CHECK(report.at("vc_bound_holds") == true);
    CHECK(report.at("vc_bound_within_one") == true);

    const CliResult class_only = run_cli("dims --class \"" + (dir / "star_class.txt").string() + "\"");
    CHECK(class_only.code == 0);
    const json base = json::parse(class_only.out);
    CHECK(base.at("d") == 1);
    CHECK(base.at("ldim") == 1);
    CHECK(base.at("universe") == 4);
    CHECK(base.at("hypotheses") == 3);

    // Class and graph over different universes cannot be combined.
    const CliResult mismatch = run_cli("dims --class \"" + (dir / "star_class.txt").string() +
                                       "\" --graph \"" + (dir / "binrep_graph.txt").string() + "\"");
    CHECK(mismatch.code == 2);

    const CliResult missing = run_cli("dims");
    CHECK(missing.code != 0);
}

TEST_CASE("online runs write sidecars and byte-identical repeat transcripts") {
    const fs::path dir1 = fresh_dir("online_a");
    const fs::path dir2 = fresh_dir("online_b");
    const std::string base =
        "run --fixture star --d 1 --k 8 --learner red2pmf --setting pmf-v "
        "--stream adversary --rounds 80 --seed 7 --out \"";

    const CliResult first = run_cli(base + dir1.string() + "\"");
    const CliResult second = run_cli(base + dir2.string() + "\"");
    CHECK(first.code == 0);
    CHECK(second.code == 0);
    CHECK(contains(first.out, "status=pass"));
    CHECK(contains(first.out, "all enabled assertions passed"));
    CHECK(first.out == second.out);

    const std::string stem = "run_star-d1-k8_red2pmf_pmf-v_seed7";
    const json meta = parse_file(dir1 / (stem + ".json"));
    CHECK(meta.at("fixture") == "star(d=1,k=8)");
    CHECK(meta.at("learner") == "red2pmf");
    CHECK(meta.at("setting") == "pmf-v");
    CHECK(meta.at("stream") == "adversary");
    CHECK(meta.at("mode") == "online");
    CHECK(meta.at("seed") == 7);
    CHECK(meta.at("rounds") == 80);
    CHECK(meta.at("realizable") == true);
    CHECK(meta.at("ceiling") == 92);
    CHECK(meta.at("ceiling_asserted") == true);
    CHECK(meta.at("floor") == 7);
    CHECK(meta.at("floor_asserted") == true);
    const int mistakes = meta.at("mistakes").get<int>();
    CHECK(mistakes >= 7);
    CHECK(mistakes <= 92);

    const std::string csv1 = slurp(dir1 / (stem + ".csv"));
    const std::string csv2 = slurp(dir2 / (stem + ".csv"));
    CHECK(!csv1.empty());
    CHECK(csv1 == csv2);
    CHECK(lines_of(csv1).at(0) == "t,x,v,yhat,y,mistake,experts,total_weight");
    CHECK(lines_of(csv1).size() == 81);  // header plus one row per round
    CHECK(slurp(dir1 / (stem + ".json")) == slurp(dir2 / (stem + ".json")));
}

TEST_CASE("run honours a config file, sweeping its seed list") {
    const fs::path dir = fresh_dir("config_run");
    const fs::path cfg_path = dir / "experiment.json";
    {
        json cfg;
        cfg["fixture"] = "binrep";
        cfg["params"] = {{"d", 1}, {"k", 4}};
        cfg["learner"] = "red2fi";
        cfg["setting"] = "fi";
        cfg["stream"] = "adversary";
        cfg["mode"] = "online";
        cfg["rounds"] = 10;
        cfg["seeds"] = {3, 4};
        cfg["out_dir"] = dir.string();
        std::ofstream(cfg_path) << cfg.dump(2);
    }

    const CliResult r = run_cli("run --config \"" + cfg_path.string() + "\"");
    CHECK(r.code == 0);
    for (int seed : {3, 4}) {
        const json meta = parse_file(dir / ("run_binrep-d1-k4_red2fi_fi_seed" + std::to_string(seed) + ".json"));
        CHECK(meta.at("floor") == 2);  // the scripted stream forces d*log2(k) mistakes
        CHECK(meta.at("floor_asserted") == true);
        CHECK(meta.at("ceiling_asserted") == true);
        const int mistakes = meta.at("mistakes").get<int>();
        CHECK(mistakes >= 2);
        CHECK(mistakes <= meta.at("ceiling").get<int>());
        CHECK(!meta.at("ceiling_rule").get<std::string>().empty());
    }

    // Flag overrides beat the file: one explicit seed replaces the list.
    const fs::path dir2 = fresh_dir("config_run_override");
    const CliResult overridden =
        run_cli("run --config \"" + cfg_path.string() + "\" --seed 9 --out \"" + dir2.string() + "\"");
    CHECK(overridden.code == 0);
    CHECK(fs::exists(dir2 / "run_binrep-d1-k4_red2fi_fi_seed9.json"));
    CHECK(!fs::exists(dir2 / "run_binrep-d1-k4_red2fi_fi_seed3.json"));
}

TEST_CASE("malformed run requests exit with command errors") {
    const fs::path dir = fresh_dir("run_bad");
    const std::string out = " --out \"" + dir.string() + "\"";

    // A learner bound to proposal-then-move feedback cannot run under fi.
    const CliResult wrong_setting = run_cli(
        "run --fixture star --d 1 --k 8 --learner red2pmf --setting fi --rounds 5 --seed 1" + out);
    CHECK(wrong_setting.code == 2);
    CHECK(contains(wrong_setting.err, "does not run under setting"));

    const CliResult unknown = run_cli(
        "run --fixture star --d 1 --k 8 --learner nosuch --setting fi --rounds 5 --seed 1" + out);
    CHECK(unknown.code == 2);

    const CliResult no_learner =
        run_cli("run --fixture star --d 1 --k 8 --setting fi --rounds 5 --seed 1" + out);
    CHECK(no_learner.code == 2);
    CHECK(contains(no_learner.err, "learner"));

    // arcless has no scripted adversary, so demanding one is an error.
    const CliResult no_adversary = run_cli(
        "run --fixture arcless --n 4 --learner soa --setting fi --stream adversary --rounds 5 --seed 1" + out);
    CHECK(no_adversary.code == 2);
    CHECK(contains(no_adversary.err, "no scripted adversary"));
}

TEST_CASE("pac runs report the chosen pair and exact population loss") {
    const fs::path dir = fresh_dir("pac_rel");
    const CliResult r = run_cli(
        "run --mode pac --fixture ug-pac-lb --n 3 --istar 2 --learner ug-rel "
        "--rounds 500 --seed 7 --out \"" + dir.string() + "\"");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "chosen_h=1"));
    CHECK(contains(r.out, "chosen_g=42"));
    CHECK(contains(r.out, "loss=0"));

    const std::string stem = "pac_ug-pac-lb-istar2-n3_ug-rel_seed7";
    const json meta = parse_file(dir / (stem + ".json"));
    CHECK(meta.at("mode") == "pac");
    CHECK(meta.at("samples") == 500);
    CHECK(meta.at("chosen_graph") == 42);
    CHECK(meta.at("chosen_hypothesis") == 1);
    CHECK(meta.at("population_loss") == "0");
    CHECK(meta.at("population_loss_double") == 0.0);

    const std::string csv = slurp(dir / (stem + ".csv"));
    CHECK(lines_of(csv).at(0) == "t,x,v,yhat,y,mistake,experts,total_weight");
    CHECK(lines_of(csv).size() == 501);
}

TEST_CASE("a population-loss cap turns a lossy run into a failing exit") {
    const fs::path dir = fresh_dir("pac_cap");
    const std::string base =
        "run --mode pac --fixture ug-pac-lb --n 3 --istar 2 --learner ug-agn "
        "--rounds 40 --seed 2 --out \"" + dir.string() + "\"";

    // Forty two-phase samples land on a wrong-block pair for this seed.
    const CliResult uncapped = run_cli(base);
    CHECK(uncapped.code == 0);
    CHECK(contains(uncapped.out, "loss=1/5"));

    const CliResult capped = run_cli(base + " --loss_cap_permille 0");
    CHECK(capped.code == 1);
    CHECK(contains(capped.out, "loss=1/5"));
    CHECK(contains(capped.err, "assertion failed: population loss 1/5 exceeds cap 0/1000"));

    const json meta =
        parse_file(dir / "pac_ug-pac-lb-istar2-loss_cap_permille0-n3_ug-agn_seed2.json");
    CHECK(meta.at("population_loss") == "1/5");
    CHECK(meta.at("chosen_graph") == 10);
    CHECK(meta.at("chosen_hypothesis") == 0);
}

TEST_CASE("learn-graph picks the degree-minimal consistent graph from a click log") {
    const fs::path dir = fresh_dir("learn_graph");
    const fs::path graphs_path = dir / "family.txt";
    {
        std::vector<ManipulationGraph> family;
        family.push_back(ManipulationGraph(3, {{}, {}, {}}, 2));
        family.push_back(ManipulationGraph(3, {{1}, {}, {}}, 2));
        family.push_back(ManipulationGraph(3, {{1, 2}, {}, {}}, 2));
        write_graph_class_file(graphs_path.string(), GraphClass(std::move(family)));
    }
    const auto write_clicks = [&](const std::string& name, const json& clicks) {
        const fs::path path = dir / name;
        json log;
        log["clicks"] = clicks;
        std::ofstream(path) << log.dump(2);
        return path;
    };

    // One observed move 0 -> 1: both arc-bearing graphs explain it, the
    // sparser one wins.
    const fs::path one = write_clicks("one.json", json::array({
        {{"x", 0}, {"shown", "010"}, {"v", 1}},
    }));
    const CliResult r1 = run_cli("learn-graph --graphs \"" + graphs_path.string() +
                                 "\" --clicks \"" + one.string() + "\"");
    CHECK(r1.code == 0);
    const json rep1 = json::parse(r1.out);
    CHECK(rep1.at("chosen_graph") == 1);
    CHECK(rep1.at("mode") == "realizable");
    CHECK(rep1.at("clicks") == 1);
    CHECK(rep1.at("graphs") == 3);
    CHECK(rep1.at("clicked_degree_sum") == 1);

    // Adding a move 0 -> 2 rules the sparse graph out.
    const fs::path two = write_clicks("two.json", json::array({
        {{"x", 0}, {"shown", "010"}, {"v", 1}},
        {{"x", 0}, {"shown", "001"}, {"v", 2}},
    }));
    const fs::path report_path = dir / "report.json";
    const CliResult r2 = run_cli("learn-graph --graphs \"" + graphs_path.string() +
                                 "\" --clicks \"" + two.string() + "\" --out \"" +
                                 report_path.string() + "\"");
    CHECK(r2.code == 0);
    const json rep2 = json::parse(r2.out);
    CHECK(rep2.at("chosen_graph") == 2);
    CHECK(rep2.at("clicked_degree_sum") == 4);
    CHECK(parse_file(report_path) == rep2);

    const CliResult agnostic = run_cli("learn-graph --graphs \"" + graphs_path.string() +
                                       "\" --clicks \"" + two.string() + "\" --mode agnostic --k 2");
    CHECK(agnostic.code == 0);
    CHECK(json::parse(agnostic.out).at("mode") == "agnostic");

    // A move no graph explains fails in realizable mode.
    const fs::path orphan = write_clicks("orphan.json", json::array({
        {{"x", 1}, {"shown", "001"}, {"v", 2}},
    }));
    const CliResult r3 = run_cli("learn-graph --graphs \"" + graphs_path.string() +
                                 "\" --clicks \"" + orphan.string() + "\"");
    CHECK(r3.code == 2);

    // Shown bit-strings must match the universe.
    const fs::path short_bits = write_clicks("short.json", json::array({
        {{"x", 0}, {"shown", "01"}, {"v", 1}},
    }));
    const CliResult r4 = run_cli("learn-graph --graphs \"" + graphs_path.string() +
                                 "\" --clicks \"" + short_bits.string() + "\"");
    CHECK(r4.code == 2);
}

TEST_CASE("matrix sweeps every learner-setting family and asserts its bounds") {
    const fs::path dir1 = fresh_dir("matrix_a");
    const CliResult r = run_cli("matrix --seed 5 --out \"" + dir1.string() + "\"");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "all enabled assertions passed"));

    const std::string csv = slurp(dir1 / "matrix.csv");
    const std::vector<std::string> rows = lines_of(csv);
    REQUIRE(rows.size() == 7);
    CHECK(rows.at(0) ==
          "fixture,learner,setting,stream,rounds,seed,mistakes,hindsight_loss,regret,"
          "ceiling,floor,within_ceiling,meets_floor");
    const std::vector<std::pair<std::string, std::string>> expected = {
        {"binrep-d2-k4", "red2fi"},   {"star-d2-k4", "red2pmf"},
        {"ug-online-lb-n4", "ug-online"}, {"chain-n5", "pair-halving"},
        {"star-d1-k3", "mw-agnostic-fi"}, {"arcless-n6-target2", "soa"},
    };
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const std::string& row = rows.at(i + 1);
        CHECK(contains(row, expected[i].first + "," + expected[i].second));
        // The trailing within_ceiling and meets_floor columns are "yes" or
        // blank, never "no".
        std::vector<std::string> fields;
        std::istringstream in(row);
        for (std::string field; std::getline(in, field, ',');) fields.push_back(field);
        REQUIRE(fields.size() >= 12);
        CHECK(fields.at(11) != "no");
        CHECK((fields.size() < 13 || fields.at(12) != "no"));
    }

    // Two seeds means two rows per cell; reruns are byte-identical.
    const fs::path dir2 = fresh_dir("matrix_b");
    const CliResult wide = run_cli("matrix --seed 5 --seed 6 --out \"" + dir2.string() + "\"");
    CHECK(wide.code == 0);
    CHECK(lines_of(slurp(dir2 / "matrix.csv")).size() == 13);

    const fs::path dir3 = fresh_dir("matrix_c");
    const CliResult again = run_cli("matrix --seed 5 --out \"" + dir3.string() + "\"");
    CHECK(again.code == 0);
    CHECK(slurp(dir3 / "matrix.csv") == csv);
    CHECK(again.out == r.out);

    const CliResult seedless = run_cli("matrix --out \"" + dir1.string() + "\"");
    CHECK(seedless.code == 2);
    CHECK(contains(seedless.err, "seeds"));
}

TEST_CASE("experiment configs survive a serialize-parse round trip") {
    ExperimentConfig cfg;
    cfg.fixture = "binrep";
    cfg.params = {{"d", 2}, {"k", 4}};
    cfg.learner = "red2fi";
    cfg.setting = "fi";
    cfg.mode = "online";
    cfg.stream = "adversary";
    cfg.rounds = 18;
    cfg.seeds = {1, 2, 3};
    cfg.out_dir = "somewhere";
    cfg.assert_floors = false;
    CHECK(parse_config(serialize_config(cfg)) == cfg);

    ExperimentConfig files;
    files.graph_file = "g.txt";
    files.class_file = "h.txt";
    files.learner = "soa";
    files.seeds = {11};
    CHECK(parse_config(serialize_config(files)) == files);

    CHECK_THROWS_AS(parse_config("not json"), ValidationError);
    CHECK_THROWS_AS(parse_config("[1,2]"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"fixture":"nosuch","seeds":[1]})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"fixture":"star"})"), ValidationError);  // no seeds
    CHECK_THROWS_AS(parse_config(R"({"fixture":"star","seeds":[1],"setting":"weird"})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"fixture":"star","seeds":[1],"mode":"batch"})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"fixture":"star","seeds":[1],"rounds":-1})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"seeds":[1]})"), ValidationError);  // neither fixture nor files
    CHECK_THROWS_AS(parse_config(R"({"fixture":"star","seeds":[1],"params":{"d":1.5}})"),
                    ValidationError);
}
