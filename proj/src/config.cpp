#include "sclab/config.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sclab/errors.hpp"
#include "sclab/protocol.hpp"

namespace sclab {

namespace {

using nlohmann::ordered_json;

template <typename T>
T field_or(const ordered_json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config field '") + key + "': " + e.what());
    }
}

const std::vector<std::string> kFixtureNames = {"binrep", "star", "ug-pac-lb", "ug-online-lb",
                                                "chain", "arcless"};

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");

    ExperimentConfig c;
    c.fixture = field_or<std::string>(j, "fixture", "");
    if (j.contains("params")) {
        if (!j.at("params").is_object()) throw ValidationError("config field 'params' must be an object");
        for (const auto& [key, value] : j.at("params").items()) {
            if (!value.is_number_integer())
                throw ValidationError("config parameter '" + key + "' must be an integer");
            c.params[key] = value.get<long long>();
        }
    }
    c.graph_file = field_or<std::string>(j, "graph_file", "");
    c.class_file = field_or<std::string>(j, "class_file", "");
    c.learner = field_or<std::string>(j, "learner", "");
    c.setting = field_or<std::string>(j, "setting", "fi");
    c.mode = field_or<std::string>(j, "mode", "online");
    c.stream = field_or<std::string>(j, "stream", "auto");
    c.rounds = field_or<long long>(j, "rounds", 0);
    c.t1 = field_or<long long>(j, "t1", 0);
    c.t2 = field_or<long long>(j, "t2", 0);
    c.seeds = field_or<std::vector<std::uint64_t>>(j, "seeds", {});
    c.out_dir = field_or<std::string>(j, "out_dir", "");
    c.assert_ceilings = field_or<bool>(j, "assert_ceilings", true);
    c.assert_floors = field_or<bool>(j, "assert_floors", true);
    c.assert_invariants = field_or<bool>(j, "assert_invariants", true);

    if (!c.fixture.empty() &&
        std::find(kFixtureNames.begin(), kFixtureNames.end(), c.fixture) == kFixtureNames.end())
        throw ValidationError("unknown fixture name: " + c.fixture);
    if (c.fixture.empty() && (c.graph_file.empty() || c.class_file.empty()))
        throw ValidationError("config needs either a fixture name or both graph_file and class_file");
    if (c.mode != "online" && c.mode != "pac")
        throw ValidationError("config mode must be 'online' or 'pac'");
    if (c.stream != "auto" && c.stream != "adversary" && c.stream != "iid" && c.stream != "noise")
        throw ValidationError("config stream must be 'auto', 'adversary', 'iid', or 'noise'");
    parse_setting(c.setting);  // throws on an unknown spelling
    if (c.rounds < 0 || c.t1 < 0 || c.t2 < 0)
        throw ValidationError("config run sizes must be non-negative");
    if (c.seeds.empty()) throw ValidationError("config must list at least one seed");
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    ordered_json j;
    j["fixture"] = c.fixture;
    ordered_json params = ordered_json::object();
    for (const auto& [key, value] : c.params) params[key] = value;
    j["params"] = params;
    j["graph_file"] = c.graph_file;
    j["class_file"] = c.class_file;
    j["learner"] = c.learner;
    j["setting"] = c.setting;
    j["mode"] = c.mode;
    j["stream"] = c.stream;
    j["rounds"] = c.rounds;
    j["t1"] = c.t1;
    j["t2"] = c.t2;
    j["seeds"] = c.seeds;
    j["out_dir"] = c.out_dir;
    j["assert_ceilings"] = c.assert_ceilings;
    j["assert_floors"] = c.assert_floors;
    j["assert_invariants"] = c.assert_invariants;
    return j.dump(2) + "\n";
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace sclab
