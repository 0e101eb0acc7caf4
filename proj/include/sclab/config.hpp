// Experiment configuration: JSON in, JSON out, round-trip stable.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sclab {

// Describes one experiment: a fixture (named construction or files on disk),
// a learner, a feedback setting, run sizes, and the seeds to sweep.
struct ExperimentConfig {
    std::string fixture;                      // construction name, or empty when files are given
    std::map<std::string, long long> params;  // construction / learner parameters (d, k, n, ...)
    std::string graph_file;
    std::string class_file;

    std::string learner;
    std::string setting = "fi";
    std::string mode = "online";  // "online" or "pac"
    std::string stream = "auto";  // "adversary", "iid", or "auto" (adversary when one exists)

    long long rounds = 0;  // online horizon, or PAC sample size
    long long t1 = 0;      // two-phase PAC sample sizes; 0 derives them from rounds
    long long t2 = 0;
    std::vector<std::uint64_t> seeds;  // mandatory, never defaulted from the clock

    std::string out_dir;

    bool assert_ceilings = true;
    bool assert_floors = true;
    bool assert_invariants = true;

    bool operator==(const ExperimentConfig&) const = default;
};

// Throws ValidationError on malformed JSON, an unknown fixture/mode/setting,
// an empty seed list, or negative sizes.
ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace sclab
