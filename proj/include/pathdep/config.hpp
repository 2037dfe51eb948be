#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathdep/continuity.hpp"
#include "pathdep/engine.hpp"

namespace pathdep {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// config / usage problems map to exit code 2
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TightnessBlock {
    double epsilon = 0.05;
    std::vector<double> alphas{0.5};
    double window = 1.0; // N
    double k_start = 1.0;
    double k_cap = 1048576.0;
    double theta_start = 1.0;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;

    // model
    int state_dim = 1;
    double horizon = 1.0;
    double mesh = 1.0 / 256.0;
    CoefficientConfig coefficients;
    std::vector<std::pair<std::vector<double>, double>> jump_atoms;

    // run
    double start_time = 0.0;
    std::string initial_path_file; // empty: constant initial_value
    std::vector<double> initial_value;
    std::size_t n_paths = 1000;
    std::uint64_t seed = 1;

    // verify
    std::vector<std::string> suites{"mp"};
    double z_crit = 3.0;
    std::vector<std::vector<double>> theta_set{{1.0}, {-1.0}, {2.0}, {-2.0}};
    std::size_t event_bank_size = 8;
    std::vector<double> times{0.25, 0.5, 0.75, 1.0};
    std::size_t qv_levels = 8;
    std::vector<std::size_t> density_windows{16};
    TightnessBlock tightness;
    std::size_t n_outer = 2000;
    std::size_t n_inner = 2000;
    bool sabotage_generator = false;
    std::string scenario_file;
    double tolerance = 0.05;

    // output
    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& filename);

// canonical form of the semantically meaningful fields (model/run/verify),
// with sorted keys; its SHA-256 is the config hash
nlohmann::json canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

std::string sha256_hex(const std::string& bytes);

Model build_model(const ExperimentConfig& cfg);
InitialCondition build_initial(const ExperimentConfig& cfg, const GridPtr& grid);

// scenario file: {"target": {"s":.., "path": file | "value":[..]},
//                 "approximants": [ {...}, ... ]}
ConvergenceScenario load_scenario(const std::string& filename, const GridPtr& grid,
                                  double horizon);

// built-in fallback when no scenario file is given: constant starting paths
// approaching the run's initial value at rate 2^-n
ConvergenceScenario default_scenario(const ExperimentConfig& cfg, const GridPtr& grid,
                                     std::size_t levels);

} // namespace pathdep
