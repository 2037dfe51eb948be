#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pathdep/config.hpp"

namespace pathdep {

inline const std::vector<std::string> kSuiteNames{"canonical", "mp",        "generator",
                                                  "maf",       "tightness", "continuity"};

struct SuiteResult {
    std::string name;
    bool pass = false;
    nlohmann::json report;
    // plot-data series emitted alongside the JSON report
    std::vector<std::pair<std::string, std::string>> csv_files; // (filename, content)
};

// Runs one verification suite from a config (ensembles are simulated on
// demand). Throws ConfigError for unknown suite names.
SuiteResult run_suite(const ExperimentConfig& cfg, const std::string& suite,
                      int workers);

// event banks used by the mp / canonical suites, for audit dumps
nlohmann::json dump_event_banks(const ExperimentConfig& cfg);

// CLI entry points; return process exit codes (0 pass, 1 statistical
// failure; config/usage errors throw ConfigError and map to 2).
int cmd_simulate(const ExperimentConfig& cfg, int workers);
int cmd_verify(const ExperimentConfig& cfg, const std::string& suite, int workers,
               bool dump_events);
int cmd_report(const std::string& run_dir, const std::string& out_dir);

} // namespace pathdep
