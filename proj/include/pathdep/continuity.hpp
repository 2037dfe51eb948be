#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathdep/projectors.hpp"
#include "pathdep/skorokhod.hpp"

namespace pathdep {

// Approximating family (s_n, eta_n) -> (s, eta) plus a bank of bounded
// test functionals g used to compare the laws.
struct ConvergenceScenario {
    InitialCondition target;
    std::vector<InitialCondition> approximants;
    std::vector<PathRandomVariable> test_bank;
};

// |s_n - s| + upper-bound Skorokhod distance of the starting paths
double scenario_distance(const ConvergenceScenario& scenario, std::size_t level);

// default bank: cos(X_T), sin(X_T) and a clamped running maximum; bounded
// functionals on path space
std::vector<PathRandomVariable> default_test_bank(double horizon);

struct ConvergenceRow {
    std::size_t level = 0;
    std::string g;
    double start_distance = 0.0;
    double approx = 0.0, approx_se = 0.0;
    double target = 0.0, target_se = 0.0;
    double diff = 0.0;       // paired mean of g(approx path) - g(target path)
    double paired_se = 0.0;  // shared-seed pairing
    double z = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double trend_score = 1.0; // fraction of consecutive levels with |diff| not increasing
    double tolerance = 0.05;
    bool pass = true; // final-level |diff| <= tolerance + 3 paired SE for every g
};

// Estimates E^{s_n,eta_n}[g] against E^{s,eta}[g] for every level and g.
// Each level and its target re-simulation share one derived seed, so equal
// scenarios produce exactly zero differences. Convergence is diagnosed, not
// certified: pass means "consistent with convergence at the tolerance".
ConvergenceReport run_convergence_diagnostic(const Model& model,
                                             const ConvergenceScenario& scenario,
                                             std::size_t n_paths, std::uint64_t seed,
                                             double tolerance = 0.05,
                                             int workers = 1);

// Simulates every approximating law and applies the tightness criterion.
TightnessVerdict run_tightness_diagnostic(const Model& model,
                                          const ConvergenceScenario& scenario,
                                          std::size_t n_paths, double window_end,
                                          const TightnessOptions& options,
                                          std::uint64_t seed);

} // namespace pathdep
