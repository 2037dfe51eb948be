#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pathdep/engine.hpp"
#include "pathdep/generator.hpp"

namespace pathdep {

// Bounded path functional; when measurability_time is set, the value may
// depend on the path only through its stopped version at that time (probed
// on samples, violations are hard errors).
struct PathRandomVariable {
    std::string name;
    double bound = 1.0;
    std::function<double(const PathView&)> z;
    std::optional<double> measurability_time;
};

struct ProjectorEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// P_s[z](eta) by fresh simulation from (s, eta): sample mean with standard
// error. Throws std::domain_error if |z| exceeds its declared bound on a
// sample (the bounded-variable contract is load-bearing).
ProjectorEstimate estimate_projector(const Model& model, const InitialCondition& init,
                                     const PathRandomVariable& z, std::size_t n_paths,
                                     std::uint64_t seed, int workers = 1);

struct NestedReport {
    double direct = 0.0, direct_se = 0.0;
    double nested = 0.0, nested_se = 0.0;
    double discrepancy = 0.0, combined_se = 0.0, z = 0.0;
    bool pass = true;
    std::size_t n_outer = 0, n_inner = 0;
};

// P_s o P_t = P_s, checked by nested Monte Carlo. Outer paths run from
// (s,eta) to t; each is restarted at (t, path stopped at t) for an inner
// estimate of P_t[z]. The direct side reuses the inner seed sequence, so at
// t = s both sides are computed from identical streams and agree exactly.
NestedReport verify_projector_composition(const Model& model,
                                          const InitialCondition& init,
                                          const PathRandomVariable& z, double t,
                                          std::size_t n_outer, std::size_t n_inner,
                                          std::uint64_t seed, double z_crit = 3.0,
                                          int workers = 1);

struct FlowRow {
    std::string event_f, event_g;
    double lhs = 0.0, lhs_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    double discrepancy = 0.0, combined_se = 0.0, z = 0.0;
    bool pass = true;
};

struct FlowReport {
    std::vector<FlowRow> rows;
    bool pass = true;
    std::size_t n_outer = 0, n_inner = 0;
};

// Integrated form of the flow property: E[1_G 1_F] = E[1_G P^{t,w}(F)] over
// conditioning events G measurable before t. The right side restarts a fresh
// inner ensemble from every outer path's stopped trajectory; the comparison
// is paired per outer path.
FlowReport verify_flow_property(const Model& model, const InitialCondition& init,
                                double t, const std::vector<EventSpec>& events_f,
                                const std::vector<EventSpec>& events_g,
                                std::size_t n_outer, std::size_t n_inner,
                                std::uint64_t seed, double z_crit = 3.0,
                                int workers = 1);

struct PinningReport {
    std::size_t n_paths = 0;
    std::size_t mismatched = 0; // paths whose [0,s] segment differs bitwise from eta
    bool pass = true;
};

// every simulated path must agree with eta on [0, s] exactly (bit level)
PinningReport verify_pinning(const Model& model, const InitialCondition& init,
                             std::size_t n_paths, std::uint64_t seed, int workers = 1);

struct TrivialityRow {
    std::string event;
    double frequency = 0.0;
    bool pass = true; // frequency is exactly 0 or 1
};

struct TrivialityReport {
    std::vector<TrivialityRow> rows;
    bool pass = true;
};

// events determined before s have empirical probability exactly 0 or 1
TrivialityReport verify_start_triviality(const Model& model,
                                         const InitialCondition& init,
                                         const std::vector<EventSpec>& events_before_s,
                                         std::size_t n_paths, std::uint64_t seed,
                                         int workers = 1);

} // namespace pathdep
