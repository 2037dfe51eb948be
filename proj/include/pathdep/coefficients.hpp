#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pathdep/grid.hpp"

namespace pathdep {

// Finite atomic jump intensity: atoms y_j != 0 with masses > 0.
struct JumpMeasure {
    int dim = 1;
    std::vector<std::vector<double>> atoms;
    std::vector<double> masses;

    static JumpMeasure none(int dim) { return JumpMeasure{dim, {}, {}}; }

    void add_atom(std::vector<double> y, double mass);
    std::size_t size() const { return atoms.size(); }
    double total_mass() const;
};

// Evaluable SDE coefficients. All three maps must be non-anticipative:
// the output at time t may depend on the path only through its values on
// [0, t]. The declared bounds back the boundedness contract and are probed,
// not enforced.
struct CoefficientSet {
    int dim = 1;
    std::function<void(double t, const PathView& path, double* out)> beta;   // out[m]
    std::function<void(double t, const PathView& path, double* out)> sigma;  // out[m*m], row-major
    std::function<void(double t, const PathView& path, const double* y, double* out)> jump; // w(t, path, y)
    double beta_bound = 0.0;
    double sigma_bound = 0.0;
    double jump_bound = 0.0;
    bool declared_bounded = true;
};

// Named coefficient presets:
//   constant      beta0, sigma0, w = jump_scale * y
//   markov        beta_i = beta0_i + kappa tanh(X_t,i)
//   running-max   beta_i = beta0_i + kappa clamp(sup_{r<=t} X_r,i, +-clip)
//   moving-average beta_i = beta0_i + kappa clamp(mean of X_i over [t-tau, t], +-clip)
//   delay         beta_i = beta0_i + kappa clamp(X_i((t-tau)+), +-clip)
//   linear        beta_i = beta0_i + kappa X_t,i   (unbounded; tightness violator)
// All presets use sigma = sigma0 and w = jump_scale * y.
struct CoefficientConfig {
    std::string preset = "constant";
    int dim = 1;
    std::vector<double> beta0;   // defaults to zeros
    std::vector<double> sigma0;  // m*m row-major, defaults to zeros
    double jump_scale = 1.0;
    double kappa = 0.0;
    double tau = 0.25;
    double clip = 1.0;
};

CoefficientSet make_coefficients(const CoefficientConfig& cfg, const JumpMeasure& F);

// Numerical admissibility probe: boundedness against the declared constants
// and a finite-difference Lipschitz estimate in the path variable, plus a
// non-anticipativity check (perturbations strictly after t must not change
// the outputs). Advisory only.
struct CoefficientProbeReport {
    bool beta_bounded = true, sigma_bounded = true, jump_bounded = true;
    double beta_max = 0.0, sigma_max = 0.0, jump_max = 0.0;
    double beta_lipschitz = 0.0, sigma_lipschitz = 0.0, jump_lipschitz = 0.0;
    bool non_anticipative = true;
    double witness_time = -1.0; // time of the first bound violation, if any
    std::size_t probes = 0;

    bool all_ok() const {
        return beta_bounded && sigma_bounded && jump_bounded && non_anticipative;
    }
};

CoefficientProbeReport validate_coefficients(const CoefficientSet& coeffs,
                                             const JumpMeasure& F, GridPtr grid,
                                             std::size_t probe_budget,
                                             std::uint64_t seed);

} // namespace pathdep
