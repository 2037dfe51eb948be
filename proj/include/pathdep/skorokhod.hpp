#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pathdep/grid.hpp"

namespace pathdep {

// Non-owning view over an ensemble of paths sharing one grid.
struct EnsembleView {
    const TimeGrid* grid = nullptr;
    const double* data = nullptr; // n_paths * nodes * dim
    int dim = 0;
    std::size_t n_paths = 0;

    PathView path(std::size_t i) const {
        return PathView(*grid, data + i * grid->size() * static_cast<std::size_t>(dim), dim);
    }
};

// sup_{s,t in [a,b)} |w(t) - w(s)| for a step path; exact on the grid.
double oscillation(const PathView& path, double a, double b);

// variant with the right endpoint included, used for the last subdivision
// interval [t_{r-1}, N] which this project closes at N
double oscillation_closed(const PathView& path, double a, double b);

// W_N(w, theta) = sup over s,t in [0,N], |t-s| <= theta. Exact for step
// paths: the value pair (v_k, v_l), k < l, is attainable iff
// t_l - t_{k+1} < theta (s can sit anywhere inside the k-th cell).
double modulus_w(const PathView& path, double window_end, double theta);

struct ModulusReport {
    double window_end = 0.0; // N
    double theta = 0.0;
    double w_value = 0.0;      // W_N at the same theta
    double wprime_value = 0.0; // W'_N
    std::vector<double> subdivision; // achieving subdivision, 0 = t_0 < ... < t_r = N
};

// W'_N over subdivisions of [0,N] with grid-node breakpoints; every gap must
// be >= theta except possibly the last one (t_r is pinned at N). Exact
// infimum via dynamic programming with O(nodes^2) transitions. Throws when
// theta > N (no feasible subdivision).
ModulusReport modulus_wprime(const PathView& path, double window_end, double theta);

// value-only variant used by the tightness scan
double wprime_value(const PathView& path, double window_end, double theta);

struct TightnessCondition {
    std::string condition; // "sup_norm" or "wprime"
    double parameter = 0.0; // K or theta
    double alpha = 0.0;     // only for wprime rows
    double frequency = 0.0; // worst empirical frequency across ensembles
    double stderr_ = 0.0;
    bool pass = false;
};

struct TightnessVerdict {
    double K = -1.0; // compactness radius found, -1 when the search failed
    std::map<double, double> theta_per_alpha;
    bool pass = false;
    std::vector<TightnessCondition> conditions;
};

struct TightnessOptions {
    double epsilon = 0.05;
    std::vector<double> alphas{0.5};
    double k_start = 1.0;   // K schedule: k_start, 2 k_start, ... up to k_cap
    double k_cap = 1 << 20;
    double theta_start = 1.0; // theta schedule: halved down to the grid mesh
    int workers = 1;
};

// Evaluates both conditions of the cadlag tightness criterion empirically
// over a family of ensembles: sup_n P^n(sup_{t<=N} |w(t)| > K) <= eps for
// some K, and for each alpha some theta with inf_n P^n(W'_N < alpha) >= 1-eps.
TightnessVerdict tightness_check(const std::vector<EnsembleView>& ensembles,
                                 double window_end, const TightnessOptions& opt);

// Upper bound on the J1 distance between two paths on a common horizon,
// from the best monotone alignment of grid nodes (Frechet-style DP over
// node pairs). Zero iff the paths agree on the grid; symmetric.
double skorokhod_distance(const CadlagPath& p, const CadlagPath& q);

} // namespace pathdep
