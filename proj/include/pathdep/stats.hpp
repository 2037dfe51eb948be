#pragma once

#include <cmath>
#include <cstddef>

namespace pathdep {

// Streaming mean/variance accumulator (Welford) with deterministic merge.
struct MeanVar {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const MeanVar& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double d = o.mean - mean;
        const double nn = static_cast<double>(n + o.n);
        mean += d * static_cast<double>(o.n) / nn;
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / nn;
        n += o.n;
    }

    double variance() const {
        return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    }
    double stderr_mean() const {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

// z statistic of a mean estimate against a target; 0 is reported when the
// sampling noise vanished (degenerate estimator hitting the target exactly)
inline double z_score(double estimate, double target, double stderr_est) {
    const double d = estimate - target;
    if (stderr_est <= 0.0) return d == 0.0 ? 0.0 : HUGE_VAL;
    return d / stderr_est;
}

// standard normal quantile (upper z for a two-sided level `alpha`)
double normal_two_sided_z(double alpha);

// Bonferroni adjustment of a z threshold across `cells` simultaneous tests:
// the per-cell two-sided tail of base_z is divided by the cell count.
double bonferroni_z(double base_z, std::size_t cells);

} // namespace pathdep
