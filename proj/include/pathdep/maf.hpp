#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pathdep/generator.hpp"

namespace pathdep {

// Two-time increment field A_{t,u}(w); additive in (t,u) with A_{t,t} = 0.
struct AdditiveFunctional {
    std::string name;
    std::function<double(double t, double u, const PathView&)> increment;
};

// MAF increments of a cylinder functional, M[Phi]_{t,u}
AdditiveFunctional maf_functional(const ProcessFunctional& phi);

// Refining subdivisions of [t,u]; every node lies on the grid.
struct PartitionScheme {
    double t = 0.0, u = 0.0;
    std::vector<std::vector<double>> levels;

    // dyadic refinement down to the grid mesh (or max_levels, if smaller)
    static PartitionScheme dyadic(const TimeGrid& grid, double t, double u,
                                  std::size_t max_levels = 32);
};

// Sum of squared increments per refinement level; the finest level is the
// quadratic-variation estimate [M]_{t,u}.
std::vector<double> quadratic_variation(const AdditiveFunctional& m,
                                        const PartitionScheme& scheme,
                                        const PathView& path);

// Predictable bracket of the cylinder MAF M[f] along one path:
// sum_k [ (grad f^T sigma sigma^T grad f)(t_k)
//         + sum_j mass_j (f(X_{t_k} + w_j) - f(X_{t_k}))^2 ] dt
double angular_bracket_cylinder(const Model& model, const TestFunction& f,
                                double t, double u, const PathView& path);

// polarization: bracket of the pair (f,g), bilinear extension of the above
double angular_bracket_cylinder_pair(const Model& model, const TestFunction& f,
                                     const TestFunction& g, double t, double u,
                                     const PathView& path);

// Radon-Nikodym density of a non-decreasing AF with respect to the clock V,
// through the one-window version of the Lebesgue-differentiation quotients:
//   k_t  = A_{t,t+d} / (A_{t,t+d} + d + dV)
//   k'_t = dV        / (A_{t,t+d} + d + dV)
//   h_t  = (k_t / k'_t) 1{k'_t != 0},    d = window_n * mesh.
struct DensityProcess {
    std::vector<double> times;
    std::vector<double> h;
};

DensityProcess rn_density(const AdditiveFunctional& a,
                          const std::function<double(double)>& clock,
                          const PathView& path, std::size_t window_n);

// Jordan decomposition of the grid increments of A over [t,u]:
// (sum of positive parts, sum of negative parts)
std::pair<double, double> variation_split(const AdditiveFunctional& a,
                                          const PathView& path, double t, double u);

} // namespace pathdep
