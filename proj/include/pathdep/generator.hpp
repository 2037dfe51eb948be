#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pathdep/engine.hpp"

namespace pathdep {

// C^2_b test function with exact gradient and Hessian.
struct TestFunction {
    std::string name;
    int dim = 1;
    double bound = 1.0;
    std::function<double(const double*)> f;
    std::function<void(const double*, double*)> grad;  // out[m]
    std::function<void(const double*, double*)> hess;  // out[m*m]
};

// cos(theta.x) and sin(theta.x) for each theta; the classical countable
// family that already characterizes weak solutions.
std::vector<TestFunction> trig_family(const std::vector<std::vector<double>>& thetas);

// A_t f = beta.grad f + 1/2 Tr(sigma sigma^T hess f)
//         + sum_j mass_j (f(X_t + w_j) - f(X_t) - grad f . w_j);
// the jump integral is exact over the atoms. With drop_jump_compensation the
// "- grad f . w_j" term is omitted (test hook for bias detection).
double apply_generator(const Model& model, const TestFunction& f, double t,
                       const PathView& path, bool drop_jump_compensation = false);

// finite-difference consistency probe for grad/hess against f
double test_function_fd_error(const TestFunction& f, const double* x, double h);

// Conditioning / target events: cylinder sets over finitely many times.
// kind "ball": all listed coordinates lie in a ball; kind "above": the value
// at times[0], coordinate `coord`, exceeds `level`.
struct EventSpec {
    std::string kind = "ball"; // "ball" | "above" | "all"
    std::string label = "all";
    std::vector<double> times;
    std::vector<std::vector<double>> centers;
    std::vector<double> radii;
    int coord = 0;
    double level = 0.0;

    bool contains(const PathView& path) const;
    double latest_time() const;
    static EventSpec whole_space();
};

// Deterministic pi-system bank at conditioning time t: single- and two-time
// ball cylinders with lattice centers and rational radii; entry e is fully
// determined by (seed, e).
std::vector<EventSpec> make_event_bank(const TimeGrid& grid, int dim, double t,
                                       std::size_t count, std::uint64_t seed,
                                       double center_scale = 0.5);

struct CellResult {
    std::string test_id;
    std::string function;
    std::string event;
    double t = 0.0, u = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double z = 0.0;
    bool pass = true;
};

struct MartingaleTestReport {
    std::vector<CellResult> cells;
    double z_crit_base = 3.0;
    double z_crit_adjusted = 3.0;
    std::size_t n_cells = 0;
    std::size_t n_pass = 0;
    bool pass = true;
    double pass_fraction() const {
        return n_cells == 0 ? 1.0 : static_cast<double>(n_pass) / static_cast<double>(n_cells);
    }
};

// E[(M_u - M_t) 1_G] / stderr per (f, (t,u), G) cell, where
// M = f(X) - sum_k A_{t_k} f dt along the grid. The threshold is the
// Bonferroni adjustment of z_crit across all cells.
struct MartingaleProblemSpec {
    std::vector<TestFunction> functions;
    std::vector<std::pair<double, double>> time_pairs; // t <= u
    std::size_t events_per_t = 8;
    std::uint64_t event_seed = 7;
    double event_center_scale = 0.5;
    double z_crit = 3.0;
    bool sabotage_generator = false; // drop the jump compensation term
};

MartingaleTestReport verify_martingale_problem(const PathEnsemble& ensemble,
                                               const Model& model,
                                               const MartingaleProblemSpec& spec,
                                               int workers = 1);

// Domain element for the weak-generator identity: Phi, its image A(Phi) and
// the reference clock V (non-decreasing continuous; identity by default).
struct ProcessFunctional {
    std::string name;
    double bound = 1.0;
    std::function<double(double, const PathView&)> phi;
    std::function<double(double, const PathView&)> a_phi;
    std::function<double(double)> clock = [](double t) { return t; };
};

// M[Phi]_{t,u}(w) = Phi_u(w) - Phi_t(w) - sum_{t<=r_k<u} A(Phi)_{r_k}(w) dV_k
// (left-endpoint quadrature on the grid clock increments)
double maf_from_generator(const ProcessFunctional& phi, double t, double u,
                          const PathView& path);

struct WeakGeneratorReport {
    double t = 0.0;
    double lhs = 0.0;      // E[Phi_t]
    double rhs = 0.0;      // Phi_s(eta) + sum E[A(Phi)_r] dV
    double discrepancy = 0.0;
    double stderr_ = 0.0;  // paired standard error of the per-path defect
    double z = 0.0;
    bool pass = true;
};

WeakGeneratorReport verify_weak_generator(const Model& model,
                                          const ProcessFunctional& phi,
                                          const InitialCondition& init, double t,
                                          std::size_t n_paths, std::uint64_t seed,
                                          double z_crit = 3.0, int workers = 1);

// Phi = f(X_.) with A(Phi) from the generator; the cylinder elements of the
// operator domain used throughout the test suites.
ProcessFunctional cylinder_functional(const Model& model, const TestFunction& f);

} // namespace pathdep
