#pragma once

#include <cstdint>
#include <vector>

#include "pathdep/coefficients.hpp"
#include "pathdep/grid.hpp"
#include "pathdep/skorokhod.hpp"

namespace pathdep {

// Empirical law: n equally weighted sampled paths on one grid, pinned to the
// starting path eta on [0, s] bit-exactly.
struct PathEnsemble {
    GridPtr grid;
    int dim = 1;
    std::size_t n_paths = 0;
    InitialCondition init;
    std::uint64_t seed = 0;
    std::vector<double> data; // n_paths * nodes * dim

    PathView path(std::size_t i) const {
        return PathView(*grid, data.data() + i * grid->size() * static_cast<std::size_t>(dim), dim);
    }
    CadlagPath extract(std::size_t i) const {
        const std::size_t stride = grid->size() * static_cast<std::size_t>(dim);
        return CadlagPath(grid, dim,
                          std::vector<double>(data.begin() + i * stride,
                                              data.begin() + (i + 1) * stride));
    }
    EnsembleView view() const { return EnsembleView{grid.get(), data.data(), dim, n_paths}; }
    double weight() const { return 1.0 / static_cast<double>(n_paths); }
};

// Model bundle most verifiers need.
struct Model {
    CoefficientSet coeffs;
    JumpMeasure jumps;
    GridPtr grid;
};

// Explicit Euler scheme on [s, T] with left-endpoint coefficient evaluation
// and per-atom Poisson jump counts; the per-step compensator
// dt * sum_j mass_j w(t_k, ., y_j) is subtracted so the jump part tracks the
// compensated Poisson integral. Path i consumes the Philox stream
// (seed, first_stream + i); results are bit-identical for any worker count.
PathEnsemble simulate(const Model& model, const InitialCondition& init,
                      std::size_t n_paths, std::uint64_t seed, int workers = 1);

// Path-index block size used by simulate_visit: within a block, visits run
// sequentially in increasing i on one worker; distinct blocks may run
// concurrently. Streaming accumulators slotted per block stay deterministic.
inline constexpr std::size_t kSimBlock = 64;

// Streaming variant: visit(i, values) sees each finished path (values is the
// flat nodes*dim buffer) without materializing the whole ensemble.
void simulate_visit(const Model& model, const InitialCondition& init,
                    std::size_t n_paths, std::uint64_t seed, int workers,
                    std::uint64_t first_stream,
                    const std::function<void(std::size_t, const double*)>& visit);

// Semimartingale characteristics along one realized path: B and C as grid
// processes started at s, plus the jump-compensator intensity per atom.
struct Characteristics {
    GridPtr grid;
    int dim = 1;
    double start = 0.0;
    std::vector<double> drift;   // nodes * m           (B)
    std::vector<double> cont;    // nodes * m * m       (C)

    const double* B(std::size_t k) const { return drift.data() + k * dim; }
    const double* C(std::size_t k) const { return cont.data() + k * dim * dim; }
};

Characteristics characteristics(const Model& model, const CadlagPath& path, double s);

// nu intensity at (t, path, atom j): mass_j when w(t, path, y_j) != 0, else 0
double jump_intensity(const Model& model, double t, const PathView& path, std::size_t atom);

} // namespace pathdep
