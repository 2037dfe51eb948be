#include "pathdep/engine.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "pathdep/parallel.hpp"
#include "pathdep/rng.hpp"

namespace pathdep {

namespace {

void check_inputs(const Model& model, const InitialCondition& init) {
    const int m = model.coeffs.dim;
    if (!model.grid) throw std::invalid_argument("simulate: null grid");
    if (model.jumps.dim != m)
        throw std::invalid_argument("simulate: jump measure dimension mismatch");
    if (init.eta.dim() != m)
        throw std::invalid_argument("simulate: initial path dimension mismatch");
    if (!init.eta.grid().same_as(*model.grid))
        throw std::invalid_argument("simulate: initial path grid mismatch");
    if (!model.grid->is_node(init.s))
        throw std::invalid_argument("simulate: start time must be a grid node");
    for (const auto& y : model.jumps.atoms) {
        double nrm = 0.0;
        for (double v : y) nrm += v * v;
        if (nrm == 0.0)
            throw std::invalid_argument("simulate: jump measure charges the origin");
    }
}

} // namespace

void simulate_visit(const Model& model, const InitialCondition& init,
                    std::size_t n_paths, std::uint64_t seed, int workers,
                    std::uint64_t first_stream,
                    const std::function<void(std::size_t, const double*)>& visit) {
    check_inputs(model, init);
    if (n_paths < 1) throw std::invalid_argument("simulate: n_paths must be >= 1");
    const TimeGrid& grid = *model.grid;
    const int m = model.coeffs.dim;
    const std::size_t nodes = grid.size();
    const std::size_t ks = grid.node_of(init.s);
    const std::size_t n_atoms = model.jumps.size();

    parallel_chunks(n_paths, kSimBlock, workers, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<double> values(nodes * m);
        std::vector<double> beta(m), sigma(m * m), w(m), xi(m);
        std::vector<double> lam(n_atoms), explam(n_atoms);
        double cached_dt = -1.0;
        for (std::size_t i = b; i < e; ++i) {
            RandomStream rs(seed, first_stream + i);
            // pinned start: bit-exact copy of eta on [0, s]
            std::memcpy(values.data(), init.eta.values().data(),
                        (ks + 1) * m * sizeof(double));
            const PathView pv(grid, values.data(), m);
            for (std::size_t k = ks; k + 1 < nodes; ++k) {
                const double t = grid.time(k);
                const double dt = grid.time(k + 1) - t;
                const double sdt = std::sqrt(dt);
                model.coeffs.beta(t, pv, beta.data());
                model.coeffs.sigma(t, pv, sigma.data());
                for (int d = 0; d < m; ++d) xi[d] = rs.normal();
                double* next = values.data() + (k + 1) * m;
                const double* cur = values.data() + k * m;
                for (int d = 0; d < m; ++d) {
                    double diff = 0.0;
                    for (int c = 0; c < m; ++c) diff += sigma[d * m + c] * xi[c];
                    next[d] = cur[d] + beta[d] * dt + sdt * diff;
                }
                if (dt != cached_dt) {
                    for (std::size_t j = 0; j < n_atoms; ++j) {
                        lam[j] = model.jumps.masses[j] * dt;
                        explam[j] = std::exp(-lam[j]);
                    }
                    cached_dt = dt;
                }
                for (std::size_t j = 0; j < n_atoms; ++j) {
                    const double u = rs.uniform();
                    long count = 0;
                    double p = explam[j], cdf = p;
                    while (u > cdf && count < 1024) {
                        ++count;
                        p *= lam[j] / static_cast<double>(count);
                        cdf += p;
                    }
                    model.coeffs.jump(t, pv, model.jumps.atoms[j].data(), w.data());
                    const double comp = model.jumps.masses[j] * dt;
                    for (int d = 0; d < m; ++d)
                        next[d] += static_cast<double>(count) * w[d] - comp * w[d];
                }
            }
            visit(i, values.data());
        }
    });
}

PathEnsemble simulate(const Model& model, const InitialCondition& init,
                      std::size_t n_paths, std::uint64_t seed, int workers) {
    PathEnsemble ens;
    ens.grid = model.grid;
    ens.dim = model.coeffs.dim;
    ens.n_paths = n_paths;
    ens.init = init;
    ens.seed = seed;
    const std::size_t stride = model.grid->size() * static_cast<std::size_t>(ens.dim);
    ens.data.resize(n_paths * stride);
    double* out = ens.data.data();
    simulate_visit(model, init, n_paths, seed, workers, 0,
                   [out, stride](std::size_t i, const double* values) {
                       std::memcpy(out + i * stride, values, stride * sizeof(double));
                   });
    return ens;
}

Characteristics characteristics(const Model& model, const CadlagPath& path, double s) {
    if (!model.grid->is_node(s))
        throw std::invalid_argument("characteristics: s must be a grid node");
    if (!path.grid().same_as(*model.grid))
        throw std::invalid_argument("characteristics: path grid mismatch");
    const TimeGrid& grid = *model.grid;
    const int m = model.coeffs.dim;
    const std::size_t nodes = grid.size();
    const std::size_t ks = grid.node_of(s);

    Characteristics ch;
    ch.grid = model.grid;
    ch.dim = m;
    ch.start = grid.time(ks);
    ch.drift.assign(nodes * m, 0.0);
    ch.cont.assign(nodes * m * m, 0.0);

    std::vector<double> beta(m), sigma(m * m);
    const PathView pv = path.view();
    for (std::size_t k = ks; k + 1 < nodes; ++k) {
        const double t = grid.time(k);
        const double dt = grid.time(k + 1) - t;
        model.coeffs.beta(t, pv, beta.data());
        model.coeffs.sigma(t, pv, sigma.data());
        double* Bn = ch.drift.data() + (k + 1) * m;
        const double* Bp = ch.drift.data() + k * m;
        for (int d = 0; d < m; ++d) Bn[d] = Bp[d] + beta[d] * dt;
        double* Cn = ch.cont.data() + (k + 1) * m * m;
        const double* Cp = ch.cont.data() + k * m * m;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                double ssT = 0.0;
                for (int c = 0; c < m; ++c) ssT += sigma[a * m + c] * sigma[b * m + c];
                Cn[a * m + b] = Cp[a * m + b] + ssT * dt;
            }
    }
    return ch;
}

double jump_intensity(const Model& model, double t, const PathView& path,
                      std::size_t atom) {
    if (atom >= model.jumps.size())
        throw std::out_of_range("jump_intensity: atom index out of range");
    const int m = model.coeffs.dim;
    std::vector<double> w(m);
    model.coeffs.jump(t, path, model.jumps.atoms[atom].data(), w.data());
    for (int d = 0; d < m; ++d)
        if (w[d] != 0.0) return model.jumps.masses[atom];
    return 0.0;
}

} // namespace pathdep
