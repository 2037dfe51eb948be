#include "pathdep/maf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathdep {

AdditiveFunctional maf_functional(const ProcessFunctional& phi) {
    AdditiveFunctional a;
    a.name = "M[" + phi.name + "]";
    a.increment = [phi](double t, double u, const PathView& p) {
        return maf_from_generator(phi, t, u, p);
    };
    return a;
}

PartitionScheme PartitionScheme::dyadic(const TimeGrid& grid, double t, double u,
                                        std::size_t max_levels) {
    if (!(t < u)) throw std::invalid_argument("PartitionScheme: need t < u");
    const std::size_t kt = grid.node_of(t), ku = grid.node_of(u);
    PartitionScheme s;
    s.t = grid.time(kt);
    s.u = grid.time(ku);
    const std::size_t span = ku - kt;
    for (std::size_t level = 0;; ++level) {
        const std::size_t pieces = std::size_t{1} << level;
        std::vector<double> nodes;
        nodes.reserve(pieces + 1);
        std::size_t prev = static_cast<std::size_t>(-1);
        for (std::size_t i = 0; i <= pieces; ++i) {
            const std::size_t k = kt + (span * i) / pieces;
            if (k != prev) nodes.push_back(grid.time(k));
            prev = k;
        }
        s.levels.push_back(std::move(nodes));
        if (pieces >= span || level + 1 >= max_levels) break;
    }
    return s;
}

std::vector<double> quadratic_variation(const AdditiveFunctional& m,
                                        const PartitionScheme& scheme,
                                        const PathView& path) {
    std::vector<double> out;
    out.reserve(scheme.levels.size());
    for (const auto& nodes : scheme.levels) {
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double inc = m.increment(nodes[i], nodes[i + 1], path);
            sum += inc * inc;
        }
        out.push_back(sum);
    }
    return out;
}

double angular_bracket_cylinder_pair(const Model& model, const TestFunction& f,
                                     const TestFunction& g, double t, double u,
                                     const PathView& path) {
    if (t > u) throw std::invalid_argument("angular_bracket_cylinder: need t <= u");
    const TimeGrid& grid = path.grid();
    const int m = model.coeffs.dim;
    const std::size_t kt = grid.node_of(t), ku = grid.node_of(u);
    std::vector<double> sigma(m * m), gf(m), gg(m), w(m), shifted(m);
    double acc = 0.0;
    for (std::size_t k = kt; k < ku; ++k) {
        const double tk = grid.time(k);
        const double dt = grid.time(k + 1) - tk;
        const double* x = path.node(k);
        model.coeffs.sigma(tk, path, sigma.data());
        f.grad(x, gf.data());
        g.grad(x, gg.data());
        // grad f^T sigma sigma^T grad g
        double cont = 0.0;
        for (int c = 0; c < m; ++c) {
            double sf = 0.0, sg = 0.0;
            for (int a = 0; a < m; ++a) {
                sf += sigma[a * m + c] * gf[a];
                sg += sigma[a * m + c] * gg[a];
            }
            cont += sf * sg;
        }
        double jump = 0.0;
        const double fx = f.f(x), gx = g.f(x);
        for (std::size_t j = 0; j < model.jumps.size(); ++j) {
            model.coeffs.jump(tk, path, model.jumps.atoms[j].data(), w.data());
            for (int d = 0; d < m; ++d) shifted[d] = x[d] + w[d];
            jump += model.jumps.masses[j] * (f.f(shifted.data()) - fx) *
                    (g.f(shifted.data()) - gx);
        }
        acc += (cont + jump) * dt;
    }
    return acc;
}

double angular_bracket_cylinder(const Model& model, const TestFunction& f,
                                double t, double u, const PathView& path) {
    return angular_bracket_cylinder_pair(model, f, f, t, u, path);
}

DensityProcess rn_density(const AdditiveFunctional& a,
                          const std::function<double(double)>& clock,
                          const PathView& path, std::size_t window_n) {
    if (window_n < 1) throw std::invalid_argument("rn_density: zero-length window");
    const TimeGrid& grid = path.grid();
    const std::size_t nodes = grid.size();
    if (window_n >= nodes)
        throw std::invalid_argument("rn_density: window exceeds the grid");
    DensityProcess out;
    out.times.reserve(nodes - window_n);
    out.h.reserve(nodes - window_n);
    for (std::size_t k = 0; k + window_n < nodes; ++k) {
        const double t = grid.time(k);
        const double td = grid.time(k + window_n);
        const double delta = td - t;
        const double inc = a.increment(t, td, path);
        if (inc < -1e-12)
            throw std::invalid_argument("rn_density: functional decreases along the path");
        const double dv = clock(td) - clock(t);
        if (dv < -1e-12)
            throw std::invalid_argument("rn_density: clock must be non-decreasing");
        const double denom = inc + delta + dv;
        const double kq = inc / denom;
        const double kp = dv / denom;
        out.times.push_back(t);
        out.h.push_back(kp != 0.0 ? kq / kp : 0.0);
    }
    return out;
}

std::pair<double, double> variation_split(const AdditiveFunctional& a,
                                          const PathView& path, double t, double u) {
    if (t > u) throw std::invalid_argument("variation_split: need t <= u");
    const TimeGrid& grid = path.grid();
    const std::size_t kt = grid.node_of(t), ku = grid.node_of(u);
    double pos = 0.0, neg = 0.0;
    for (std::size_t k = kt; k < ku; ++k) {
        const double inc = a.increment(grid.time(k), grid.time(k + 1), path);
        if (inc > 0.0)
            pos += inc;
        else
            neg -= inc;
    }
    return {pos, neg};
}

} // namespace pathdep
