#include "pathdep/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathdep/rng.hpp"

namespace pathdep {

void JumpMeasure::add_atom(std::vector<double> y, double mass) {
    if (static_cast<int>(y.size()) != dim)
        throw std::invalid_argument("JumpMeasure: atom dimension mismatch");
    double nrm = 0.0;
    for (double v : y) nrm += v * v;
    if (nrm == 0.0)
        throw std::invalid_argument("JumpMeasure: atoms must not charge the origin");
    if (!(mass > 0.0))
        throw std::invalid_argument("JumpMeasure: atom mass must be positive");
    atoms.push_back(std::move(y));
    masses.push_back(mass);
}

double JumpMeasure::total_mass() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
}

namespace {

double euclid(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double clampd(double x, double lim) { return std::max(-lim, std::min(lim, x)); }

} // namespace

CoefficientSet make_coefficients(const CoefficientConfig& cfg, const JumpMeasure& F) {
    const int m = cfg.dim;
    if (m < 1) throw std::invalid_argument("make_coefficients: dim must be >= 1");
    std::vector<double> b0 = cfg.beta0;
    b0.resize(m, 0.0);
    std::vector<double> s0 = cfg.sigma0;
    s0.resize(static_cast<std::size_t>(m) * m, 0.0);
    const double jscale = cfg.jump_scale;
    const double kappa = cfg.kappa;
    const double tau = cfg.tau;
    const double clip = cfg.clip;

    CoefficientSet out;
    out.dim = m;
    out.sigma = [s0, m](double, const PathView&, double* o) {
        std::copy(s0.begin(), s0.end(), o);
    };
    out.jump = [jscale, m](double, const PathView&, const double* y, double* o) {
        for (int d = 0; d < m; ++d) o[d] = jscale * y[d];
    };

    if (cfg.preset == "constant") {
        out.beta = [b0, m](double, const PathView&, double* o) {
            std::copy(b0.begin(), b0.end(), o);
        };
    } else if (cfg.preset == "markov") {
        out.beta = [b0, kappa, m](double t, const PathView& p, double* o) {
            const double* x = p.at(t);
            for (int d = 0; d < m; ++d) o[d] = b0[d] + kappa * std::tanh(x[d]);
        };
    } else if (cfg.preset == "running-max") {
        out.beta = [b0, kappa, clip, m](double t, const PathView& p, double* o) {
            const std::size_t k1 = p.grid().index_at(t);
            for (int d = 0; d < m; ++d) {
                double mx = p.node(0, d);
                for (std::size_t k = 1; k <= k1; ++k) mx = std::max(mx, p.node(k, d));
                o[d] = b0[d] + kappa * clampd(mx, clip);
            }
        };
    } else if (cfg.preset == "moving-average") {
        out.beta = [b0, kappa, tau, clip, m](double t, const PathView& p, double* o) {
            const TimeGrid& g = p.grid();
            const std::size_t k1 = g.index_at(t);
            const std::size_t k0 = g.index_at(std::max(0.0, t - tau));
            for (int d = 0; d < m; ++d) {
                double acc = 0.0, len = 0.0;
                for (std::size_t k = k0; k < std::max(k1, k0 + 1); ++k) {
                    const double w = g.time(k + 1) - g.time(k);
                    acc += p.node(k, d) * w;
                    len += w;
                }
                const double avg = len > 0.0 ? acc / len : p.node(k0, d);
                o[d] = b0[d] + kappa * clampd(avg, clip);
            }
        };
    } else if (cfg.preset == "delay") {
        out.beta = [b0, kappa, tau, clip, m](double t, const PathView& p, double* o) {
            const double* x = p.at(std::max(0.0, t - tau));
            for (int d = 0; d < m; ++d) o[d] = b0[d] + kappa * clampd(x[d], clip);
        };
    } else if (cfg.preset == "linear") {
        out.beta = [b0, kappa, m](double t, const PathView& p, double* o) {
            const double* x = p.at(t);
            for (int d = 0; d < m; ++d) o[d] = b0[d] + kappa * x[d];
        };
    } else {
        throw std::invalid_argument("make_coefficients: unknown preset '" + cfg.preset + "'");
    }

    // declared bounds
    const bool feedback = cfg.preset != "constant";
    const double feed = cfg.preset == "linear"
                            ? std::numeric_limits<double>::infinity()
                            : (feedback ? std::abs(kappa) * std::max(1.0, clip) : 0.0);
    double bb = 0.0;
    for (int d = 0; d < m; ++d) bb += (std::abs(b0[d]) + feed) * (std::abs(b0[d]) + feed);
    out.beta_bound = std::isfinite(feed) ? std::sqrt(bb)
                                         : std::numeric_limits<double>::infinity();
    out.sigma_bound = euclid(s0);
    double ymax = 0.0;
    for (const auto& y : F.atoms) ymax = std::max(ymax, euclid(y));
    out.jump_bound = std::abs(jscale) * ymax;
    out.declared_bounded = cfg.preset != "linear";
    return out;
}

CoefficientProbeReport validate_coefficients(const CoefficientSet& coeffs,
                                             const JumpMeasure& F, GridPtr grid,
                                             std::size_t probe_budget,
                                             std::uint64_t seed) {
    if (probe_budget < 1)
        throw std::invalid_argument("validate_coefficients: probe_budget must be >= 1");
    const int m = coeffs.dim;
    const std::size_t nodes = grid->size();
    CoefficientProbeReport rep;
    rep.probes = probe_budget;
    const double tol = 1e-9;

    std::vector<double> base(nodes * m), bumped(nodes * m);
    std::vector<double> o1(m), o2(m), s1(m * m), s2(m * m), w1(m), w2(m);

    for (std::size_t probe = 0; probe < probe_budget; ++probe) {
        RandomStream rs(derive_seed(seed, seed_tag::probe, probe), 0);
        // bounded random walk probe path
        for (int d = 0; d < m; ++d) base[d] = 2.0 * rs.uniform() - 1.0;
        for (std::size_t k = 1; k < nodes; ++k)
            for (int d = 0; d < m; ++d) {
                double v = base[(k - 1) * m + d] + 0.3 * (2.0 * rs.uniform() - 1.0);
                base[k * m + d] = clampd(v, 2.0);
            }
        const std::size_t kt = 1 + static_cast<std::size_t>(rs.uniform() * static_cast<double>(nodes - 2));
        const double t = grid->time(kt);
        const PathView pv(*grid, base.data(), m);

        // sup-distance-controlled perturbation on [0, t]
        bumped = base;
        const double eps = 1e-4 * (1.0 + rs.uniform());
        for (std::size_t k = 0; k <= kt; ++k)
            for (int d = 0; d < m; ++d) bumped[k * m + d] += eps;
        const PathView pb(*grid, bumped.data(), m);

        coeffs.beta(t, pv, o1.data());
        coeffs.beta(t, pb, o2.data());
        double nrm = 0.0, dif = 0.0;
        for (int d = 0; d < m; ++d) {
            nrm += o1[d] * o1[d];
            const double e = o1[d] - o2[d];
            dif += e * e;
        }
        nrm = std::sqrt(nrm);
        rep.beta_max = std::max(rep.beta_max, nrm);
        rep.beta_lipschitz = std::max(rep.beta_lipschitz, std::sqrt(dif) / (eps * std::sqrt(double(m))));
        if (nrm > coeffs.beta_bound + tol) {
            rep.beta_bounded = false;
            if (rep.witness_time < 0.0) rep.witness_time = t;
        }

        coeffs.sigma(t, pv, s1.data());
        coeffs.sigma(t, pb, s2.data());
        nrm = 0.0;
        dif = 0.0;
        for (int d = 0; d < m * m; ++d) {
            nrm += s1[d] * s1[d];
            const double e = s1[d] - s2[d];
            dif += e * e;
        }
        nrm = std::sqrt(nrm);
        rep.sigma_max = std::max(rep.sigma_max, nrm);
        rep.sigma_lipschitz = std::max(rep.sigma_lipschitz, std::sqrt(dif) / (eps * std::sqrt(double(m))));
        if (nrm > coeffs.sigma_bound + tol) {
            rep.sigma_bounded = false;
            if (rep.witness_time < 0.0) rep.witness_time = t;
        }

        for (std::size_t j = 0; j < F.size(); ++j) {
            coeffs.jump(t, pv, F.atoms[j].data(), w1.data());
            coeffs.jump(t, pb, F.atoms[j].data(), w2.data());
            nrm = 0.0;
            dif = 0.0;
            for (int d = 0; d < m; ++d) {
                nrm += w1[d] * w1[d];
                const double e = w1[d] - w2[d];
                dif += e * e;
            }
            nrm = std::sqrt(nrm);
            rep.jump_max = std::max(rep.jump_max, nrm);
            rep.jump_lipschitz = std::max(rep.jump_lipschitz, std::sqrt(dif) / (eps * std::sqrt(double(m))));
            if (nrm > coeffs.jump_bound + tol) {
                rep.jump_bounded = false;
                if (rep.witness_time < 0.0) rep.witness_time = t;
            }
        }

        // perturbation strictly after t must be invisible at time t
        bumped = base;
        for (std::size_t k = kt + 1; k < nodes; ++k)
            for (int d = 0; d < m; ++d) bumped[k * m + d] += 1.0 + rs.uniform();
        const PathView pa(*grid, bumped.data(), m);
        coeffs.beta(t, pa, o2.data());
        coeffs.sigma(t, pa, s2.data());
        for (int d = 0; d < m; ++d)
            if (o1[d] != o2[d]) rep.non_anticipative = false;
        for (int d = 0; d < m * m; ++d)
            if (s1[d] != s2[d]) rep.non_anticipative = false;
        if (!F.atoms.empty()) {
            coeffs.jump(t, pv, F.atoms[0].data(), w1.data());
            coeffs.jump(t, pa, F.atoms[0].data(), w2.data());
            for (int d = 0; d < m; ++d)
                if (w1[d] != w2[d]) rep.non_anticipative = false;
        }
    }
    return rep;
}

} // namespace pathdep
