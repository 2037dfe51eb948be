#include "pathdep/generator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pathdep/parallel.hpp"
#include "pathdep/rng.hpp"
#include "pathdep/stats.hpp"

namespace pathdep {

std::vector<TestFunction> trig_family(const std::vector<std::vector<double>>& thetas) {
    if (thetas.empty()) throw std::invalid_argument("trig_family: empty theta set");
    std::vector<TestFunction> out;
    out.reserve(2 * thetas.size());
    for (const auto& theta : thetas) {
        const int m = static_cast<int>(theta.size());
        auto dot = [theta, m](const double* x) {
            double s = 0.0;
            for (int d = 0; d < m; ++d) s += theta[d] * x[d];
            return s;
        };
        std::ostringstream cn, sn;
        cn << "cos(";
        sn << "sin(";
        for (int d = 0; d < m; ++d) {
            if (d) {
                cn << ",";
                sn << ",";
            }
            cn << theta[d];
            sn << theta[d];
        }
        cn << ")";
        sn << ")";
        TestFunction c;
        c.name = cn.str();
        c.dim = m;
        c.bound = 1.0;
        c.f = [dot](const double* x) { return std::cos(dot(x)); };
        c.grad = [dot, theta, m](const double* x, double* g) {
            const double s = std::sin(dot(x));
            for (int d = 0; d < m; ++d) g[d] = -theta[d] * s;
        };
        c.hess = [dot, theta, m](const double* x, double* h) {
            const double cc = std::cos(dot(x));
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) h[a * m + b] = -theta[a] * theta[b] * cc;
        };
        TestFunction s;
        s.name = sn.str();
        s.dim = m;
        s.bound = 1.0;
        s.f = [dot](const double* x) { return std::sin(dot(x)); };
        s.grad = [dot, theta, m](const double* x, double* g) {
            const double cc = std::cos(dot(x));
            for (int d = 0; d < m; ++d) g[d] = theta[d] * cc;
        };
        s.hess = [dot, theta, m](const double* x, double* h) {
            const double ss = std::sin(dot(x));
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) h[a * m + b] = -theta[a] * theta[b] * ss;
        };
        out.push_back(std::move(c));
        out.push_back(std::move(s));
    }
    return out;
}

double apply_generator(const Model& model, const TestFunction& f, double t,
                       const PathView& path, bool drop_jump_compensation) {
    const int m = model.coeffs.dim;
    const double* x = path.at(t);
    // scratch reused across calls; this sits inside per-path ensemble scans
    thread_local std::vector<double> beta, sigma, grad, hess, w, shifted;
    beta.resize(m);
    sigma.resize(m * m);
    grad.resize(m);
    hess.resize(m * m);
    w.resize(m);
    shifted.resize(m);
    model.coeffs.beta(t, path, beta.data());
    model.coeffs.sigma(t, path, sigma.data());
    f.grad(x, grad.data());
    f.hess(x, hess.data());

    double val = 0.0;
    for (int d = 0; d < m; ++d) val += beta[d] * grad[d];
    // 1/2 Tr(sigma sigma^T H) = 1/2 sum_{a,b} (sigma sigma^T)_{ab} H_{ba}
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            double ssT = 0.0;
            for (int c = 0; c < m; ++c) ssT += sigma[a * m + c] * sigma[b * m + c];
            val += 0.5 * ssT * hess[b * m + a];
        }
    const double fx = f.f(x);
    for (std::size_t j = 0; j < model.jumps.size(); ++j) {
        model.coeffs.jump(t, path, model.jumps.atoms[j].data(), w.data());
        for (int d = 0; d < m; ++d) shifted[d] = x[d] + w[d];
        double term = f.f(shifted.data()) - fx;
        if (!drop_jump_compensation)
            for (int d = 0; d < m; ++d) term -= grad[d] * w[d];
        val += model.jumps.masses[j] * term;
    }
    return val;
}

double test_function_fd_error(const TestFunction& f, const double* x, double h) {
    const int m = f.dim;
    std::vector<double> g(m), H(m * m), xp(x, x + m), xm(x, x + m);
    f.grad(x, g.data());
    f.hess(x, H.data());
    double worst = 0.0;
    for (int d = 0; d < m; ++d) {
        xp[d] = x[d] + h;
        xm[d] = x[d] - h;
        const double fd = (f.f(xp.data()) - f.f(xm.data())) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - g[d]) / std::max(1.0, std::abs(g[d])));
        std::vector<double> gp(m), gm(m);
        f.grad(xp.data(), gp.data());
        f.grad(xm.data(), gm.data());
        for (int c = 0; c < m; ++c) {
            const double fdh = (gp[c] - gm[c]) / (2.0 * h);
            worst = std::max(worst,
                             std::abs(fdh - H[c * m + d]) / std::max(1.0, std::abs(H[c * m + d])));
        }
        xp[d] = x[d];
        xm[d] = x[d];
    }
    return worst;
}

bool EventSpec::contains(const PathView& path) const {
    if (kind == "all") return true;
    if (kind == "above") return path.at(times[0], coord) > level;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double* x = path.at(times[i]);
        double s = 0.0;
        for (int d = 0; d < path.dim(); ++d) {
            const double e = x[d] - centers[i][d];
            s += e * e;
        }
        if (std::sqrt(s) >= radii[i]) return false;
    }
    return true;
}

double EventSpec::latest_time() const {
    double t = 0.0;
    for (double v : times) t = std::max(t, v);
    return t;
}

EventSpec EventSpec::whole_space() {
    EventSpec e;
    e.kind = "all";
    e.label = "all";
    return e;
}

std::vector<EventSpec> make_event_bank(const TimeGrid& grid, int dim, double t,
                                       std::size_t count, std::uint64_t seed,
                                       double center_scale) {
    static const double radius_choices[] = {0.5, 1.0, 2.0, 4.0};
    std::vector<EventSpec> bank;
    bank.reserve(count);
    const std::size_t kt = grid.index_at(t);
    for (std::size_t e = 0; e < count; ++e) {
        RandomStream rs(derive_seed(seed, seed_tag::scenario, e), 0);
        EventSpec ev;
        ev.kind = "ball";
        const std::size_t n_times = 1 + (rs.next_u32() & 1u);
        for (std::size_t q = 0; q < n_times; ++q) {
            const std::size_t node = static_cast<std::size_t>(rs.uniform() * static_cast<double>(kt + 1));
            ev.times.push_back(grid.time(std::min(node, kt)));
            std::vector<double> c(dim);
            for (int d = 0; d < dim; ++d) {
                const long lattice = static_cast<long>(rs.uniform() * 9.0) - 4; // {-4..4}
                c[d] = center_scale * static_cast<double>(lattice) / 2.0;
            }
            ev.centers.push_back(std::move(c));
            ev.radii.push_back(radius_choices[rs.next_u32() & 3u]);
        }
        std::ostringstream label;
        label << "ball[";
        for (std::size_t q = 0; q < n_times; ++q) {
            if (q) label << ";";
            label << "t=" << ev.times[q] << ",c=(";
            for (int d = 0; d < dim; ++d) {
                if (d) label << ",";
                label << ev.centers[q][d];
            }
            label << "),r=" << ev.radii[q];
        }
        label << "]";
        ev.label = label.str();
        bank.push_back(std::move(ev));
    }
    return bank;
}

MartingaleTestReport verify_martingale_problem(const PathEnsemble& ensemble,
                                               const Model& model,
                                               const MartingaleProblemSpec& spec,
                                               int workers) {
    const TimeGrid& grid = *ensemble.grid;
    const double s = ensemble.init.s;
    for (const auto& [t, u] : spec.time_pairs) {
        if (t < s - 1e-12)
            throw std::invalid_argument("verify_martingale_problem: t must be >= ensemble start");
        if (t > u)
            throw std::invalid_argument("verify_martingale_problem: need t <= u");
    }

    // unique conditioning times with their event banks (whole space first)
    std::vector<double> cond_times;
    for (const auto& [t, u] : spec.time_pairs)
        if (std::find(cond_times.begin(), cond_times.end(), t) == cond_times.end())
            cond_times.push_back(t);
    std::sort(cond_times.begin(), cond_times.end());
    std::vector<std::vector<EventSpec>> banks(cond_times.size());
    for (std::size_t q = 0; q < cond_times.size(); ++q) {
        banks[q].push_back(EventSpec::whole_space());
        auto balls = make_event_bank(grid, ensemble.dim, cond_times[q], spec.events_per_t,
                                     derive_seed(spec.event_seed, seed_tag::scenario, q),
                                     spec.event_center_scale);
        for (auto& b : balls) {
            if (b.latest_time() > cond_times[q] + 1e-12)
                throw std::invalid_argument("verify_martingale_problem: event depends on the post-t path");
            banks[q].push_back(std::move(b));
        }
    }

    struct Cell {
        std::size_t f_idx, pair_idx, t_idx, ev_idx;
    };
    std::vector<Cell> cells;
    for (std::size_t fi = 0; fi < spec.functions.size(); ++fi)
        for (std::size_t pi = 0; pi < spec.time_pairs.size(); ++pi) {
            const double t = spec.time_pairs[pi].first;
            const std::size_t ti = static_cast<std::size_t>(
                std::find(cond_times.begin(), cond_times.end(), t) - cond_times.begin());
            for (std::size_t ei = 0; ei < banks[ti].size(); ++ei)
                cells.push_back(Cell{fi, pi, ti, ei});
        }

    const std::size_t n_cells = cells.size();
    const std::size_t nodes = grid.size();
    const std::size_t ks = grid.node_of(s);
    std::size_t max_bank = 1;
    for (const auto& b : banks) max_bank = std::max(max_bank, b.size());

    // per-cell accumulators, deterministically reduced in chunk order
    auto acc = chunked_reduce(
        ensemble.n_paths, 256, workers, std::vector<MeanVar>(n_cells),
        [&](std::size_t, std::size_t b, std::size_t e, std::vector<MeanVar>& a) {
            std::vector<double> gen_prefix(spec.functions.size() * nodes);
            std::vector<char> in_event;
            for (std::size_t i = b; i < e; ++i) {
                const PathView pv = ensemble.path(i);
                // prefix[k] = sum_{j in [s, t_k)} A_{t_j} f dt, per function
                for (std::size_t fi = 0; fi < spec.functions.size(); ++fi) {
                    double* pre = gen_prefix.data() + fi * nodes;
                    pre[ks] = 0.0;
                    for (std::size_t k = ks; k + 1 < nodes; ++k) {
                        const double dt = grid.time(k + 1) - grid.time(k);
                        pre[k + 1] = pre[k] + dt * apply_generator(model, spec.functions[fi],
                                                                   grid.time(k), pv,
                                                                   spec.sabotage_generator);
                    }
                }
                in_event.assign(cond_times.size() * max_bank, 0);
                for (std::size_t ti = 0; ti < cond_times.size(); ++ti)
                    for (std::size_t ei = 0; ei < banks[ti].size(); ++ei)
                        in_event[ti * max_bank + ei] = banks[ti][ei].contains(pv) ? 1 : 0;
                for (std::size_t c = 0; c < n_cells; ++c) {
                    const Cell& cell = cells[c];
                    const auto& [t, u] = spec.time_pairs[cell.pair_idx];
                    const std::size_t kt = grid.node_of(t), ku = grid.node_of(u);
                    const TestFunction& f = spec.functions[cell.f_idx];
                    const double* pre = gen_prefix.data() + cell.f_idx * nodes;
                    const double mu = f.f(pv.node(ku)) - pre[ku];
                    const double mt = f.f(pv.node(kt)) - pre[kt];
                    const double ind = in_event[cell.t_idx * max_bank + cell.ev_idx] ? 1.0 : 0.0;
                    a[c].add((mu - mt) * ind);
                }
            }
        },
        [](std::vector<MeanVar>& tot, const std::vector<MeanVar>& part) {
            for (std::size_t c = 0; c < tot.size(); ++c) tot[c].merge(part[c]);
        });

    MartingaleTestReport rep;
    rep.z_crit_base = spec.z_crit;
    rep.z_crit_adjusted = bonferroni_z(spec.z_crit, n_cells);
    rep.n_cells = n_cells;
    for (std::size_t c = 0; c < n_cells; ++c) {
        const Cell& cell = cells[c];
        const auto& [t, u] = spec.time_pairs[cell.pair_idx];
        CellResult r;
        r.function = spec.functions[cell.f_idx].name;
        r.event = banks[cell.t_idx][cell.ev_idx].label;
        r.t = t;
        r.u = u;
        std::ostringstream id;
        id << "mp/" << r.function << "/t=" << t << "/u=" << u << "/e" << cell.ev_idx;
        r.test_id = id.str();
        r.estimate = acc[c].mean;
        r.stderr_ = acc[c].stderr_mean();
        r.z = z_score(r.estimate, 0.0, r.stderr_);
        r.pass = std::abs(r.z) <= rep.z_crit_adjusted;
        if (r.pass) ++rep.n_pass;
        rep.pass = rep.pass && r.pass;
        rep.cells.push_back(std::move(r));
    }
    return rep;
}

double maf_from_generator(const ProcessFunctional& phi, double t, double u,
                          const PathView& path) {
    if (t > u) throw std::invalid_argument("maf_from_generator: need t <= u");
    const TimeGrid& grid = path.grid();
    const std::size_t kt = grid.node_of(t), ku = grid.node_of(u);
    double quad = 0.0;
    for (std::size_t k = kt; k < ku; ++k)
        quad += phi.a_phi(grid.time(k), path) *
                (phi.clock(grid.time(k + 1)) - phi.clock(grid.time(k)));
    return phi.phi(u, path) - phi.phi(t, path) - quad;
}

WeakGeneratorReport verify_weak_generator(const Model& model,
                                          const ProcessFunctional& phi,
                                          const InitialCondition& init, double t,
                                          std::size_t n_paths, std::uint64_t seed,
                                          double z_crit, int workers) {
    if (t < init.s)
        throw std::invalid_argument("verify_weak_generator: t must be >= s");
    const TimeGrid& grid = *model.grid;
    const std::size_t ks = grid.node_of(init.s), kt = grid.node_of(t);
    const double phi_s = phi.phi(init.s, init.eta.view());

    struct Acc {
        MeanVar lhs, quad, defect;
    };
    Acc acc;
    std::vector<Acc> parts((n_paths + kSimBlock - 1) / kSimBlock);
    simulate_visit(model, init, n_paths, seed, workers, 0,
                   [&](std::size_t i, const double* values) {
                       const PathView pv(grid, values, model.coeffs.dim);
                       double quad = 0.0;
                       for (std::size_t k = ks; k < kt; ++k)
                           quad += phi.a_phi(grid.time(k), pv) *
                                   (phi.clock(grid.time(k + 1)) - phi.clock(grid.time(k)));
                       const double lhs = phi.phi(t, pv);
                       if (std::abs(lhs) > phi.bound + 1e-9)
                           throw std::domain_error("verify_weak_generator: |Phi| exceeded its declared bound");
                       Acc& a = parts[i / kSimBlock];
                       a.lhs.add(lhs);
                       a.quad.add(quad);
                       a.defect.add(lhs - phi_s - quad);
                   });
    for (const Acc& p : parts) {
        acc.lhs.merge(p.lhs);
        acc.quad.merge(p.quad);
        acc.defect.merge(p.defect);
    }

    WeakGeneratorReport rep;
    rep.t = t;
    rep.lhs = acc.lhs.mean;
    rep.rhs = phi_s + acc.quad.mean;
    rep.discrepancy = acc.defect.mean;
    rep.stderr_ = acc.defect.stderr_mean();
    rep.z = z_score(rep.discrepancy, 0.0, rep.stderr_);
    rep.pass = std::abs(rep.z) <= z_crit;
    return rep;
}

ProcessFunctional cylinder_functional(const Model& model, const TestFunction& f) {
    ProcessFunctional out;
    out.name = f.name;
    out.bound = f.bound;
    out.phi = [f](double t, const PathView& p) { return f.f(p.at(t)); };
    out.a_phi = [model, f](double t, const PathView& p) {
        return apply_generator(model, f, t, p);
    };
    return out;
}

} // namespace pathdep
