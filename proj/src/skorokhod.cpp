#include "pathdep/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pathdep/parallel.hpp"

namespace pathdep {

namespace {

constexpr double kTimeTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

double dist(const double* a, const double* b, int m) {
    double s = 0.0;
    for (int d = 0; d < m; ++d) {
        const double e = a[d] - b[d];
        s += e * e;
    }
    return std::sqrt(s);
}

// oscillation over the node index range [k0, k1] (inclusive)
double osc_nodes(const PathView& p, std::size_t k0, std::size_t k1) {
    const int m = p.dim();
    if (m == 1) {
        double lo = p.node(k0, 0), hi = lo;
        for (std::size_t k = k0 + 1; k <= k1; ++k) {
            const double v = p.node(k, 0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo;
    }
    double best = 0.0;
    for (std::size_t k = k0; k <= k1; ++k)
        for (std::size_t l = k + 1; l <= k1; ++l)
            best = std::max(best, dist(p.node(k), p.node(l), m));
    return best;
}

// last node whose value is taken on [a, b): excludes b when b is a node
std::size_t last_node_before(const PathView& p, double b) {
    const TimeGrid& g = p.grid();
    std::size_t j = g.index_at(b);
    const double tol = kTimeTol * std::max(1.0, g.horizon());
    if (j > 0 && std::abs(g.time(j) - b) <= tol) --j;
    return j;
}

} // namespace

double oscillation(const PathView& path, double a, double b) {
    if (!(a < b))
        throw std::invalid_argument("oscillation: empty or inverted interval");
    const std::size_t k0 = path.grid().index_at(a);
    const std::size_t k1 = std::max(k0, last_node_before(path, b));
    return osc_nodes(path, k0, k1);
}

double oscillation_closed(const PathView& path, double a, double b) {
    if (!(a < b))
        throw std::invalid_argument("oscillation: empty or inverted interval");
    return osc_nodes(path, path.grid().index_at(a), path.grid().index_at(b));
}

double modulus_w(const PathView& path, double window_end, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("modulus_w: theta must be > 0");
    const TimeGrid& g = path.grid();
    const std::size_t end = g.index_at(window_end);
    const double tol = kTimeTol * std::max(1.0, g.horizon());
    const int m = path.dim();
    double best = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
        const double gate = g.time(k + 1) + theta - tol;
        for (std::size_t l = k + 1; l <= end && g.time(l) < gate; ++l)
            best = std::max(best, dist(path.node(k), path.node(l), m));
    }
    return best;
}

namespace {

struct WprimeResult {
    double value = 0.0;
    std::size_t final_from = 0;
    std::vector<std::size_t> from; // backpointers, only filled when traced
};

WprimeResult wprime_dp(const PathView& path, double window_end, double theta,
                       bool trace) {
    const TimeGrid& g = path.grid();
    const double tol = kTimeTol * std::max(1.0, g.horizon());
    const std::size_t end = g.node_of(window_end);
    if (end == 0) throw std::invalid_argument("modulus_wprime: empty window");
    if (theta > g.time(end) + tol)
        throw std::invalid_argument("modulus_wprime: theta exceeds the window (infeasible subdivision)");
    const int m = path.dim();

    // dp[i]: best max-oscillation over subdivisions 0 = u_0 < ... < u_p = t_i
    // whose gaps are all >= theta; intervals are half-open [u_{q-1}, u_q)
    std::vector<double> dp(end + 1, kInf);
    std::vector<std::size_t> from(trace ? end + 1 : 0, 0);
    dp[0] = 0.0;
    std::vector<double> win; // node values seen while j decreases (dim > 1)
    for (std::size_t i = 1; i <= end; ++i) {
        double lo = 0.0, hi = 0.0, osc = 0.0;
        bool first = true;
        win.clear();
        for (std::size_t jj = i; jj-- > 0;) {
            // include node jj into the oscillation of [t_jj, t_i)
            if (m == 1) {
                const double v = path.node(jj, 0);
                if (first) {
                    lo = hi = v;
                    first = false;
                } else {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                osc = hi - lo;
            } else {
                const double* v = path.node(jj);
                for (std::size_t q = 0; q < win.size(); q += m)
                    osc = std::max(osc, dist(v, win.data() + q, m));
                win.insert(win.end(), v, v + m);
            }
            if (g.time(i) - g.time(jj) < theta - tol) continue; // gap too small
            if (dp[jj] == kInf) continue;
            const double cand = std::max(dp[jj], osc);
            if (cand < dp[i]) {
                dp[i] = cand;
                if (trace) from[i] = jj;
            }
        }
    }

    // final interval [t_j, N] is closed at N and exempt from the gap bound
    WprimeResult res;
    double best = kInf;
    std::size_t best_j = 0;
    double lo = path.node(end, 0), hi = lo, osc = 0.0;
    std::vector<double> win2(path.node(end), path.node(end) + m);
    for (std::size_t jj = end; jj-- > 0;) {
        if (m == 1) {
            const double v = path.node(jj, 0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            osc = hi - lo;
        } else {
            const double* v = path.node(jj);
            for (std::size_t q = 0; q < win2.size(); q += m)
                osc = std::max(osc, dist(v, win2.data() + q, m));
            win2.insert(win2.end(), v, v + m);
        }
        if (dp[jj] == kInf) continue;
        const double cand = std::max(dp[jj], osc);
        if (cand < best) {
            best = cand;
            best_j = jj;
        }
    }
    res.value = best;
    res.final_from = best_j;
    if (trace) res.from = std::move(from);
    return res;
}

} // namespace

double wprime_value(const PathView& path, double window_end, double theta) {
    return wprime_dp(path, window_end, theta, false).value;
}

ModulusReport modulus_wprime(const PathView& path, double window_end, double theta) {
    const auto res = wprime_dp(path, window_end, theta, true);
    ModulusReport rep;
    rep.window_end = window_end;
    rep.theta = theta;
    rep.wprime_value = res.value;
    rep.w_value = modulus_w(path, window_end, theta);
    std::vector<std::size_t> nodes{path.grid().node_of(window_end)};
    std::size_t j = res.final_from;
    nodes.push_back(j);
    while (j != 0) {
        j = res.from[j];
        nodes.push_back(j);
    }
    std::reverse(nodes.begin(), nodes.end());
    rep.subdivision.reserve(nodes.size());
    for (std::size_t k : nodes) rep.subdivision.push_back(path.grid().time(k));
    return rep;
}

TightnessVerdict tightness_check(const std::vector<EnsembleView>& ensembles,
                                 double window_end, const TightnessOptions& opt) {
    if (ensembles.empty())
        throw std::invalid_argument("tightness_check: no ensembles");
    for (const auto& e : ensembles)
        if (e.n_paths == 0)
            throw std::invalid_argument("tightness_check: empty ensemble");
    if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0))
        throw std::invalid_argument("tightness_check: epsilon must lie in (0,1)");

    TightnessVerdict verdict;
    const std::size_t n_ens = ensembles.size();

    // condition 1: sup-norm concentration. Per-path sup norms are computed
    // once, then the doubling K schedule is scanned.
    std::vector<std::vector<double>> supnorm(n_ens);
    for (std::size_t e = 0; e < n_ens; ++e) {
        const auto& ens = ensembles[e];
        const std::size_t end = ens.grid->index_at(std::min(window_end, ens.grid->horizon()));
        supnorm[e].resize(ens.n_paths);
        parallel_chunks(ens.n_paths, 256, opt.workers, [&](std::size_t, std::size_t b, std::size_t eidx) {
            for (std::size_t i = b; i < eidx; ++i) {
                const PathView p = ens.path(i);
                double s = 0.0;
                for (std::size_t k = 0; k <= end; ++k) {
                    double nrm = 0.0;
                    for (int d = 0; d < ens.dim; ++d) nrm += p.node(k, d) * p.node(k, d);
                    s = std::max(s, nrm);
                }
                supnorm[e][i] = std::sqrt(s);
            }
        });
    }
    double found_K = -1.0;
    double worst_freq = 1.0, worst_se = 0.0;
    for (double K = opt.k_start; K <= opt.k_cap; K *= 2.0) {
        worst_freq = 0.0;
        worst_se = 0.0;
        for (std::size_t e = 0; e < n_ens; ++e) {
            std::size_t cnt = 0;
            for (double s : supnorm[e])
                if (s > K) ++cnt;
            const double n = static_cast<double>(supnorm[e].size());
            const double f = static_cast<double>(cnt) / n;
            if (f >= worst_freq) {
                worst_freq = f;
                worst_se = std::sqrt(std::max(0.0, f * (1.0 - f) / n));
            }
        }
        if (worst_freq <= opt.epsilon) {
            found_K = K;
            break;
        }
    }
    verdict.K = found_K;
    verdict.conditions.push_back(TightnessCondition{
        "sup_norm", found_K > 0 ? found_K : opt.k_cap, 0.0, worst_freq, worst_se,
        found_K > 0});

    // condition 2: W'_N concentration per alpha, theta halving schedule
    double mesh = 0.0;
    for (const auto& e : ensembles) mesh = std::max(mesh, e.grid->mesh());
    std::vector<bool> resolved(opt.alphas.size(), false);
    std::vector<double> last_freq(opt.alphas.size(), 0.0);
    std::vector<double> last_se(opt.alphas.size(), 0.0);
    std::vector<double> last_theta(opt.alphas.size(), 0.0);
    double theta = std::min(opt.theta_start, window_end);
    bool any_left = true;
    while (any_left && theta >= mesh * (1.0 - 1e-9)) {
        // W' per path at this theta, reused for every unresolved alpha
        for (std::size_t a = 0; a < opt.alphas.size(); ++a)
            if (!resolved[a]) {
                last_freq[a] = 1.0;
                last_se[a] = 0.0;
                last_theta[a] = theta;
            }
        for (std::size_t e = 0; e < n_ens; ++e) {
            const auto& ens = ensembles[e];
            std::vector<double> wp(ens.n_paths);
            parallel_chunks(ens.n_paths, 64, opt.workers, [&](std::size_t, std::size_t b, std::size_t eidx) {
                for (std::size_t i = b; i < eidx; ++i)
                    wp[i] = wprime_value(ens.path(i), window_end, theta);
            });
            const double n = static_cast<double>(ens.n_paths);
            for (std::size_t a = 0; a < opt.alphas.size(); ++a) {
                if (resolved[a]) continue;
                std::size_t cnt = 0;
                for (double v : wp)
                    if (v < opt.alphas[a]) ++cnt;
                const double f = static_cast<double>(cnt) / n;
                if (f <= last_freq[a]) {
                    last_freq[a] = f;
                    last_se[a] = std::sqrt(std::max(0.0, f * (1.0 - f) / n));
                }
            }
        }
        any_left = false;
        for (std::size_t a = 0; a < opt.alphas.size(); ++a) {
            if (resolved[a]) continue;
            if (last_freq[a] >= 1.0 - opt.epsilon) {
                resolved[a] = true;
                verdict.theta_per_alpha[opt.alphas[a]] = theta;
            } else {
                any_left = true;
            }
        }
        theta /= 2.0;
    }
    bool all_resolved = true;
    for (std::size_t a = 0; a < opt.alphas.size(); ++a) {
        verdict.conditions.push_back(TightnessCondition{
            "wprime", last_theta[a], opt.alphas[a], last_freq[a], last_se[a],
            resolved[a]});
        all_resolved = all_resolved && resolved[a];
    }
    verdict.pass = (found_K > 0) && all_resolved;
    return verdict;
}

double skorokhod_distance(const CadlagPath& p, const CadlagPath& q) {
    if (p.dim() != q.dim())
        throw std::invalid_argument("skorokhod_distance: dimension mismatch");
    if (std::abs(p.grid().horizon() - q.grid().horizon()) >
        kTimeTol * std::max(1.0, p.grid().horizon()))
        throw std::invalid_argument("skorokhod_distance: mismatched horizons");
    const std::size_t np = p.nodes(), nq = q.nodes();
    const int m = p.dim();
    auto cost = [&](std::size_t i, std::size_t j) {
        return std::max(std::abs(p.grid().time(i) - q.grid().time(j)),
                        dist(p.node(i), q.node(j), m));
    };
    std::vector<double> prev(nq), cur(nq);
    prev[0] = cost(0, 0);
    for (std::size_t j = 1; j < nq; ++j) prev[j] = std::max(prev[j - 1], cost(0, j));
    for (std::size_t i = 1; i < np; ++i) {
        cur[0] = std::max(prev[0], cost(i, 0));
        for (std::size_t j = 1; j < nq; ++j) {
            const double reach = std::min({prev[j], cur[j - 1], prev[j - 1]});
            cur[j] = std::max(reach, cost(i, j));
        }
        std::swap(prev, cur);
    }
    return prev[nq - 1];
}

} // namespace pathdep
