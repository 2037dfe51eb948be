#include "pathdep/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathdep/rng.hpp"
#include "pathdep/stats.hpp"

namespace pathdep {

double scenario_distance(const ConvergenceScenario& scenario, std::size_t level) {
    const auto& ap = scenario.approximants.at(level);
    return std::abs(ap.s - scenario.target.s) +
           skorokhod_distance(ap.eta, scenario.target.eta);
}

std::vector<PathRandomVariable> default_test_bank(double horizon) {
    std::vector<PathRandomVariable> bank;
    PathRandomVariable c;
    c.name = "cos(X_T)";
    c.bound = 1.0;
    c.z = [horizon](const PathView& p) { return std::cos(p.at(horizon, 0)); };
    bank.push_back(std::move(c));
    PathRandomVariable s;
    s.name = "sin(X_T)";
    s.bound = 1.0;
    s.z = [horizon](const PathView& p) { return std::sin(p.at(horizon, 0)); };
    bank.push_back(std::move(s));
    PathRandomVariable rm;
    rm.name = "clamp(runmax)";
    rm.bound = 2.0;
    rm.z = [](const PathView& p) {
        double mx = p.node(0, 0);
        for (std::size_t k = 1; k < p.grid().size(); ++k)
            mx = std::max(mx, p.node(k, 0));
        return std::max(-2.0, std::min(2.0, mx));
    };
    bank.push_back(std::move(rm));
    return bank;
}

ConvergenceReport run_convergence_diagnostic(const Model& model,
                                             const ConvergenceScenario& scenario,
                                             std::size_t n_paths, std::uint64_t seed,
                                             double tolerance, int workers) {
    if (scenario.test_bank.empty())
        throw std::invalid_argument("run_convergence_diagnostic: empty test bank");
    if (scenario.approximants.empty())
        throw std::invalid_argument("run_convergence_diagnostic: no approximants");
    for (std::size_t n = 1; n < scenario.approximants.size(); ++n)
        if (scenario_distance(scenario, n) > scenario_distance(scenario, n - 1) + 1e-12)
            throw std::invalid_argument(
                "run_convergence_diagnostic: approximant distances must be non-increasing");

    ConvergenceReport rep;
    rep.tolerance = tolerance;
    const std::size_t n_bank = scenario.test_bank.size();
    const std::size_t n_levels = scenario.approximants.size();

    for (std::size_t level = 0; level < n_levels; ++level) {
        const std::uint64_t level_seed = derive_seed(seed, seed_tag::scenario, level);
        const PathEnsemble approx =
            simulate(model, scenario.approximants[level], n_paths, level_seed, workers);
        const PathEnsemble target =
            simulate(model, scenario.target, n_paths, level_seed, workers);
        const double dist = scenario_distance(scenario, level);
        for (std::size_t gi = 0; gi < n_bank; ++gi) {
            const auto& g = scenario.test_bank[gi];
            MeanVar a, t, d;
            for (std::size_t i = 0; i < n_paths; ++i) {
                const double ga = g.z(approx.path(i));
                const double gt = g.z(target.path(i));
                if (std::abs(ga) > g.bound + 1e-9 || std::abs(gt) > g.bound + 1e-9)
                    throw std::domain_error("test functional '" + g.name +
                                            "' exceeded its declared bound");
                a.add(ga);
                t.add(gt);
                d.add(ga - gt);
            }
            ConvergenceRow row;
            row.level = level;
            row.g = g.name;
            row.start_distance = dist;
            row.approx = a.mean;
            row.approx_se = a.stderr_mean();
            row.target = t.mean;
            row.target_se = t.stderr_mean();
            row.diff = d.mean;
            row.paired_se = d.stderr_mean();
            row.z = z_score(row.diff, 0.0, row.paired_se);
            rep.rows.push_back(std::move(row));
        }
    }

    // trend: |diff| should not grow as the approximants close in
    std::size_t ok = 0, total = 0;
    for (std::size_t gi = 0; gi < n_bank; ++gi)
        for (std::size_t level = 1; level < n_levels; ++level) {
            const auto& prev = rep.rows[(level - 1) * n_bank + gi];
            const auto& cur = rep.rows[level * n_bank + gi];
            ++total;
            if (std::abs(cur.diff) <=
                std::abs(prev.diff) + 3.0 * (cur.paired_se + prev.paired_se))
                ++ok;
        }
    rep.trend_score = total == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(total);
    for (std::size_t gi = 0; gi < n_bank; ++gi) {
        const auto& last = rep.rows[(n_levels - 1) * n_bank + gi];
        if (std::abs(last.diff) > tolerance + 3.0 * last.paired_se) rep.pass = false;
    }
    return rep;
}

TightnessVerdict run_tightness_diagnostic(const Model& model,
                                          const ConvergenceScenario& scenario,
                                          std::size_t n_paths, double window_end,
                                          const TightnessOptions& options,
                                          std::uint64_t seed) {
    if (scenario.approximants.empty())
        throw std::invalid_argument("run_tightness_diagnostic: no approximants");
    std::vector<PathEnsemble> ensembles;
    ensembles.reserve(scenario.approximants.size());
    for (std::size_t level = 0; level < scenario.approximants.size(); ++level)
        ensembles.push_back(simulate(model, scenario.approximants[level], n_paths,
                                     derive_seed(seed, seed_tag::scenario, level),
                                     options.workers));
    std::vector<EnsembleView> views;
    views.reserve(ensembles.size());
    for (const auto& e : ensembles) views.push_back(e.view());
    return tightness_check(views, window_end, options);
}

} // namespace pathdep
