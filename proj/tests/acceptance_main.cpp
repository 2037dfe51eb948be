// Acceptance suite: one statistical/structural criterion per check, with a
// pass/fail line each. Every tolerance is pinned here, not calibrated later.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "pathdep/continuity.hpp"
#include "pathdep/maf.hpp"
#include "pathdep/parallel.hpp"
#include "pathdep/projectors.hpp"
#include "pathdep/stats.hpp"
#include "pathdep/suites.hpp"

using namespace pathdep;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d %-28s %s\n", pass ? "PASS" : "FAIL", idx,
                name.c_str(), detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Model make_model(double horizon, double mesh, CoefficientConfig cfg,
                 std::vector<std::pair<std::vector<double>, double>> atoms = {}) {
    Model m;
    m.grid = TimeGrid::uniform(horizon, mesh);
    m.jumps = JumpMeasure::none(cfg.dim);
    for (auto& [y, mass] : atoms) m.jumps.add_atom(y, mass);
    m.coeffs = make_coefficients(cfg, m.jumps);
    return m;
}

// reference model of the moment oracle: dX = 0.1 dt + 0.2 dW + d(jumps), one
// atom at 1 with mass 0.5, w(y) = y
Model oracle_model(double mesh) {
    CoefficientConfig cfg;
    cfg.preset = "constant";
    cfg.beta0 = {0.1};
    cfg.sigma0 = {0.2};
    return make_model(1.0, mesh, cfg, {{{1.0}, 0.5}});
}

char buf[512];

// --- 1: initial-path pinning ------------------------------------------------
void criterion_pinning() {
    CoefficientConfig cfg;
    cfg.preset = "markov";
    cfg.beta0 = {0.2};
    cfg.kappa = 0.4;
    cfg.sigma0 = {0.3};
    const Model model = make_model(1.0, 1.0 / 64, cfg, {{{-0.5}, 0.6}});
    std::vector<double> hist(model.grid->size());
    for (std::size_t k = 0; k < hist.size(); ++k)
        hist[k] = 0.4 * std::sin(5.0 * model.grid->time(k));
    const auto init = InitialCondition::make(0.5, CadlagPath(model.grid, 1, hist));

    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = verify_pinning(model, init, 10000, 101, 1);
    const double secs = seconds_since(t0);
    std::snprintf(buf, sizeof(buf), "mismatched=%zu/%zu, %.2fs (budget 1s)",
                  rep.mismatched, rep.n_paths, secs);
    report(1, "initial-path pinning", rep.pass && secs < 1.0, buf);
}

// --- 2: moment oracle ---------------------------------------------------------
void criterion_moments() {
    const Model model = oracle_model(1.0 / 1024);
    const auto init = InitialCondition::from_value(0.0, {0.0}, model.grid);
    const std::size_t n = 100000;
    const std::size_t last = model.grid->size() - 1;

    const auto t0 = std::chrono::steady_clock::now();
    struct Acc {
        MeanVar mv;
        double sum4 = 0.0;
    };
    std::vector<Acc> parts((n + kSimBlock - 1) / kSimBlock);
    simulate_visit(model, init, n, 2024, /*workers=*/1, 0,
                   [&](std::size_t i, const double* values) {
                       parts[i / kSimBlock].mv.add(values[last]);
                   });
    MeanVar mv;
    for (const auto& p : parts) mv.merge(p.mv);
    // second pass for the fourth central moment (cheap re-simulation avoided:
    // accumulate against the known mean analytically is biased, so re-run)
    std::vector<double> sum4((n + kSimBlock - 1) / kSimBlock, 0.0);
    simulate_visit(model, init, n, 2024, 1, 0,
                   [&](std::size_t i, const double* values) {
                       const double d = values[last] - mv.mean;
                       sum4[i / kSimBlock] += d * d * d * d;
                   });
    double m4 = 0.0;
    for (double v : sum4) m4 += v;
    m4 /= static_cast<double>(n);
    const double secs = seconds_since(t0);

    const double se_mean = mv.stderr_mean();
    const double var = mv.variance();
    const double se_var = std::sqrt((m4 - var * var) / static_cast<double>(n));
    const bool ok_mean = std::abs(mv.mean - 0.1) < 3.0 * se_mean;
    const bool ok_var = std::abs(var - 0.54) < 3.0 * se_var;
    std::snprintf(buf, sizeof(buf),
                  "mean=%.5f (want 0.1, 3se=%.5f), var=%.5f (want 0.54, 3se=%.5f), %.1fs (budget 30s)",
                  mv.mean, 3.0 * se_mean, var, 3.0 * se_var, secs);
    report(2, "moment oracle", ok_mean && ok_var && secs < 30.0, buf);
}

// --- 3: martingale-problem suite ----------------------------------------------
void criterion_mp() {
    const Model model = oracle_model(1.0 / 256);
    const auto init = InitialCondition::from_value(0.0, {0.0}, model.grid);
    const auto ens = simulate(model, init, 100000, 31415, default_workers());

    MartingaleProblemSpec spec;
    spec.functions = trig_family({{1.0}, {-1.0}, {2.0}, {-2.0}});
    spec.time_pairs.clear();
    const std::vector<double> ts{0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = i + 1; j < ts.size(); ++j)
            spec.time_pairs.emplace_back(ts[i], ts[j]);
    spec.events_per_t = 8;
    spec.event_seed = 7;
    spec.z_crit = 3.0;

    const auto rep = verify_martingale_problem(ens, model, spec, default_workers());
    const bool ok_cells = rep.pass_fraction() >= 0.99;

    // sabotage hook: compensator dropped; detection must carry a one-sided
    // 95% margin over the adjusted threshold
    MartingaleProblemSpec bad = spec;
    bad.sabotage_generator = true;
    const auto sab = verify_martingale_problem(ens, model, bad, default_workers());
    double max_z = 0.0;
    for (const auto& cell : sab.cells) max_z = std::max(max_z, std::abs(cell.z));
    const bool ok_power = !sab.pass && max_z >= sab.z_crit_adjusted + 1.645;

    std::snprintf(buf, sizeof(buf),
                  "cells=%zu pass_fraction=%.4f (need 0.99), z*=%.2f; sabotage max|z|=%.1f detected=%d",
                  rep.n_cells, rep.pass_fraction(), rep.z_crit_adjusted, max_z,
                  !sab.pass);
    report(3, "martingale-problem suite", ok_cells && ok_power, buf);
}

// --- 4: weak-generator identity -------------------------------------------------
void criterion_weak_generator() {
    const Model model = oracle_model(1.0 / 256);
    const auto init = InitialCondition::from_value(0.0, {0.0}, model.grid);
    const auto fam = trig_family({{1.0}});
    const ProcessFunctional phi = cylinder_functional(model, fam[0]);
    bool ok = true;
    std::string detail;
    for (const double t : {0.5, 1.0}) {
        const auto rep = verify_weak_generator(model, phi, init, t, 100000, 999,
                                               3.0, default_workers());
        ok = ok && rep.pass;
        std::snprintf(buf, sizeof(buf), "t=%.1f: |lhs-rhs|=%.2e (3se=%.2e) ", t,
                      std::abs(rep.discrepancy), 3.0 * rep.stderr_);
        detail += buf;
    }
    report(4, "weak-generator identity", ok, detail);
}

// --- 5: tower / flow property ---------------------------------------------------
void criterion_flow() {
    CoefficientConfig cfg;
    cfg.preset = "running-max";
    cfg.beta0 = {0.05};
    cfg.kappa = 0.4;
    cfg.clip = 1.5;
    cfg.sigma0 = {0.3};
    const Model model = make_model(1.0, 1.0 / 64, cfg, {{{0.5}, 0.5}});
    const auto init = InitialCondition::from_value(0.0, {0.0}, model.grid);

    EventSpec f1;
    f1.kind = "above";
    f1.label = "X_T > 0.2";
    f1.times = {1.0};
    f1.level = 0.2;
    EventSpec f2;
    f2.kind = "ball";
    f2.label = "X_T in B(0, 0.5)";
    f2.times = {1.0};
    f2.centers = {{0.0}};
    f2.radii = {0.5};
    EventSpec g1 = EventSpec::whole_space();
    EventSpec g2;
    g2.kind = "above";
    g2.label = "X_{0.25} > 0";
    g2.times = {0.25};
    g2.level = 0.0;

    const auto rep = verify_flow_property(model, init, 0.5, {f1, f2}, {g1, g2}, 2000,
                                          2000, 271828, 3.0, default_workers());
    bool ok = rep.rows.size() == 4 && rep.pass;
    std::string detail;
    for (const auto& row : rep.rows) {
        std::snprintf(buf, sizeof(buf), "|d|=%.4f(3se=%.4f) ", std::abs(row.discrepancy),
                      3.0 * row.combined_se);
        detail += buf;
    }
    report(5, "tower/flow property", ok, detail);
}

// --- 6: quadratic-variation convergence ------------------------------------------
void criterion_qv() {
    CoefficientConfig cfg;
    cfg.preset = "constant";
    cfg.sigma0 = {1.0};
    const Model model = make_model(1.0, 1.0 / 512, cfg);
    const auto init = InitialCondition::from_value(0.0, {0.0}, model.grid);
    const std::size_t n = 10000;
    const auto ens = simulate(model, init, n, 606, default_workers());

    const auto fam = trig_family({{1.0}});
    const auto m = maf_functional(cylinder_functional(model, fam[0]));
    const auto scheme = PartitionScheme::dyadic(*model.grid, 0.0, 1.0, 16);

    struct Acc {
        MeanVar qv, comp;
    };
    auto acc = chunked_reduce(
        n, kSimBlock, default_workers(), Acc{},
        [&](std::size_t, std::size_t b, std::size_t e, Acc& a) {
            for (std::size_t i = b; i < e; ++i) {
                const auto pv = ens.path(i);
                a.qv.add(quadratic_variation(m, scheme, pv).back());
                a.comp.add(angular_bracket_cylinder(model, fam[0], 0.0, 1.0, pv));
            }
        },
        [](Acc& t, const Acc& p) {
            t.qv.merge(p.qv);
            t.comp.merge(p.comp);
        });
    const double se = std::sqrt(std::pow(acc.qv.stderr_mean(), 2) +
                                std::pow(acc.comp.stderr_mean(), 2));
    const bool ok_match = std::abs(acc.qv.mean - acc.comp.mean) < 3.0 * se;

    // deterministic bounded-variation input: linear decay, ratio ~ 1/2
    AdditiveFunctional lin{"u-t",
                           [](double t, double u, const PathView&) { return u - t; }};
    const auto levels = quadratic_variation(lin, scheme, ens.path(0));
    bool ok_ratio = true;
    for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
        const double r = levels[l + 1] / levels[l];
        ok_ratio = ok_ratio && r >= 0.4 && r <= 0.6;
    }
    std::snprintf(buf, sizeof(buf),
                  "finest=%.5f vs compensator=%.5f (3se=%.5f); BV ratios in [0.4,0.6]=%d",
                  acc.qv.mean, acc.comp.mean, 3.0 * se, ok_ratio);
    report(6, "qv convergence", ok_match && ok_ratio, buf);
}

// --- 7: density recovery -----------------------------------------------------------
void criterion_density() {
    const auto grid = TimeGrid::uniform(1.0, 1.0 / 512);
    const auto path = CadlagPath::constant(grid, {0.0});
    const std::size_t window = 8; // delta = 8/512 = 2^-6
    const double delta = 1.0 / 64;

    AdditiveFunctional quad{"int r dr", [](double t, double u, const PathView&) {
                                return 0.5 * (u * u - t * t);
                            }};
    const auto dens = rn_density(quad, [](double t) { return t; }, path.view(), window);
    double max_err = 0.0;
    for (std::size_t k = 0; k < dens.times.size(); ++k)
        max_err = std::max(max_err, std::abs(dens.h[k] - dens.times[k]));
    const bool ok_linear = max_err <= delta;

    AdditiveFunctional lin{"u-t",
                           [](double t, double u, const PathView&) { return u - t; }};
    bool ok_const = true;
    for (double h : rn_density(lin, [](double t) { return t; }, path.view(), window).h)
        ok_const = ok_const && (h == 1.0);

    std::snprintf(buf, sizeof(buf), "max|h-t|=%.6f (budget %.6f); constant case exact=%d",
                  max_err, delta, ok_const);
    report(7, "rn density recovery", ok_linear && ok_const, buf);
}

// --- 8: tightness diagnostic ----------------------------------------------------------
void criterion_tightness() {
    const auto t0 = std::chrono::steady_clock::now();
    CoefficientConfig cfg;
    cfg.preset = "running-max";
    cfg.kappa = 0.3;
    cfg.clip = 1.0;
    cfg.sigma0 = {0.3};
    const Model model = make_model(1.0, 1.0 / 128, cfg, {{{0.5}, 0.5}});

    ConvergenceScenario sc;
    sc.target = InitialCondition::from_value(0.0, {0.0}, model.grid);
    for (int n = 1; n <= 5; ++n)
        sc.approximants.push_back(
            InitialCondition::from_value(0.0, {std::pow(2.0, -n)}, model.grid));
    sc.test_bank = default_test_bank(1.0);

    TightnessOptions opt;
    opt.epsilon = 0.05;
    opt.alphas = {0.5};
    opt.workers = default_workers();
    const auto verdict = run_tightness_diagnostic(model, sc, 10000, 1.0, opt, 17);

    // unbounded-drift violator: the K search must exhaust its schedule
    CoefficientConfig bad;
    bad.preset = "linear";
    bad.kappa = 8.0;
    bad.beta0 = {1.0};
    bad.sigma0 = {0.2};
    const Model violator = make_model(1.0, 1.0 / 128, bad);
    ConvergenceScenario sc2;
    sc2.target = InitialCondition::from_value(0.0, {1.0}, violator.grid);
    for (int n = 1; n <= 3; ++n)
        sc2.approximants.push_back(
            InitialCondition::from_value(0.0, {1.0 + std::pow(2.0, -n)}, violator.grid));
    sc2.test_bank = default_test_bank(1.0);
    TightnessOptions opt2;
    opt2.k_cap = 1024.0;
    opt2.workers = default_workers();
    const auto vbad = run_tightness_diagnostic(violator, sc2, 2000, 1.0, opt2, 18);
    const bool violator_named = !vbad.pass && !vbad.conditions.empty() &&
                                vbad.conditions.front().condition == "sup_norm" &&
                                !vbad.conditions.front().pass;
    const double secs = seconds_since(t0);
    std::snprintf(buf, sizeof(buf),
                  "family pass=%d (K=%.0f, theta=%.4f); violator fails condition '%s'; %.1fs (budget 120s)",
                  verdict.pass, verdict.K,
                  verdict.theta_per_alpha.count(0.5) ? verdict.theta_per_alpha.at(0.5) : -1.0,
                  vbad.conditions.empty() ? "?" : vbad.conditions.front().condition.c_str(),
                  secs);
    report(8, "tightness diagnostic", verdict.pass && violator_named && secs < 120.0, buf);
}

// --- 9: continuity diagnostic ------------------------------------------------------
void criterion_continuity() {
    const double beta = 0.1, sigma = 0.2, lambda = 0.5, T = 1.0, x0 = 0.0;
    const Model model = oracle_model(1.0 / 64);

    ConvergenceScenario sc;
    sc.target = InitialCondition::from_value(0.0, {x0}, model.grid);
    for (int n = 1; n <= 6; ++n)
        sc.approximants.push_back(
            InitialCondition::from_value(0.0, {x0 + std::pow(2.0, -n)}, model.grid));
    PathRandomVariable g;
    g.name = "cos(X_T)";
    g.bound = 1.0;
    g.z = [T](const PathView& p) { return std::cos(p.at(T, 0)); };
    sc.test_bank = {g};

    const auto rep = run_convergence_diagnostic(model, sc, 10000, 1234, 0.2,
                                                default_workers());

    // closed form: E cos(X_T + eps) - E cos(X_T) under drift + diffusion +
    // compensated unit jumps with intensity lambda
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> phase =
        std::exp(i * beta * T) * std::exp(-sigma * sigma * T / 2.0) *
        std::exp(lambda * T * (std::exp(i * 1.0) - 1.0 - i * 1.0));
    bool ok = rep.rows.size() == 6;
    std::string detail;
    for (const auto& row : rep.rows) {
        const double eps = std::pow(2.0, -static_cast<double>(row.level) - 1.0);
        const double want =
            std::real((std::exp(i * (x0 + eps)) - std::exp(i * x0)) * phase);
        const bool cell_ok = std::abs(row.diff - want) < 3.0 * row.paired_se;
        ok = ok && cell_ok;
        std::snprintf(buf, sizeof(buf), "n=%zu:%.1e ", row.level + 1,
                      std::abs(row.diff - want));
        detail += buf;
    }
    detail += "(each within 3 paired se)";
    report(9, "continuity diagnostic", ok, detail);
}

// --- 10: determinism across worker counts -------------------------------------------
void criterion_determinism() {
    nlohmann::json cfg_json{
        {"schema_version", 1},
        {"model",
         {{"state_dim", 1},
          {"horizon", 1.0},
          {"mesh", 1.0 / 64},
          {"coefficients",
           {{"preset", "running-max"}, {"kappa", 0.3}, {"sigma0", {0.3}}}},
          {"jump_atoms", nlohmann::json::array({{{"y", {1.0}}, {"mass", 0.5}}})}}},
        {"run", {{"start_time", 0.0}, {"n_paths", 4000}, {"seed", 5}}},
        {"verify",
         {{"suites", {"mp"}},
          {"times", {0.25, 0.5, 1.0}},
          {"event_bank_size", 4},
          {"theta_set", {{1.0}, {-1.0}}},
          {"qv_levels", 6}}},
        {"output", {{"directory", "unused"}}}};
    const auto cfg = parse_config(cfg_json);

    bool ok = true;
    std::string detail;
    for (const std::string suite : {"mp", "maf", "generator"}) {
        const std::string r1 = run_suite(cfg, suite, 1).report.dump();
        const std::string r4 = run_suite(cfg, suite, 4).report.dump();
        const std::string r8 = run_suite(cfg, suite, 8).report.dump();
        const bool same = (r1 == r4) && (r1 == r8);
        ok = ok && same;
        detail += suite + (same ? "=byte-identical " : "=DIFFERS ");
    }
    report(10, "worker-count determinism", ok, detail);
}

} // namespace

int main() {
    std::printf("acceptance suite: statistical verification toolkit\n");
    criterion_pinning();
    criterion_moments();
    criterion_mp();
    criterion_weak_generator();
    criterion_flow();
    criterion_qv();
    criterion_density();
    criterion_tightness();
    criterion_continuity();
    criterion_determinism();
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
