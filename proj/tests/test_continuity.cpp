#include <doctest.h>

#include <cmath>

#include "pathdep/continuity.hpp"
#include "pathdep/stats.hpp"

using namespace pathdep;

namespace {

Model make_model(double horizon, double mesh, CoefficientConfig cfg,
                 std::vector<std::pair<std::vector<double>, double>> atoms = {}) {
    Model m;
    m.grid = TimeGrid::uniform(horizon, mesh);
    m.jumps = JumpMeasure::none(cfg.dim);
    for (auto& [y, mass] : atoms) m.jumps.add_atom(y, mass);
    m.coeffs = make_coefficients(cfg, m.jumps);
    return m;
}

} // namespace

TEST_SUITE("continuity") {

TEST_CASE("identical approximants produce exactly zero differences") {
    CoefficientConfig cfg;
    cfg.beta0 = {0.2};
    cfg.sigma0 = {0.5};
    const Model model = make_model(1.0, 0.0625, cfg, {{{1.0}, 0.4}});
    ConvergenceScenario sc;
    sc.target = InitialCondition::from_value(0.0, {0.3}, model.grid);
    for (int n = 0; n < 3; ++n)
        sc.approximants.push_back(InitialCondition::from_value(0.0, {0.3}, model.grid));
    sc.test_bank = default_test_bank(1.0);

    const auto rep = run_convergence_diagnostic(model, sc, 500, 7, 0.05, 1);
    for (const auto& row : rep.rows) {
        CHECK(row.diff == 0.0);
        CHECK(row.paired_se == 0.0);
        CHECK(row.start_distance == 0.0);
    }
    CHECK(rep.trend_score == 1.0);
    CHECK(rep.pass);
}

TEST_CASE("constant coefficients: differences match the gaussian closed form") {
    const double beta = 0.25, sigma = 0.5, T = 1.0, x0 = 0.2;
    CoefficientConfig cfg;
    cfg.beta0 = {beta};
    cfg.sigma0 = {sigma};
    const Model model = make_model(T, 1.0 / 64, cfg);

    ConvergenceScenario sc;
    sc.target = InitialCondition::from_value(0.0, {x0}, model.grid);
    for (int n = 1; n <= 3; ++n)
        sc.approximants.push_back(
            InitialCondition::from_value(0.0, {x0 + std::pow(2.0, -n)}, model.grid));
    PathRandomVariable g;
    g.name = "cos(X_T)";
    g.bound = 1.0;
    g.z = [T](const PathView& p) { return std::cos(p.at(T, 0)); };
    sc.test_bank = {g};

    const auto rep = run_convergence_diagnostic(model, sc, 4000, 11, 0.2, 1);
    REQUIRE(rep.rows.size() == 3);
    const double damp = std::exp(-sigma * sigma * T / 2.0);
    for (const auto& row : rep.rows) {
        const double eps = std::pow(2.0, -static_cast<double>(row.level) - 1.0);
        const double want =
            damp * (std::cos(x0 + eps + beta * T) - std::cos(x0 + beta * T));
        CHECK(std::abs(row.diff - want) < 3.0 * row.paired_se);
    }
    CHECK(rep.pass);
}

TEST_CASE("time-shifted starts track the closed-form modulus") {
    const double beta = 0.3, sigma = 0.4, T = 1.0, x0 = 0.0;
    CoefficientConfig cfg;
    cfg.beta0 = {beta};
    cfg.sigma0 = {sigma};
    const Model model = make_model(T, 1.0 / 64, cfg);

    ConvergenceScenario sc;
    sc.target = InitialCondition::from_value(0.0, {x0}, model.grid);
    for (int n = 1; n <= 3; ++n)
        sc.approximants.push_back(InitialCondition::from_value(
            std::pow(2.0, -n - 2), {x0}, model.grid));
    PathRandomVariable g;
    g.name = "cos(X_T)";
    g.bound = 1.0;
    g.z = [T](const PathView& p) { return std::cos(p.at(T, 0)); };
    sc.test_bank = {g};

    const auto rep = run_convergence_diagnostic(model, sc, 4000, 13, 0.2, 1);
    for (const auto& row : rep.rows) {
        const double sn = std::pow(2.0, -static_cast<double>(row.level) - 3.0);
        const double want =
            std::exp(-sigma * sigma * (T - sn) / 2.0) * std::cos(x0 + beta * (T - sn)) -
            std::exp(-sigma * sigma * T / 2.0) * std::cos(x0 + beta * T);
        CHECK(std::abs(row.diff - want) < 3.0 * row.paired_se + 1e-9);
    }
}

TEST_CASE("approximant ordering is enforced") {
    CoefficientConfig cfg;
    cfg.sigma0 = {0.3};
    const Model model = make_model(1.0, 0.125, cfg);
    ConvergenceScenario sc;
    sc.target = InitialCondition::from_value(0.0, {0.0}, model.grid);
    sc.approximants.push_back(InitialCondition::from_value(0.0, {0.1}, model.grid));
    sc.approximants.push_back(InitialCondition::from_value(0.0, {0.5}, model.grid));
    sc.test_bank = default_test_bank(1.0);
    CHECK_THROWS_AS(run_convergence_diagnostic(model, sc, 100, 1, 0.05, 1),
                    std::invalid_argument);
    sc.test_bank.clear();
    CHECK_THROWS_AS(run_convergence_diagnostic(model, sc, 100, 1, 0.05, 1),
                    std::invalid_argument);
}

TEST_CASE("tightness diagnostic: constant family is trivially tight") {
    CoefficientConfig cfg; // zero dynamics
    const Model model = make_model(1.0, 0.125, cfg);
    ConvergenceScenario sc;
    sc.target = InitialCondition::from_value(0.0, {0.4}, model.grid);
    for (int n = 1; n <= 3; ++n)
        sc.approximants.push_back(InitialCondition::from_value(
            0.0, {0.4 + std::pow(2.0, -n)}, model.grid));
    sc.test_bank = default_test_bank(1.0);

    TightnessOptions opt;
    const auto verdict = run_tightness_diagnostic(model, sc, 64, 1.0, opt, 3);
    CHECK(verdict.pass);
    CHECK(verdict.K == 1.0);
}

TEST_CASE("tightness diagnostic: bounded jump diffusion passes, unbounded drift fails") {
    CoefficientConfig cfg;
    cfg.preset = "running-max";
    cfg.kappa = 0.3;
    cfg.sigma0 = {0.3};
    const Model bounded = make_model(1.0, 1.0 / 64, cfg, {{{0.5}, 0.5}});
    ConvergenceScenario sc;
    sc.target = InitialCondition::from_value(0.0, {0.0}, bounded.grid);
    for (int n = 1; n <= 3; ++n)
        sc.approximants.push_back(InitialCondition::from_value(
            0.0, {std::pow(2.0, -n)}, bounded.grid));
    sc.test_bank = default_test_bank(1.0);

    TightnessOptions opt;
    opt.workers = 1;
    const auto good = run_tightness_diagnostic(bounded, sc, 2000, 1.0, opt, 5);
    CHECK(good.pass);
    CHECK(good.K > 0.0);

    CoefficientConfig bad;
    bad.preset = "linear";
    bad.kappa = 9.0;
    bad.beta0 = {1.0};
    bad.sigma0 = {0.2};
    const Model violator = make_model(1.0, 1.0 / 64, bad);
    CHECK_FALSE(violator.coeffs.declared_bounded);
    ConvergenceScenario sc2 = sc;
    sc2.target = InitialCondition::from_value(0.0, {1.0}, violator.grid);
    sc2.approximants.clear();
    for (int n = 1; n <= 3; ++n)
        sc2.approximants.push_back(InitialCondition::from_value(
            0.0, {1.0 + std::pow(2.0, -n)}, violator.grid));
    TightnessOptions opt2;
    opt2.k_cap = 256.0; // exhaust the doubling schedule
    const auto verdict = run_tightness_diagnostic(violator, sc2, 400, 1.0, opt2, 5);
    CHECK_FALSE(verdict.pass);
    CHECK(verdict.K == -1.0);
    CHECK(verdict.conditions.front().condition == "sup_norm");
    CHECK_FALSE(verdict.conditions.front().pass);
}

} // TEST_SUITE
