#include <doctest.h>

#include <cmath>

#include "pathdep/generator.hpp"
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

TEST_SUITE("generator") {

TEST_CASE("trig family basics") {
    CHECK_THROWS_AS(trig_family({}), std::invalid_argument);
    const auto fam = trig_family({{0.0}, {1.0}, {2.0}});
    CHECK(fam.size() == 6);

    // theta = 0: cos == 1, gradient and hessian vanish
    const double x = 0.37;
    CHECK(fam[0].f(&x) == 1.0);
    double g = 1.0, h = 1.0;
    fam[0].grad(&x, &g);
    fam[0].hess(&x, &h);
    CHECK(g == 0.0);
    CHECK(h == 0.0);

    // grad cos(theta x) = -theta sin(theta x)
    fam[2].grad(&x, &g);
    CHECK(g == doctest::Approx(-std::sin(x)));

    // finite differences agree with the exact derivatives
    for (const auto& f : fam) CHECK(test_function_fd_error(f, &x, 1e-5) <= 1e-5);
}

TEST_CASE("generator values against hand calculations") {
    const auto fam = trig_family({{1.0}, {2.0}});
    const TestFunction& cos1 = fam[0];
    const TestFunction& sin1 = fam[1];
    const TestFunction& cos2 = fam[2];

    // diffusion only: A cos(theta x) at x=0 is -theta^2/2
    CoefficientConfig cfg;
    cfg.preset = "constant";
    cfg.sigma0 = {1.0};
    const Model diff = make_model(1.0, 0.25, cfg);
    const auto zero = CadlagPath::constant(diff.grid, {0.0});
    CHECK(apply_generator(diff, cos1, 0.5, zero.view()) == doctest::Approx(-0.5));
    CHECK(apply_generator(diff, cos2, 0.5, zero.view()) == doctest::Approx(-2.0));

    // everything zero: A f = 0
    CoefficientConfig zc;
    const Model none = make_model(1.0, 0.25, zc);
    CHECK(apply_generator(none, cos1, 0.0, zero.view()) == 0.0);

    // single atom, w(y) = y, sigma = beta = 0: A sin at 0 = lambda (sin 1 - 1)
    const double lambda = 0.8;
    CoefficientConfig jc;
    const Model jump = make_model(1.0, 0.25, jc, {{{1.0}, lambda}});
    CHECK(apply_generator(jump, sin1, 0.0, zero.view()) ==
          doctest::Approx(lambda * (std::sin(1.0) - 1.0)));

    // sabotage hook drops the gradient part of the jump term
    const double sabotaged = apply_generator(jump, sin1, 0.0, zero.view(), true);
    CHECK(sabotaged == doctest::Approx(lambda * std::sin(1.0)));
}

TEST_CASE("generator is linear in the test function") {
    CoefficientConfig cfg;
    cfg.preset = "constant";
    cfg.beta0 = {0.4};
    cfg.sigma0 = {0.9};
    const Model model = make_model(1.0, 0.25, cfg, {{{0.5}, 0.6}});
    const auto fam = trig_family({{1.0}});
    const TestFunction& f = fam[0];
    const TestFunction& g = fam[1];
    const double a = 2.0, b = -0.75;

    TestFunction combo;
    combo.name = "combo";
    combo.dim = 1;
    combo.bound = 3.0;
    combo.f = [&, a, b](const double* x) { return a * f.f(x) + b * g.f(x); };
    combo.grad = [&, a, b](const double* x, double* out) {
        double gf, gg;
        f.grad(x, &gf);
        g.grad(x, &gg);
        out[0] = a * gf + b * gg;
    };
    combo.hess = [&, a, b](const double* x, double* out) {
        double hf, hg;
        f.hess(x, &hf);
        g.hess(x, &hg);
        out[0] = a * hf + b * hg;
    };

    const auto path = CadlagPath::constant(model.grid, {0.3});
    const double lhs = apply_generator(model, combo, 0.5, path.view());
    const double rhs = a * apply_generator(model, f, 0.5, path.view()) +
                       b * apply_generator(model, g, 0.5, path.view());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("event banks are deterministic and respect the conditioning time") {
    const auto grid = TimeGrid::uniform(1.0, 0.125);
    const auto a = make_event_bank(*grid, 1, 0.5, 8, 42);
    const auto b = make_event_bank(*grid, 1, 0.5, 8, 42);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].latest_time() <= 0.5 + 1e-12);
    }
    const auto c = make_event_bank(*grid, 1, 0.5, 8, 43);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].label != c[i].label;
    CHECK(differs);

    // indicator evaluation
    EventSpec ev;
    ev.kind = "ball";
    ev.times = {0.25};
    ev.centers = {{0.0}};
    ev.radii = {0.5};
    const auto inside = CadlagPath::constant(grid, {0.1});
    const auto outside = CadlagPath::constant(grid, {2.0});
    CHECK(ev.contains(inside.view()));
    CHECK_FALSE(ev.contains(outside.view()));
    CHECK(EventSpec::whole_space().contains(outside.view()));
}

TEST_CASE("bonferroni adjustment widens the threshold") {
    CHECK(bonferroni_z(3.0, 1) == doctest::Approx(3.0));
    CHECK(bonferroni_z(3.0, 100) > 3.0);
    CHECK(bonferroni_z(3.0, 100) < 6.0);
}

TEST_CASE("martingale statistic vanishes identically at t = u") {
    CoefficientConfig cfg;
    cfg.preset = "constant";
    cfg.sigma0 = {0.5};
    const Model model = make_model(1.0, 0.0625, cfg);
    const auto init = InitialCondition::from_value(0.0, {0.0}, model.grid);
    const auto ens = simulate(model, init, 256, 3, 1);

    MartingaleProblemSpec spec;
    spec.functions = trig_family({{1.0}});
    spec.time_pairs = {{0.5, 0.5}};
    spec.events_per_t = 2;
    const auto rep = verify_martingale_problem(ens, model, spec, 1);
    for (const auto& cell : rep.cells) {
        CHECK(cell.estimate == 0.0);
        CHECK(cell.stderr_ == 0.0);
        CHECK(cell.pass);
    }
}

TEST_CASE("drifted diffusion solves the discrete martingale problem") {
    CoefficientConfig cfg;
    cfg.preset = "constant";
    cfg.beta0 = {0.3};
    cfg.sigma0 = {0.5};
    const Model model = make_model(1.0, 1.0 / 64, cfg);
    const auto init = InitialCondition::from_value(0.0, {0.0}, model.grid);
    const auto ens = simulate(model, init, 20000, 17, 1);

    MartingaleProblemSpec spec;
    spec.functions = trig_family({{1.0}, {-1.0}});
    spec.time_pairs = {{0.25, 0.75}, {0.25, 1.0}, {0.75, 1.0}};
    spec.events_per_t = 4;
    const auto rep = verify_martingale_problem(ens, model, spec, 1);
    CHECK(rep.n_cells == 4 * 3 * 5);
    CHECK(rep.pass);
    CHECK(rep.z_crit_adjusted > rep.z_crit_base);
}

TEST_CASE("dropping the jump compensation is detected") {
    CoefficientConfig cfg;
    cfg.preset = "constant";
    cfg.sigma0 = {0.2};
    const Model model = make_model(1.0, 1.0 / 64, cfg, {{{1.0}, 1.0}});
    const auto init = InitialCondition::from_value(0.0, {0.0}, model.grid);
    const auto ens = simulate(model, init, 30000, 29, 1);

    MartingaleProblemSpec spec;
    spec.functions = trig_family({{1.0}});
    spec.time_pairs = {{0.25, 0.75}};
    spec.events_per_t = 2;

    const auto honest = verify_martingale_problem(ens, model, spec, 1);
    CHECK(honest.pass);

    spec.sabotage_generator = true;
    const auto sabotaged = verify_martingale_problem(ens, model, spec, 1);
    CHECK_FALSE(sabotaged.pass);
    double max_z = 0.0;
    for (const auto& cell : sabotaged.cells) max_z = std::max(max_z, std::abs(cell.z));
    CHECK(max_z > sabotaged.z_crit_adjusted + 1.645); // bias detectable with margin
}

TEST_CASE("martingale verifier rejects misuse") {
    CoefficientConfig cfg;
    const Model model = make_model(1.0, 0.25, cfg);
    const auto init = InitialCondition::from_value(0.5, {0.0}, model.grid);
    const auto ens = simulate(model, init, 8, 1, 1);
    MartingaleProblemSpec spec;
    spec.functions = trig_family({{1.0}});
    spec.time_pairs = {{0.25, 0.75}}; // t before the ensemble start
    CHECK_THROWS_AS(verify_martingale_problem(ens, model, spec, 1), std::invalid_argument);
    spec.time_pairs = {{0.75, 0.5}};
    CHECK_THROWS_AS(verify_martingale_problem(ens, model, spec, 1), std::invalid_argument);
}

TEST_CASE("maf quadrature: exact cases and double-entry cross-check") {
    CoefficientConfig cfg;
    cfg.preset = "constant";
    cfg.beta0 = {0.2};
    cfg.sigma0 = {0.4};
    const Model model = make_model(1.0, 1.0 / 64, cfg, {{{1.0}, 0.5}});
    const auto init = InitialCondition::from_value(0.0, {0.0}, model.grid);
    const auto ens = simulate(model, init, 4, 51, 1);
    const auto pv = ens.path(2);

    // Phi_t = t with A Phi = 1 telescopes to zero on the dyadic grid
    ProcessFunctional clockphi;
    clockphi.name = "t";
    clockphi.bound = 2.0;
    clockphi.phi = [](double t, const PathView&) { return t; };
    clockphi.a_phi = [](double, const PathView&) { return 1.0; };
    CHECK(maf_from_generator(clockphi, 0.25, 0.75, pv) == 0.0);
    CHECK(maf_from_generator(clockphi, 0.5, 0.5, pv) == 0.0);
    CHECK_THROWS_AS(maf_from_generator(clockphi, 0.75, 0.25, pv), std::invalid_argument);

    // double-entry oracle: independent quadrature of the same formula
    const auto fam = trig_family({{1.0}});
    const ProcessFunctional phi = cylinder_functional(model, fam[0]);
    const double got = maf_from_generator(phi, 0.25, 0.75, pv);
    double expected = fam[0].f(pv.at(0.75)) - fam[0].f(pv.at(0.25));
    const TimeGrid& grid = *model.grid;
    for (std::size_t k = grid.node_of(0.25); k < grid.node_of(0.75); ++k)
        expected -= apply_generator(model, fam[0], grid.time(k), pv) *
                    (grid.time(k + 1) - grid.time(k));
    CHECK(got == doctest::Approx(expected).epsilon(1e-14));

    // additivity across adjacent windows
    const double left = maf_from_generator(phi, 0.25, 0.5, pv);
    const double right = maf_from_generator(phi, 0.5, 0.75, pv);
    CHECK(left + right == doctest::Approx(got).epsilon(1e-12));

    // non-identity clock: Phi = V with A Phi = 1 still cancels
    ProcessFunctional vphi;
    vphi.name = "V";
    vphi.bound = 2.0;
    vphi.clock = [](double t) { return t * t; };
    vphi.phi = [](double t, const PathView&) { return t * t; };
    vphi.a_phi = [](double, const PathView&) { return 1.0; };
    CHECK(std::abs(maf_from_generator(vphi, 0.25, 0.75, pv)) <= 1e-12);
}

TEST_CASE("weak generator identity") {
    CoefficientConfig cfg;
    cfg.preset = "constant";
    cfg.beta0 = {0.25};
    cfg.sigma0 = {0.5};
    const Model model = make_model(1.0, 1.0 / 64, cfg);
    const auto init = InitialCondition::from_value(0.0, {0.2}, model.grid);

    // deterministic element: Phi_t = t, A Phi = 1, V = id; exact cancellation
    ProcessFunctional clockphi;
    clockphi.name = "t";
    clockphi.bound = 2.0;
    clockphi.phi = [](double t, const PathView&) { return t; };
    clockphi.a_phi = [](double, const PathView&) { return 1.0; };
    const auto detrep = verify_weak_generator(model, clockphi, init, 0.75, 64, 3, 3.0, 1);
    CHECK(detrep.discrepancy == 0.0);
    CHECK(detrep.stderr_ == 0.0);
    CHECK(detrep.pass);

    // zero functional
    ProcessFunctional zero;
    zero.name = "0";
    zero.bound = 1.0;
    zero.phi = [](double, const PathView&) { return 0.0; };
    zero.a_phi = [](double, const PathView&) { return 0.0; };
    const auto zrep = verify_weak_generator(model, zero, init, 1.0, 64, 4, 3.0, 1);
    CHECK(zrep.lhs == 0.0);
    CHECK(zrep.rhs == 0.0);
    CHECK(zrep.pass);

    // cylinder element cos(X): statistical agreement
    const auto fam = trig_family({{1.0}});
    const ProcessFunctional phi = cylinder_functional(model, fam[0]);
    const auto rep = verify_weak_generator(model, phi, init, 1.0, 20000, 9, 3.0, 1);
    CHECK(rep.pass);
    CHECK(rep.stderr_ > 0.0);
    CHECK(std::abs(rep.lhs - rep.rhs) == doctest::Approx(std::abs(rep.discrepancy)).epsilon(1e-9));

    CHECK_THROWS_AS(verify_weak_generator(model, phi, init, -0.5, 16, 1, 3.0, 1),
                    std::invalid_argument);
}

} // TEST_SUITE
