#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "pathdep/grid.hpp"
#include "pathdep/rng.hpp"

using namespace pathdep;

namespace {

// step path taking value lo before tau and hi from tau on
CadlagPath step_path(const GridPtr& grid, double tau, double lo, double hi) {
    std::vector<double> values(grid->size());
    for (std::size_t k = 0; k < grid->size(); ++k)
        values[k] = grid->time(k) < tau ? lo : hi;
    return CadlagPath(grid, 1, std::move(values));
}

} // namespace

TEST_SUITE("grid") {

TEST_CASE("uniform grid invariants") {
    const auto g = TimeGrid::uniform(2.0, 0.25);
    CHECK(g->size() == 9);
    CHECK(g->time(0) == 0.0);
    CHECK(g->horizon() == 2.0);
    CHECK(g->mesh() == doctest::Approx(0.25));
    CHECK(g->is_node(1.75));
    CHECK_FALSE(g->is_node(1.8));
    CHECK(g->index_at(0.3) == 1);  // floor rule
    CHECK(g->index_at(2.0) == 8);
    CHECK_THROWS_AS(g->index_at(-0.1), std::out_of_range);
    CHECK_THROWS_AS(g->index_at(2.1), std::out_of_range);
    CHECK_THROWS_AS(TimeGrid::uniform(1.0, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.1, 0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("evaluate is right-continuous with step convention") {
    const auto g = TimeGrid::uniform(2.0, 0.125);
    const auto c = CadlagPath::constant(g, {3.5});
    CHECK(c.evaluate(0.0, 0) == 3.5);
    CHECK(c.evaluate(1.3, 0) == 3.5);
    CHECK(c.evaluate(2.0, 0) == 3.5);

    const auto p = step_path(g, 1.0, 1.0, 2.0);
    CHECK(p.evaluate(1.0, 0) == 2.0);   // post-jump value at the jump time
    CHECK(p.evaluate(0.999, 0) == 1.0); // direct lookup just before
    CHECK(p.evaluate(2.0, 0) == 2.0);
    CHECK_THROWS_AS(p.evaluate(-0.01, 0), std::out_of_range);

    // right-continuity at every node: node value equals value on [t_k, t_{k+1})
    for (std::size_t k = 0; k + 1 < g->size(); ++k) {
        const double mid = 0.5 * (g->time(k) + g->time(k + 1));
        CHECK(p.evaluate(g->time(k), 0) == p.evaluate(mid, 0));
    }
}

TEST_CASE("stop matches the r&t oracle and is a projection") {
    const auto g = TimeGrid::uniform(2.0, 0.125);
    const auto p = step_path(g, 1.0, 1.0, 2.0);

    CHECK(p.stopped(g->horizon()) == p);
    const auto c = CadlagPath::constant(g, {1.25});
    CHECK(c.stopped(0.5) == c);

    const auto st = p.stopped(0.5);
    for (std::size_t k = 0; k < g->size(); ++k) {
        const double r = g->time(k);
        CHECK(st.node(k, 0) == p.evaluate(std::min(r, 0.5), 0));
    }

    // stop(stop(p,u),t) = stop(p, t&u) for grid-aligned t,u
    for (const double u : {0.25, 0.875, 1.5})
        for (const double t : {0.125, 1.0, 2.0})
            CHECK(p.stopped(u).stopped(t) == p.stopped(std::min(t, u)));
}

TEST_CASE("concat semantics") {
    const auto g = TimeGrid::uniform(1.0, 0.25);
    const auto eta = step_path(g, 0.5, 0.0, 1.0);
    const auto omega = step_path(g, 0.25, 5.0, 6.0);

    CHECK(concat(eta, 0.0, omega) == omega);
    CHECK(concat(eta, 0.5, eta) == eta);
    const auto glued = concat(eta, 0.5, omega);
    for (std::size_t k = 0; k < g->size(); ++k) {
        const double t = g->time(k);
        if (t < 0.5)
            CHECK(glued.node(k, 0) == eta.evaluate(t, 0));
        else
            CHECK(glued.node(k, 0) == omega.evaluate(t, 0));
    }
    // concat(stop(p,s), s, p) = p
    for (const double s : {0.0, 0.25, 0.75, 1.0})
        CHECK(concat(eta.stopped(s), s, eta) == eta);

    const auto g2 = TimeGrid::uniform(1.0, 0.5);
    const auto other = CadlagPath::constant(g2, {0.0});
    CHECK_THROWS_AS(concat(eta, 0.5, other), std::invalid_argument);
}

TEST_CASE("initial conditions are canonicalized to constant-after-s") {
    const auto g = TimeGrid::uniform(1.0, 0.25);
    const auto p = step_path(g, 0.75, 1.0, 9.0);
    const auto init = InitialCondition::make(0.5, p);
    CHECK(init.s == 0.5);
    for (std::size_t k = 0; k < g->size(); ++k)
        CHECK(init.eta.node(k, 0) == p.evaluate(std::min(g->time(k), 0.5), 0));
}

TEST_CASE("path csv round trip") {
    const auto g = TimeGrid::uniform(1.0, 0.125);
    RandomStream rs(99, 0);
    std::vector<double> values(g->size() * 2);
    for (auto& v : values) v = rs.normal();
    const CadlagPath p(g, 2, values);

    const auto tmp = std::filesystem::temp_directory_path() / "pathdep_test_path.csv";
    write_path_csv(p, tmp.string());
    const auto q = read_path_csv(tmp.string());
    CHECK(q.dim() == 2);
    CHECK(q == p);
    std::filesystem::remove(tmp);
}

} // TEST_SUITE
