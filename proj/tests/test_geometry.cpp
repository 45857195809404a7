#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "eigensymm/geometry.hpp"

using namespace eigensymm;
namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("alpha_n closed forms") {
    CHECK(alpha_n(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(alpha_n(2) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(alpha_n(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-14));
    CHECK_THROWS(alpha_n(0));
}

TEST_CASE("equal measure ball radius") {
    CHECK(equal_measure_ball_radius(pi, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(equal_measure_ball_radius(2.0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(equal_measure_ball_radius(4.0 * pi / 3.0, 3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS(equal_measure_ball_radius(-1.0, 2));

    // monotone in the measure
    double prev = 0.0;
    for (double m : {0.5, 1.0, 2.0, 5.0}) {
        const double r = equal_measure_ball_radius(m, 2);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("membership tests") {
    auto d = DomainSpec::disk(1.0);
    CHECK(d.inside(0.0, 0.0));
    CHECK_FALSE(d.inside(2.0, 0.0));

    auto r = DomainSpec::rectangle(2.0, 1.0);
    CHECK(r.inside(0.9, 0.4));
    CHECK_FALSE(r.inside(1.1, 0.0));

    auto e = DomainSpec::ellipse(2.0, 0.5);
    CHECK(e.inside(1.9, 0.0));
    CHECK_FALSE(e.inside(0.0, 0.6));

    auto st = DomainSpec::stadium(2.0, 0.5);
    CHECK(st.inside(1.3, 0.0));   // inside the right cap
    CHECK_FALSE(st.inside(1.6, 0.0));
    CHECK(st.inside(0.0, 0.45));
    CHECK_FALSE(st.inside(0.0, 0.55));

    auto p = DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(p.inside(0.5, 0.5));
    CHECK_FALSE(p.inside(1.5, 0.5));
    CHECK(p.inside(0.5, 0.0));  // on-edge counts as inside
    CHECK_THROWS(DomainSpec::polygon({{0, 0}, {1, 1}, {1, 0}}));  // clockwise
}

TEST_CASE("measure agrees with closed forms") {
    for (int n : {128, 256}) {
        auto disk = DomainSpec::disk(1.0);
        Grid2D g(disk, n);
        auto m = measure(disk, g);
        CHECK(std::abs(m.grid_area - pi) / pi < 1e-3);
        CHECK(*m.closed_form == doctest::Approx(pi));
        // cut-cell error bound
        CHECK(std::abs(m.grid_area - pi) < 2.0 * (g.hx() + g.hy()) * 2.0 * pi);
    }
    {
        auto rect = DomainSpec::rectangle(2.0, 1.0);
        Grid2D g(rect, 128);
        auto m = measure(rect, g);
        CHECK(*m.closed_form == doctest::Approx(2.0));
        CHECK(std::abs(m.grid_area - 2.0) / 2.0 < 1e-3);
    }
    {
        auto ell = DomainSpec::ellipse(2.0, 0.5);
        Grid2D g(ell, 256);
        auto m = measure(ell, g);
        CHECK(std::abs(m.grid_area - pi) / pi < 1e-3);
    }
    {
        auto st = DomainSpec::stadium(1.0, 0.5);
        Grid2D g(st, 128);
        auto m = measure(st, g);
        CHECK(*m.closed_form == doctest::Approx(1.0 + pi * 0.25));
        CHECK(std::abs(m.grid_area - *m.closed_form) / *m.closed_form < 2e-3);
    }
    auto sliver = DomainSpec::polygon({{0, 0}, {1, 0.02}, {1, 0.03}, {0, 0.01}});
    CHECK_THROWS(measure(sliver, Grid2D(sliver, 4)));
}

TEST_CASE("mask consistent with membership") {
    auto dom = DomainSpec::ellipse(1.3, 0.7);
    Grid2D g(dom, 96);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) CHECK(dom.inside(g.cx(i), g.cy(j)));
    CHECK(g.interior_count() > 0);
}

TEST_CASE("boundary distance fraction") {
    auto dom = DomainSpec::disk(1.0);
    Grid2D g(dom, 64);
    // find a masked cell with an unmasked east neighbor and check the crossing
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j) || g.masked(i + 1, j)) continue;
            const double th = g.boundary_theta(i, j, +1, 0);
            CHECK(th > 0.0);
            CHECK(th <= 1.0);
            const double xb = g.cx(i) + th * g.hx();
            CHECK(std::abs(xb * xb + g.cy(j) * g.cy(j) - 1.0) < 1e-9);
        }
}
