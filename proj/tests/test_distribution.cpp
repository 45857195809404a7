#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "eigensymm/distribution.hpp"
#include "eigensymm/elliptic.hpp"

using namespace eigensymm;
namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("distribution function basics") {
    auto grid = std::make_shared<Grid2D>(DomainSpec::disk(1.0), 128);
    const Grid2D& g = *grid;

    // indicator of the half-disk x > 0
    auto ind = ScalarField2D::from_function(grid,
                                            [](double x, double) { return x > 0 ? 1.0 : 0.0; });
    auto d = distribution_function(ind, 8);
    CHECK(d.nonincreasing());
    CHECK(d.total == doctest::Approx(pi).epsilon(2e-3));
    CHECK(d.eval(-0.5) == doctest::Approx(d.total));
    CHECK(d.eval(0.5) == doctest::Approx(pi / 2.0).epsilon(5e-3));
    CHECK(d.eval(1.0) == doctest::Approx(0.0).scale(1.0));

    // constant field: step at c of height |Omega|
    ScalarField2D c(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) c(i, j) = 2.0;
    auto dc = distribution_function(c, 4);
    CHECK(dc.eval(1.9) > 0.0);
    CHECK(dc.eval(2.0) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS(distribution_function(c, 1));
}

TEST_CASE("rigid motion leaves the distribution unchanged") {
    auto d1 = DomainSpec::ellipse(1.2, 0.7);
    auto d2 = DomainSpec::ellipse(1.2, 0.7, {0.35, -0.2});
    auto g1 = std::make_shared<Grid2D>(d1, 128);
    auto g2 = std::make_shared<Grid2D>(d2, 128);
    auto u1 = ScalarField2D::from_function(
        g1, [](double x, double y) { return std::sin(x + 2 * y) + 1.0; });
    auto u2 = ScalarField2D::from_function(g2, [](double x, double y) {
        return std::sin((x - 0.35) + 2 * (y + 0.2)) + 1.0;
    });
    auto f1 = distribution_function(u1, 40);
    auto f2 = distribution_function(u2, 40);
    for (std::size_t t = 0; t < f1.thresholds.size(); ++t)
        CHECK(std::abs(f1.values[t] - f2.values[t]) < 0.01 * f1.total);
}

TEST_CASE("schwarz symmetrization") {
    auto grid = std::make_shared<Grid2D>(DomainSpec::disk(1.0), 160);
    const Grid2D& g = *grid;

    // constant stays constant
    ScalarField2D c(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) c(i, j) = 0.8;
    auto cs = schwarz(c);
    for (std::size_t q = 0; q + 4 < cs.values.size(); ++q)
        CHECK(cs.values[q] == doctest::Approx(0.8));

    // radial nonincreasing field is already rearranged
    auto rad = ScalarField2D::from_function(
        grid, [](double x, double y) { return 1.0 - (x * x + y * y); });
    auto rs = schwarz(rad);
    for (double r : {0.15, 0.45, 0.75})
        CHECK(rs.eval(r) == doctest::Approx(1.0 - r * r).epsilon(2e-2));
    CHECK(rs.nonincreasing(1e-12));

    // equimeasurability of a wiggly nonnegative field
    auto u = ScalarField2D::from_function(grid, [](double x, double y) {
        return (1.0 + std::sin(3 * x) * std::cos(2 * y)) * (1 - x * x - y * y);
    });
    auto us = schwarz(u);
    auto du = distribution_function(u, 50);
    const int mm = static_cast<int>(us.values.size()) - 1;
    for (std::size_t t = 0; t < du.thresholds.size(); ++t) {
        double rstar = 0.0;
        for (int q = mm; q >= 0; --q)
            if (us.values[q] > du.thresholds[t]) {
                rstar = us.R * q / mm;
                break;
            }
        CHECK(std::abs(alpha_n(2) * rstar * rstar - du.values[t]) < 0.01 * du.total);
    }
}

TEST_CASE("shell rearrangement identities") {
    auto grid = std::make_shared<Grid2D>(DomainSpec::ellipse(1.4, 0.75), 160);
    const Grid2D& g = *grid;
    auto A = MatrixField2D::identity(grid);
    auto psi = torsion_function(grid, A);
    ScalarField2D one(grid), zero(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) one(i, j) = 1.0;
    auto table = build_level_table(psi, one, zero, zero, A, 128);

    auto gfield = ScalarField2D::from_function(
        grid, [](double x, double y) { return 1.0 + 0.5 * std::sin(4 * x) * std::cos(3 * y); });

    // constant g: all three outputs equal the constant
    ScalarField2D cg(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) cg(i, j) = 1.25;
    auto src = shell_rearrangement(cg, psi, table, 6);
    for (std::size_t q = 0; q < src.g_k.values.size(); ++q) {
        CHECK(src.g_k.values[q] == doctest::Approx(1.25));
        CHECK(src.g_lower.values[q] == doctest::Approx(1.25));
        CHECK(src.g_upper.values[q] == doctest::Approx(1.25));
    }

    for (int k : {4, 8, 16}) {
        auto sr = shell_rearrangement(gfield, psi, table, k, 4096);
        const int mm = static_cast<int>(sr.g_k.values.size()) - 1;

        // per-shell integral identity against the realized psi-shell sums
        {
            const double hr = sr.g_k.R / mm;
            std::vector<double> shell_int(k + 1, 0.0);
            for (int q = 0; q < mm; ++q) {
                const double rmid = (q + 0.5) * hr;
                const int sh = std::min(static_cast<int>(rmid / (sr.g_k.R / (k + 1))), k);
                shell_int[sh] += 2.0 * alpha_n(2) * rmid * hr * 0.5 *
                                 (sr.g_k.values[q] + sr.g_k.values[q + 1]);
            }
            for (int sh = 0; sh <= k; ++sh)
                CHECK(std::abs(shell_int[sh] - sr.shell_integral[sh]) <
                      5e-3 * std::abs(sr.shell_integral[sh]));
        }

        // envelope ordering and range bounds at all samples
        const double lo = gfield.min_masked(), hi = gfield.max_masked();
        for (int q = 0; q <= mm; ++q) {
            CHECK(sr.g_lower.values[q] <= sr.g_k.values[q] + 1e-12);
            CHECK(sr.g_k.values[q] <= sr.g_upper.values[q] + 1e-12);
            CHECK(sr.g_lower.values[q] >= lo - 1e-12);
            CHECK(sr.g_upper.values[q] <= hi + 1e-12);
        }
        // distribution function preserved within 1%
        auto dg = distribution_function_masked(gfield, 40);
        const double hr = sr.g_k.R / mm;
        for (std::size_t t = 0; t < dg.thresholds.size(); ++t) {
            double mass = 0.0;
            for (int q = 0; q < mm; ++q) {
                const double rmid = (q + 0.5) * hr;
                if (0.5 * (sr.g_k.values[q] + sr.g_k.values[q + 1]) > dg.thresholds[t])
                    mass += 2.0 * alpha_n(2) * rmid * hr;
            }
            CHECK(std::abs(mass - dg.values[t]) < 0.01 * table.domain_measure);
        }
    }
    CHECK_THROWS(shell_rearrangement(gfield, psi, table, 0));
}

TEST_CASE("hat_g conservation and V-hat consistency") {
    auto grid = std::make_shared<Grid2D>(DomainSpec::disk(1.0), 128);
    const Grid2D& g = *grid;
    auto A = MatrixField2D::identity(grid);
    auto psi = ScalarField2D::from_function(
        grid, [](double x, double y) { return (1.0 - x * x - y * y) / 4.0; });
    ScalarField2D one(grid), zero(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) one(i, j) = 1.0;
    auto table = build_level_table(psi, one, zero, zero, A, 100);

    // constant g -> constant hat g
    auto ch = hat_g(one, psi, table);
    for (double v : ch.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    // integral conservation
    auto gf = ScalarField2D::from_function(
        grid, [](double x, double y) { return 2.0 + std::sin(3 * x) + std::cos(2 * y); });
    auto gh = hat_g(gf, psi, table);
    CHECK(gh.ball_integral(2) ==
          doctest::Approx(gf.integral_masked()).epsilon(5e-3));

    // g = V^- reproduces -V_hat from the drift/potential construction
    auto Vneg = ScalarField2D::from_function(
        grid, [](double x, double y) { return std::max(0.0, std::sin(5 * x * y)); });
    auto t2 = build_level_table(psi, one, zero, Vneg, A, 100);
    auto [vh, Vh] = hat_drift_potential(t2);
    auto gh2 = hat_g(Vneg, psi, t2);
    for (std::size_t q = 0; q < Vh.values.size(); ++q)
        CHECK(gh2.values[q] == doctest::Approx(-Vh.values[q]).epsilon(1e-12));
}

TEST_CASE("potential with prescribed distribution") {
    auto grid = std::make_shared<Grid2D>(DomainSpec::disk(1.0), 160);
    const double m = measure(grid->domain(), *grid).grid_area;

    // single step: V = alpha everywhere
    DistFn step;
    step.total = m;
    step.thresholds = {0.6};
    step.values = {0.0};
    auto V1 = potential_from_distribution(step, grid);
    CHECK(V1.max_masked() == doctest::Approx(0.6));
    CHECK(V1.min_masked() == doctest::Approx(0.6));

    // two steps: measures of the two level regions match the step heights
    DistFn mu;
    mu.total = m;
    mu.thresholds = {0.3, 0.7};
    mu.values = {0.45 * m, 0.0};
    auto V2 = potential_from_distribution(mu, grid);
    auto dv = distribution_function_masked(V2, 50);
    for (std::size_t t = 0; t < dv.thresholds.size(); ++t)
        CHECK(std::abs(dv.values[t] - mu.eval(dv.thresholds[t])) < 0.01 * m);

    // malformed mu rejected
    DistFn bad;
    bad.total = m;
    bad.thresholds = {0.1, 0.5};
    bad.values = {0.2 * m, 0.8 * m};
    CHECK_THROWS(potential_from_distribution(bad, grid));
    DistFn off = mu;
    off.total = 0.5 * m;
    CHECK_THROWS(potential_from_distribution(off, grid));
}
