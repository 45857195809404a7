#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "eigensymm/rearrange.hpp"

using namespace eigensymm;
namespace {
constexpr double pi = std::numbers::pi;

struct DiskTorsion {
    GridPtr grid;
    ScalarField2D psi;
    ScalarField2D one, zero;
    MatrixField2D A;

    explicit DiskTorsion(int n, double R = 1.0)
        : grid(std::make_shared<Grid2D>(DomainSpec::disk(R), n)),
          psi(ScalarField2D::from_function(
              grid, [R](double x, double y) { return (R * R - x * x - y * y) / 4.0; })),
          one(grid),
          zero(grid),
          A(MatrixField2D::identity(grid)) {
        const Grid2D& g = *grid;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                if (g.masked(i, j)) one(i, j) = 1.0;
    }
};

}  // namespace

TEST_CASE("level table of the disk torsion function") {
    DiskTorsion d(192);
    auto t = build_level_table(d.psi, d.one, d.zero, d.zero, d.A, 200);

    CHECK(t.M == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(t.Rstar == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(t.rho[0] == doctest::Approx(t.Rstar));
    CHECK(t.rho.back() == doctest::Approx(0.0));

    // |Omega_a| strictly decreasing across resolved levels
    for (std::size_t j = 1; j < t.supervolume.size(); ++j)
        CHECK(t.supervolume[j] < t.supervolume[j - 1]);

    // rho(a) = sqrt(R^2 - 4a) for the radial torsion
    for (int j = 0; j < 200; j += 20) {
        const double a = t.level[j];
        CHECK(t.rho[j] == doctest::Approx(std::sqrt(1.0 - 4.0 * a)).epsilon(5e-3));
    }

    // co-area completeness: sum S_1(a) da = |Omega|
    double vol = 0.0;
    for (double m : t.mass_one) vol += m;
    CHECK(vol == doctest::Approx(t.domain_measure).epsilon(1e-12));

    // S_1(a) = 4 pi for this psi: bins must be a few cells thick before the
    // lattice quantization noise drops below a few percent
    auto tc = build_level_table(d.psi, d.one, d.zero, d.zero, d.A, 40);
    const double dac = tc.bin_width();
    for (int j = 4; j < 36; j += 4)
        CHECK(tc.mass_one[j] / dac == doctest::Approx(4.0 * pi).epsilon(0.05));

    // flux I(a) < 0 on resolved levels and rho inverse is the inverse map
    for (int j = 0; j < 200; j += 10) CHECK(t.flux[j] < 0.0);
    for (double r : {0.1, 0.4, 0.77}) {
        const double a = t.rho_inverse(r);
        CHECK(a == doctest::Approx((1.0 - r * r) / 4.0).epsilon(5e-3));
    }

    CHECK_THROWS(build_level_table(d.psi, d.one, d.zero, d.zero, d.A, 4));  // K too small
}

TEST_CASE("level scaling relabels the table") {
    DiskTorsion d(96);
    auto t1 = build_level_table(d.psi, d.one, d.zero, d.zero, d.A, 64);
    ScalarField2D scaled(d.grid);
    for (std::size_t k = 0; k < scaled.data().size(); ++k)
        scaled.data()[k] = 3.0 * d.psi.data()[k];
    auto t2 = build_level_table(scaled, d.one, d.zero, d.zero, d.A, 64);
    for (std::size_t j = 0; j < t1.level.size(); ++j) {
        CHECK(t2.level[j] == doctest::Approx(3.0 * t1.level[j]).epsilon(1e-12));
        CHECK(t2.supervolume[j] == doctest::Approx(t1.supervolume[j]).epsilon(1e-12));
    }
}

TEST_CASE("hat_lambda of constants and radial fields") {
    DiskTorsion d(128);
    // constant Lambda = gamma -> hat Lambda exactly gamma at all samples
    ScalarField2D gam(d.grid);
    const Grid2D& g = *d.grid;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) gam(i, j) = 2.5;
    auto t = build_level_table(d.psi, gam, d.zero, d.zero, d.A, 100);
    auto lh = hat_lambda(t);
    for (double v : lh.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));

    // radial Lambda(r) with radial psi: hat Lambda(rho(a)) = Lambda(r(a))
    ScalarField2D lam_r = ScalarField2D::from_function(
        d.grid, [](double x, double y) { return 1.0 + x * x + y * y; });
    auto t2 = build_level_table(d.psi, lam_r, d.zero, d.zero, d.A, 100);
    auto lh2 = hat_lambda(t2);
    for (double r : {0.2, 0.5, 0.8})
        CHECK(lh2.eval(r) == doctest::Approx(1.0 + r * r).epsilon(5e-3));

    // conservation of the Lambda^{-1} integral
    double lhs = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) lhs += g.cell_area() / lam_r(i, j);
    RadialProfile inv(lh2.R, lh2.values);
    for (double& v : inv.values) v = 1.0 / v;
    CHECK(inv.ball_integral(2) == doctest::Approx(lhs).epsilon(5e-3));
}

TEST_CASE("tilde_psi is the identity on radial data") {
    DiskTorsion d(256);
    auto t = build_level_table(d.psi, d.one, d.zero, d.zero, d.A, 200);
    auto data = build_rearrangement(t);
    CHECK(data.max_positive_F == 0.0);

    // F(r) = psi'(r) = -r/2 and psi_tilde = psi
    for (double r : {0.2, 0.5, 0.8})
        CHECK(data.F.eval(r) == doctest::Approx(-r / 2.0).epsilon(2e-2));
    const int m = static_cast<int>(data.psi_tilde.values.size()) - 1;
    CHECK(data.psi_tilde.values[m] == 0.0);  // exact by construction
    double sup = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double r = t.Rstar * i / m;
        sup = std::max(sup,
                       std::abs(data.psi_tilde.values[i] - std::max(0.0, (1.0 - r * r) / 4.0)));
    }
    CHECK(sup < 1e-3);

    // pointwise inequality with tolerance, and monotonicity
    CHECK(data.psi_tilde.nonincreasing(1e-12));
    for (int j = 1; j < t.bins(); j += 9)
        CHECK(data.psi_tilde.eval(t.rho[j]) >= t.level[j] - 5e-3);
}

TEST_CASE("ellipse torsion dominates its levels") {
    auto grid = std::make_shared<Grid2D>(DomainSpec::ellipse(1.5, 2.0 / 3.0), 192);
    auto A = MatrixField2D::identity(grid);
    auto psi = torsion_function(grid, A);
    const Grid2D& g = *grid;
    ScalarField2D one(grid), zero(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) one(i, j) = 1.0;
    auto t = build_level_table(psi, one, zero, zero, A, 160);
    auto data = build_rearrangement(t);

    // co-area completeness within 0.5%
    double vol = 0.0;
    for (double m : t.mass_one) vol += m;
    CHECK(std::abs(vol - t.domain_measure) / t.domain_measure < 5e-3);

    // rho and its inverse compose to the identity at the table edges
    for (int j = 0; j <= t.bins(); j += 16)
        CHECK(t.rho_inverse(t.rho[j]) == doctest::Approx(t.level[j]).epsilon(1e-10));

    // psi_tilde(0) >= max psi (strict gap on a non-ball domain)
    CHECK(data.psi_tilde.values.front() >= t.M);

    // the verify battery passes wholesale
    auto rep = verify_report(data, t, psi, A, zero, zero, 0.0,
                             /*mu=*/-1.0);  // mu < 0: skip the weighted inequality
    for (const auto& c : rep.checks) {
        INFO(c.name, " margin=", c.margin, " tol=", c.tolerance);
        CHECK(c.pass);
    }
    CHECK(rep.empirical_eta_ratio > 1.0);
}

TEST_CASE("hat drift and potential identities") {
    DiskTorsion d(128);
    const Grid2D& g = *d.grid;
    // omega constant c -> |v_hat| = c; V >= 0 -> V_hat = 0
    ScalarField2D om(d.grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) om(i, j) = 1.7;
    auto t = build_level_table(d.psi, d.one, om, d.zero, d.A, 100);
    auto [vh, Vh] = hat_drift_potential(t);
    for (double v : vh.values) CHECK(v == doctest::Approx(1.7).epsilon(1e-12));
    for (double v : Vh.values) CHECK(v == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

    // weight U: constants give U = tau r / gamma
    auto U = weight_U(RadialProfile::constant(1.0, 2.0), RadialProfile::constant(1.0, 3.0));
    CHECK(U.values.front() == 0.0);
    CHECK(U.eval(1.0) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(U.eval(0.5) == doctest::Approx(0.75).epsilon(1e-10));
    // bound by constants
    CHECK(U.values.back() <= 3.0 * 1.0 / 2.0 + 1e-12);
}

TEST_CASE("compare on the disk with radial data is the identity case") {
    auto grid = std::make_shared<Grid2D>(DomainSpec::disk(1.0), 160);
    const Grid2D& g = *grid;
    ScalarField2D Lam(grid);
    MatrixField2D A(grid);
    VectorField2D v(grid);
    ScalarField2D V(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double r = std::hypot(g.cx(i), g.cy(j));
            const double l = 1.0 + 0.5 * r * r;
            Lam(i, j) = l;
            A.a11(i, j) = l;
            A.a22(i, j) = l;
            if (g.masked(i, j) && r > 1e-12) {
                v.x(i, j) = 0.8 * g.cx(i) / r;
                v.y(i, j) = 0.8 * g.cy(j) / r;
            }
            if (g.masked(i, j)) V(i, j) = -0.5 * r;
        }
    CompareOptions opts;
    opts.levels = 160;
    auto rep = compare_eigenvalues(grid, A, Lam, v, V, opts);
    CHECK(std::abs(rep.lambda_star - rep.lambda_omega) /
              std::max(1.0, std::abs(rep.lambda_omega)) <
          0.01);
    for (const auto& c : rep.checks) {
        INFO(c.name, " margin=", c.margin, " tol=", c.tolerance);
        CHECK(c.pass);
    }
}

TEST_CASE("compare chain on a convex polygon") {
    auto dom = DomainSpec::polygon(
        {{1.0, 0.0}, {0.31, 0.95}, {-0.81, 0.59}, {-0.81, -0.59}, {0.31, -0.95}});
    auto grid = std::make_shared<Grid2D>(dom, 128);
    const Grid2D& g = *grid;
    ScalarField2D Lam(grid), V(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) {
                Lam(i, j) = 1.0 + 0.2 * std::sin(3.0 * g.cx(i));
                V(i, j) = 0.2 * std::cos(g.cy(j));
            }
    MatrixField2D A(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            A.a11(i, j) = Lam(i, j) + 0.3;
            A.a22(i, j) = Lam(i, j) + 0.1;
            A.a12(i, j) = 0.05;
        }
    VectorField2D v(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) v.x(i, j) = 0.4;
    CompareOptions opts;
    opts.levels = 100;
    auto rep = compare_eigenvalues(grid, A, Lam, v, V, opts);
    CHECK(rep.lambda_star <= rep.lambda_omega + 0.02 * std::max(1.0, rep.lambda_omega));
    CHECK(rep.empirical_eta_ratio > 1.0);
    for (const auto& c : rep.checks) {
        INFO(c.name, " margin=", c.margin, " tol=", c.tolerance);
        CHECK(c.pass);
    }
}

TEST_CASE("compare rejects negative principal eigenvalues") {
    auto grid = std::make_shared<Grid2D>(DomainSpec::disk(1.0), 64);
    const Grid2D& g = *grid;
    ScalarField2D Lam(grid), V(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) {
                Lam(i, j) = 1.0;
                V(i, j) = -40.0;  // drives lambda_1 negative
            }
    VectorField2D v(grid);
    CHECK_THROWS(compare_eigenvalues(grid, MatrixField2D::identity(grid), Lam, v, V));
}
