#include "eigensymm/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace eigensymm {

ExtremalResult optimize_drift(GridPtr grid, const MatrixField2D& A, const ScalarField2D& w1,
                              double tau1, double tau2, OptimDirection direction,
                              const ExtremalOptions& opts) {
    const Grid2D& g = *grid;
    if (w1.min_masked() <= 0.0)
        throw std::invalid_argument("optimize_drift: w1 must be strictly positive");
    if (tau1 < 0.0 || tau2 < 0.0)
        throw std::invalid_argument("optimize_drift: tau1, tau2 must be nonnegative");
    const double sgn = direction == OptimDirection::Minimize ? -1.0 : 1.0;

    ScalarField2D V(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) V(i, j) = sgn * tau2;

    ExtremalResult out{VectorField2D(grid), sgn * tau2, 0.0, ScalarField2D(grid), {}, 0.0, 0};

    VectorField2D v(grid);
    double lambda_prev = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < opts.maxiter; ++it) {
        Operator2D op = assemble(grid, A, v, V);
        EigenResult eig = principal_eigenpair(op, opts.eigen);
        ++out.eigen_solves;
        out.lambda_trace.push_back(eig.lambda1);
        out.phi = eig.phi;
        out.lambda = eig.lambda1;
        out.drift = v;

        if (std::abs(eig.lambda1 - lambda_prev) <=
                opts.tol * std::max(1.0, std::abs(eig.lambda1)) ||
            tau1 == 0.0) {
            converged = true;
            break;
        }
        lambda_prev = eig.lambda1;

        const VectorField2D grad = gradient(eig.phi);
        VectorField2D vnext(grid);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                if (!g.masked(i, j)) continue;
                const double gx = grad.x(i, j), gy = grad.y(i, j);
                const double gn = std::hypot(gx, gy);
                if (gn < kGradientFloor) continue;  // v = 0 on the critical set
                const double amp = sgn * tau1 / w1(i, j) / gn;
                vnext.x(i, j) = amp * gx;
                vnext.y(i, j) = amp * gy;
            }
        v = vnext;
    }
    if (!converged)
        throw std::runtime_error("optimize_drift: no convergence within maxiter eigen-solves");

    // an oscillating trace signals a broken fixed point rather than slow
    // convergence: count sign flips of the increments beyond the tolerance
    int flips = 0;
    for (std::size_t q = 2; q < out.lambda_trace.size(); ++q) {
        const double d1 = out.lambda_trace[q - 1] - out.lambda_trace[q - 2];
        const double d2 = out.lambda_trace[q] - out.lambda_trace[q - 1];
        const double scale = opts.tol * std::max(1.0, std::abs(out.lambda));
        if (d1 * d2 < 0.0 && std::abs(d1) > 10 * scale && std::abs(d2) > 10 * scale) ++flips;
    }
    if (flips >= 3) throw std::runtime_error("optimize_drift: oscillating lambda trace");

    // alignment residual: v.grad phi - sgn tau1 w1^{-1} |grad phi| over cells
    // with |grad phi| above the floor
    const VectorField2D grad = gradient(out.phi);
    double resid = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j)) continue;
            const double gn = std::hypot(grad.x(i, j), grad.y(i, j));
            if (gn < kGradientFloor) continue;
            const double dot = out.drift.x(i, j) * grad.x(i, j) + out.drift.y(i, j) * grad.y(i, j);
            resid = std::max(resid, std::abs(dot - sgn * tau1 / w1(i, j) * gn));
        }
    out.alignment_residual = resid;
    return out;
}

BallOptimalReport ball_optimal_check(double R, const RadialProfile& Lam, const RadialProfile& w1,
                                     double tau1, double tau2, int grid_n,
                                     const ExtremalOptions& opts) {
    auto grid = std::make_shared<Grid2D>(DomainSpec::disk(R), grid_n);
    const Grid2D& g = *grid;
    MatrixField2D A(grid);
    ScalarField2D w1f(grid, 1.0);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double r = std::hypot(g.cx(i), g.cy(j));
            const double l = Lam.eval(r);
            A.a11(i, j) = l;
            A.a22(i, j) = l;
            w1f(i, j) = w1.eval(r);
        }

    ExtremalResult ext = optimize_drift(grid, A, w1f, tau1, tau2, OptimDirection::Minimize, opts);

    const int m = 2000;
    RadialProfile omega(R, std::vector<double>(m + 1));
    for (int i = 0; i <= m; ++i) omega.values[i] = tau1 / w1.eval(R * i / m);
    RadialOptions ropts;
    ropts.validate_monotone = true;
    RadialEigenResult rad = radial_eigenpair(2, R, Lam, omega,
                                             RadialProfile::constant(R, -tau2), ropts);

    BallOptimalReport rep;
    rep.lambda_2d = ext.lambda;
    rep.lambda_radial = rad.lambda1;
    rep.rel_gap = std::abs(ext.lambda - rad.lambda1) / std::max(1e-300, std::abs(rad.lambda1));
    rep.eigen_solves = ext.eigen_solves;

    // radial monotone decrease of the 2d optimizer's phi, sampled by radius
    std::vector<std::pair<double, double>> rv;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) rv.emplace_back(std::hypot(g.cx(i), g.cy(j)), ext.phi(i, j));
    std::sort(rv.begin(), rv.end());
    // bin by radius and require the bin means to decrease
    const int nb = 24;
    std::vector<double> mean(nb, 0.0), cnt(nb, 0.0);
    for (const auto& [r, val] : rv) {
        const int b = std::min(nb - 1, static_cast<int>(r / R * nb));
        mean[b] += val;
        cnt[b] += 1.0;
    }
    rep.phi_radially_decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nb; ++b) {
        if (cnt[b] == 0.0) continue;
        const double mb = mean[b] / cnt[b];
        if (mb > prev + 1e-6) rep.phi_radially_decreasing = false;
        prev = mb;
    }
    return rep;
}

std::pair<double, double> det_sigma_reduction(int n, int p, double omega, double sigma) {
    if (n < 2 || p < 1 || p > n - 1)
        throw std::invalid_argument("det_sigma_reduction: need n >= 2 and 1 <= p <= n-1");
    if (omega <= 0.0 || sigma <= 0.0)
        throw std::invalid_argument("det_sigma_reduction: omega, sigma must be positive");
    auto binom = [](int a, int b) {
        double r = 1.0;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    const double c1 = binom(n - 1, p - 1), c2 = binom(n - 1, p);
    auto f = [&](double s) { return omega * c1 * std::pow(s, p - n) + c2 * std::pow(s, p); };
    const double smin = std::pow(omega, 1.0 / n);
    const double fmin = f(smin);  // = C(n,p) omega^{p/n}
    if (fmin > sigma * (1.0 + 1e-12))
        throw std::invalid_argument(
            "det_sigma_reduction: C(n,p) omega^{p/n} <= sigma is violated");
    if (fmin >= sigma * (1.0 - 1e-14)) return {smin, smin};  // equality case, exact

    // a2 = max{s > 0 : f(s) <= sigma}; f is increasing right of the minimizer
    double lo = smin, hi = smin;
    while (f(hi) <= sigma) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) <= sigma)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    const double a2 = lo;
    const double a1 = omega / std::pow(a2, n - 1);
    return {a1, a2};
}

LpConditionsReport check_lp_conditions(const VectorField2D& v, const ScalarField2D& V,
                                       const ScalarField2D& phi, const ScalarField2D& w1,
                                       double tau1, double tau2, OptimDirection direction,
                                       double rel_tol) {
    const Grid2D& g = phi.grid();
    const double sgn = direction == OptimDirection::Minimize ? -1.0 : 1.0;
    const VectorField2D grad = gradient(phi);
    LpConditionsReport rep;
    double wv_sup = 0.0, V_sup = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j)) continue;
            const double gn = std::hypot(grad.x(i, j), grad.y(i, j));
            const double vn = std::hypot(v.x(i, j), v.y(i, j));
            wv_sup = std::max(wv_sup, w1(i, j) * vn);
            V_sup = std::max(V_sup, std::abs(V(i, j)));
            if (gn >= kGradientFloor) {
                const double dot = v.x(i, j) * grad.x(i, j) + v.y(i, j) * grad.y(i, j);
                rep.alignment_residual =
                    std::max(rep.alignment_residual, std::abs(dot - sgn * vn * gn));
            }
            const double bad = direction == OptimDirection::Minimize
                                   ? std::max(0.0, V(i, j))
                                   : std::max(0.0, -V(i, j));
            rep.potential_sign_violation = std::max(rep.potential_sign_violation, bad);
        }
    rep.drift_norm_saturated = std::abs(wv_sup - tau1) <= rel_tol * std::max(1.0, tau1);
    rep.potential_norm_saturated = std::abs(V_sup - tau2) <= rel_tol * std::max(1.0, tau2);
    return rep;
}

}  // namespace eigensymm
