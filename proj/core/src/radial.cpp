#include "eigensymm/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "eigensymm/geometry.hpp"

namespace eigensymm {

RadialProfile RadialProfile::from_function(double radius, const std::function<double(double)>& f,
                                           int m) {
    std::vector<double> v(m + 1);
    for (int i = 0; i <= m; ++i) v[i] = f(radius * i / m);
    return RadialProfile(radius, std::move(v));
}

RadialProfile RadialProfile::from_samples(double radius,
                                          std::vector<std::pair<double, double>> pts, int m) {
    if (pts.empty()) throw std::invalid_argument("RadialProfile::from_samples: empty");
    std::sort(pts.begin(), pts.end());
    std::vector<double> v(m + 1);
    std::size_t k = 0;
    for (int i = 0; i <= m; ++i) {
        const double r = radius * i / m;
        while (k + 1 < pts.size() && pts[k + 1].first <= r) ++k;
        if (r <= pts.front().first)
            v[i] = pts.front().second;
        else if (r >= pts.back().first)
            v[i] = pts.back().second;
        else {
            const auto& [r0, f0] = pts[k];
            const auto& [r1, f1] = pts[k + 1];
            v[i] = r1 > r0 ? f0 + (f1 - f0) * (r - r0) / (r1 - r0) : f0;
        }
    }
    return RadialProfile(radius, std::move(v));
}

double RadialProfile::eval(double r) const {
    const int m = static_cast<int>(values.size()) - 1;
    if (m < 1) return values.empty() ? 0.0 : values[0];
    const double t = std::clamp(r / R, 0.0, 1.0) * m;
    const int i = std::min(static_cast<int>(t), m - 1);
    const double w = t - i;
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

double RadialProfile::min() const { return *std::min_element(values.begin(), values.end()); }
double RadialProfile::max() const { return *std::max_element(values.begin(), values.end()); }

double RadialProfile::ball_integral(int n) const {
    const int m = static_cast<int>(values.size()) - 1;
    const double h = R / m;
    const double c = n * alpha_n(n);
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
        const double r0 = i * h, r1 = (i + 1) * h;
        s += 0.5 * h * (c * std::pow(r0, n - 1) * values[i] + c * std::pow(r1, n - 1) * values[i + 1]);
    }
    return s;
}

bool RadialProfile::nonincreasing(double slack) const {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[i - 1] + slack) return false;
    return true;
}

namespace {

// Shifted tridiagonal solver, eliminating from the last row upward (UL
// factorization). For the outward-drift M-matrix rows of this module the
// upward sweep is the stable direction: the rounding cascade contracts by
// the face Peclet factor instead of growing like exp(tau R / 2), and all
// arithmetic on positive data stays cancellation-free, which preserves the
// relative accuracy of boundary-layer eigenvalues as small as 1e-14.
struct Tridiag {
    std::vector<double> lower, diag, upper;  // lower[i] multiplies x[i-1] in row i

    void factor_shifted(double shift) {
        const std::size_t n = diag.size();
        g_.assign(n, 0.0);
        inv_.assign(n, 0.0);
        // near-singular shifts leave denominators at the rounding floor;
        // replace exact zeros by eps * row scale, as inverse iteration allows
        auto guard = [&](double den, std::size_t i) {
            const double floor_i =
                1e-300 + std::numeric_limits<double>::epsilon() *
                             (std::abs(diag[i] - shift) + std::abs(upper[i]) +
                              std::abs(lower[i]));
            if (std::abs(den) < floor_i) return den < 0.0 ? -floor_i : floor_i;
            return den;
        };
        double den = guard(diag[n - 1] - shift, n - 1);
        inv_[n - 1] = 1.0 / den;
        g_[n - 1] = lower[n - 1] * inv_[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            den = guard((diag[i] - shift) - upper[i] * g_[i + 1], i);
            inv_[i] = 1.0 / den;
            if (i > 0) g_[i] = lower[i] * inv_[i];
        }
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        const std::size_t n = diag.size();
        std::vector<double> f(n), x(n);
        f[n - 1] = b[n - 1] * inv_[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) f[i] = (b[i] - upper[i] * f[i + 1]) * inv_[i];
        x[0] = f[0];
        for (std::size_t i = 1; i < n; ++i) x[i] = f[i] - g_[i] * x[i - 1];
        return x;
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        const std::size_t n = diag.size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = diag[i] * x[i];
            if (i > 0) y[i] += lower[i] * x[i - 1];
            if (i + 1 < n) y[i] += upper[i] * x[i + 1];
        }
        return y;
    }

private:
    std::vector<double> g_, inv_;
};

}  // namespace

RadialEigenResult radial_eigenpair(int n, double R, const RadialProfile& Lam,
                                   const RadialProfile& omega, const RadialProfile& V,
                                   const RadialOptions& opts) {
    if (n < 1) throw std::invalid_argument("radial_eigenpair: n must be >= 1");
    if (R <= 0.0) throw std::invalid_argument("radial_eigenpair: R must be positive");
    if (!(Lam.min() > 0.0)) throw std::invalid_argument("radial_eigenpair: Lam must be positive");
    const int m = opts.m;
    const double h = R / m;

    // Integrating-factor (self-adjoint) form: with H' = omega / Lam the
    // operator is -(r^{n-1} Lam e^{-H} u')' / (r^{n-1} e^{-H}) + V, so the
    // flux weights p = r^{n-1} Lam e^{-H} and cell masses w = r^{n-1} e^{-H}
    // give a discretization similar to a symmetric one. The eigenvalue comes
    // from the weighted Rayleigh quotient, whose summands are all positive
    // when V >= 0; that keeps full relative accuracy for the exponentially
    // small eigenvalues of large outward drifts.
    std::vector<double> Hhalf(2 * m + 1, 0.0);  // H at r = k h/2
    for (int k = 1; k <= 2 * m; ++k) {
        const double r0 = (k - 1) * 0.5 * h, r1 = k * 0.5 * h;
        Hhalf[k] = Hhalf[k - 1] + 0.25 * h * (omega.eval(r0) / Lam.eval(r0) +
                                              omega.eval(r1) / Lam.eval(r1));
    }
    std::vector<double> p(m, 0.0), wmass(m, 0.0), Vi(m, 0.0);
    for (int i = 0; i < m; ++i) {
        const double rh = (i + 0.5) * h;
        p[i] = std::pow(rh, n - 1) * Lam.eval(rh) * std::exp(-Hhalf[2 * i + 1]);
    }
    // dual-cell masses: [0, h/2] at the center, [r - h/2, r + h/2] elsewhere
    wmass[0] = std::pow(0.5 * h, n) / n;
    for (int i = 1; i < m; ++i)
        wmass[i] = h * std::pow(i * h, n - 1) * std::exp(-Hhalf[2 * i]);
    for (int i = 0; i < m; ++i) Vi[i] = V.eval(i * h);

    Tridiag T;
    T.lower.assign(m, 0.0);
    T.diag.assign(m, 0.0);
    T.upper.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        const double pm = i > 0 ? p[i - 1] : 0.0;
        T.diag[i] = (pm + p[i]) / (h * wmass[i]) + Vi[i];
        T.upper[i] = -p[i] / (h * wmass[i]);
        if (i > 0) T.lower[i] = -pm / (h * wmass[i]);
    }

    const double shift = V.min() < 0.0 ? V.min() - 1.0 : 0.0;
    T.factor_shifted(shift);

    auto rayleigh = [&](const std::vector<double>& u) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < m; ++i) {
            const double du = (i + 1 < m ? u[i + 1] : 0.0) - u[i];
            num += p[i] * du * du / h + wmass[i] * Vi[i] * u[i] * u[i];
            den += wmass[i] * u[i] * u[i];
        }
        return num / den;
    };

    std::vector<double> x(m, 1.0);
    double lambda = shift, lambda_prev = std::numeric_limits<double>::infinity();
    int it = 0;
    bool stagnated = false;
    for (; it < opts.maxiter; ++it) {
        std::vector<double> y = T.solve(x);
        double ynorm = 0.0;
        for (int i = 0; i < m; ++i) ynorm += y[i] * y[i];
        ynorm = std::sqrt(ynorm);
        for (int i = 0; i < m; ++i) x[i] = y[i] / ynorm;
        lambda = rayleigh(x);
        if (std::abs(lambda - lambda_prev) <= opts.tol * std::max(1.0, std::abs(lambda))) {
            if (stagnated) break;
            stagnated = true;
        } else {
            stagnated = false;
        }
        lambda_prev = lambda;
    }
    if (it >= opts.maxiter)
        throw std::runtime_error("radial_eigenpair: no convergence in maxiter iterations");

    double mx = 0.0;
    for (double v : x) mx = std::max(mx, std::abs(v));
    double sgn = (x[0] >= 0.0) ? 1.0 : -1.0;
    for (double& v : x) v /= sgn * mx;
    for (double v : x)
        if (v <= 0.0)
            throw std::runtime_error("radial_eigenpair: nonpositive eigenfunction component");

    std::vector<double> res = T.apply(x);
    double rinf = 0.0;
    for (int i = 0; i < m; ++i) rinf = std::max(rinf, std::abs(res[i] - lambda * x[i]));

    std::vector<double> u(x);
    u.push_back(0.0);
    RadialEigenResult out{lambda, RadialProfile(R, std::move(u)), rinf, it + 1};

    if (opts.validate_monotone) {
        const bool omega_nonneg = omega.min() >= 0.0;
        const bool V_const = (V.max() - V.min()) <= 1e-12 * std::max(1.0, std::abs(V.max()));
        if (omega_nonneg && V_const && !out.u.nonincreasing(1e-9))
            throw std::runtime_error(
                "radial_eigenpair: eigenfunction not monotone decreasing for outward drift "
                "and constant potential (discretization bug)");
    }
    return out;
}

double bessel_zero(int order, int k) {
    if (order != 0 || k != 1)
        throw std::invalid_argument("bessel_zero: only (order=0, k=1) is implemented");
    // J0 power series, 40 terms; plenty on [0, 4]
    auto j0 = [](double x) {
        const double q = -0.25 * x * x;
        double term = 1.0, sum = 1.0;
        for (int i = 1; i <= 40; ++i) {
            term *= q / (static_cast<double>(i) * i);
            sum += term;
        }
        return sum;
    };
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (j0(lo) * j0(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double rfk_value(double m, int n) {
    if (m <= 0.0) throw std::invalid_argument("rfk_value: m must be positive");
    double j;
    if (n == 1)
        j = std::numbers::pi / 2.0;  // first zero of J_{-1/2}
    else if (n == 2)
        j = bessel_zero(0, 1);
    else
        throw std::invalid_argument("rfk_value: only n in {1,2} supported");
    return std::pow(1.0 / m, 2.0 / n) * std::pow(alpha_n(n), 2.0 / n) * j * j;
}

double fn_value(double m, double gamma, double alpha, double beta, int n,
                const RadialOptions& opts) {
    if (m <= 0.0 || gamma <= 0.0 || alpha < 0.0)
        throw std::invalid_argument("fn_value: require m, gamma > 0 and alpha >= 0");
    const double R = equal_measure_ball_radius(m, n);
    auto res = radial_eigenpair(n, R, RadialProfile::constant(R, gamma),
                                RadialProfile::constant(R, alpha),
                                RadialProfile::constant(R, beta), opts);
    return res.lambda1;
}

double kappa_bound(double m, int n, double m_Lambda, double tau1) {
    if (m <= 0.0 || m_Lambda <= 0.0 || tau1 < 0.0)
        throw std::invalid_argument("kappa_bound: bad arguments");
    const double a = alpha_n(n);
    double j;
    if (n == 1)
        j = std::numbers::pi / 2.0;
    else if (n == 2)
        j = bessel_zero(0, 1);
    else
        throw std::invalid_argument("kappa_bound: only n in {1,2} supported");
    return m_Lambda * std::exp(-tau1 / m_Lambda * std::pow(a, -1.0 / n) * std::pow(m, 1.0 / n)) *
           std::pow(m, -2.0 / n) * std::pow(a, 2.0 / n) * j * j;
}

}  // namespace eigensymm
