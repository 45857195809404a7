#pragma once

#include <functional>
#include <vector>

namespace eigensymm {

/// Function of the radius sampled uniformly on [0, R]; piecewise linear
/// between samples, clamped outside.
struct RadialProfile {
    double R = 1.0;
    std::vector<double> values;  // values[i] at r = i * R / (values.size()-1)

    RadialProfile() = default;
    RadialProfile(double radius, std::vector<double> v) : R(radius), values(std::move(v)) {}
    static RadialProfile constant(double radius, double c, int m = 64) {
        return RadialProfile(radius, std::vector<double>(m + 1, c));
    }
    static RadialProfile from_function(double radius, const std::function<double(double)>& f,
                                       int m = 256);
    /// Monotone resample of scattered (r, value) pairs onto a uniform grid;
    /// constant extrapolation beyond the extreme samples.
    static RadialProfile from_samples(double radius, std::vector<std::pair<double, double>> pts,
                                      int m = 512);

    double eval(double r) const;
    double min() const;
    double max() const;
    /// integral over the n-ball: int_0^R n alpha_n r^{n-1} f(r) dr (trapezoid).
    double ball_integral(int n) const;
    bool nonincreasing(double slack = 0.0) const;
};

struct RadialEigenResult {
    double lambda1 = 0.0;
    RadialProfile u;       // eigenfunction samples on [0, R], sup-norm 1
    double residual = 0.0;
    int iterations = 0;
};

struct RadialOptions {
    int m = 2000;          // grid intervals
    double tol = 1e-10;    // eigenvalue stagnation
    int maxiter = 500;
    bool validate_monotone = true;
};

/// Principal eigenvalue of -r^{1-n} (r^{n-1} Lam u')' + omega u' + V u = lambda u
/// on (0,R) with u'(0)=0, u(R)=0. The drift omega(r) acts along e_r.
/// The eigenfunction must come out positive; when omega >= 0 and V is
/// constant it must also be nonincreasing (anything else flags a bug).
RadialEigenResult radial_eigenpair(int n, double R, const RadialProfile& Lam,
                                   const RadialProfile& omega, const RadialProfile& V,
                                   const RadialOptions& opts = {});

/// First positive zero of the Bessel function J0, from its power series.
/// bessel_zero(0, 1) = 2.404825557695773 to at least 12 digits.
double bessel_zero(int order = 0, int k = 1);

/// Rayleigh-Faber-Krahn lower bound (1/m)^{2/n} alpha_n^{2/n} j_{n/2-1,1}^2,
/// implemented for n in {1, 2} (n = 1 uses j_{-1/2,1} = pi/2).
double rfk_value(double m, int n);

/// F_n(m, gamma, alpha, beta) = lambda_1(B_{(m/alpha_n)^{1/n}}, gamma Id,
/// alpha e_r, beta), computed with the radial solver.
double fn_value(double m, double gamma, double alpha, double beta, int n = 2,
                const RadialOptions& opts = {});

/// kappa = m_Lam * exp(-tau1 * m_Lam^{-1} * alpha_n^{-1/n} * m^{1/n})
///         * m^{-2/n} * alpha_n^{2/n} * j_{n/2-1,1}^2.
double kappa_bound(double m, int n, double m_Lambda, double tau1);

}  // namespace eigensymm
