#include "eigensymm/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eigensymm/geometry.hpp"

namespace eigensymm {

double g1_transcendental(double m, double tau) {
    if (m <= 0.0) throw std::invalid_argument("g1_transcendental: m must be positive");
    const double R = 0.5 * m;
    if (tau < std::numbers::pi / R)
        throw std::invalid_argument(
            "g1_transcendental: tau below the validity threshold pi/R (tau^2 >= 4 lambda fails)");
    auto rhs = [&](double lam) {
        const double q = std::sqrt(std::max(0.0, 1.0 - 4.0 * lam / (tau * tau)));
        const double s = 1.0 + q;
        return 0.25 * tau * tau * s * s * std::exp(-q * tau * R);
    };
    // root of rhs(lam) - lam in (0, min(tau^2/4, lambda_no_drift));
    // rhs(0+) > 0 and rhs - lam < 0 just below tau^2/4 for tau R > 2
    const double cap = std::min(0.25 * tau * tau * (1.0 - 1e-14),
                                std::numbers::pi * std::numbers::pi / (4.0 * R * R));
    double lo = 0.0, hi = cap;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rhs(mid) - mid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double lam = 0.5 * (lo + hi);
    if (std::abs(rhs(lam) - lam) > 1e-12 * std::max(1.0, lam))
        throw std::runtime_error("g1_transcendental: residual above 1e-12");
    return lam;
}

AsymptoticTable g1_error_table(double m, const std::vector<double>& taus) {
    AsymptoticTable t;
    t.columns = {"tau", "G1", "normalized_error"};
    double prev = std::numeric_limits<double>::infinity();
    for (double tau : taus) {
        const double g1 = g1_transcendental(m, tau);
        const double err = std::abs(std::exp(0.5 * tau * m) * g1 / (tau * tau) - 1.0);
        if (err >= prev)
            throw std::runtime_error("g1_error_table: normalized error column not decreasing");
        prev = err;
        t.rows.push_back({tau, g1, err});
    }
    return t;
}

AsymptoticTable gn_comparison(int n, double m, const std::vector<double>& taus,
                              const RadialOptions& opts) {
    if (n < 2) throw std::invalid_argument("gn_comparison: n >= 2 required");
    const double R = equal_measure_ball_radius(m, n);
    AsymptoticTable t;
    t.columns = {"tau", "Gn", "G1_bound", "neg_log_Gn_over_tau"};
    double prev_log = -std::numeric_limits<double>::infinity();
    for (double tau : taus) {
        auto gn = radial_eigenpair(n, R, RadialProfile::constant(R, 1.0),
                                   RadialProfile::constant(R, tau),
                                   RadialProfile::constant(R, 0.0), opts);
        auto g1 = radial_eigenpair(1, R, RadialProfile::constant(R, 1.0),
                                   RadialProfile::constant(R, tau),
                                   RadialProfile::constant(R, 0.0), opts);
        if (!(gn.lambda1 > g1.lambda1))
            throw std::runtime_error("gn_comparison: G_n > G_1 ordering violated");
        const double lg = tau > 0.0 ? -std::log(gn.lambda1) / tau
                                    : std::numeric_limits<double>::quiet_NaN();
        if (tau > 0.0) {
            if (lg < prev_log)
                throw std::runtime_error("gn_comparison: -log(Gn)/tau column not increasing");
            prev_log = lg;
        }
        t.rows.push_back({tau, gn.lambda1, g1.lambda1, lg});
    }
    return t;
}

AsymptoticTable remlp_decay(double p, double tau, const std::vector<double>& amplitudes,
                            const RadialOptions& opts) {
    if (!(p > 1.0 && p < 2.0))
        throw std::invalid_argument("remlp_decay: 1 < p < n = 2 required");
    if (tau <= 0.0) throw std::invalid_argument("remlp_decay: tau must be positive");
    AsymptoticTable t;
    t.columns = {"A", "rho_A", "lambda", "envelope"};
    double prev = std::numeric_limits<double>::infinity();
    for (double Aamp : amplitudes) {
        // A (alpha_2 rho^2)^{1/p} = tau
        const double rho = std::sqrt(std::pow(tau / Aamp, p) / alpha_n(2));
        // lambda_1(B_rho, A e_r) = rho^{-2} lambda_1(B_1, A rho e_r)
        auto unit = radial_eigenpair(2, 1.0, RadialProfile::constant(1.0, 1.0),
                                     RadialProfile::constant(1.0, Aamp * rho),
                                     RadialProfile::constant(1.0, 0.0), opts);
        const double lam = unit.lambda1 / (rho * rho);
        if (lam >= prev) throw std::runtime_error("remlp_decay: lambda column not decreasing");
        prev = lam;
        t.rows.push_back({Aamp, rho, lam, std::exp(-0.5 * Aamp * rho) / (rho * rho)});
    }
    return t;
}

}  // namespace eigensymm
