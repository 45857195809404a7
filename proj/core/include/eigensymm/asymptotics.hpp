#pragma once

#include <string>
#include <vector>

#include "eigensymm/radial.hpp"

namespace eigensymm {

/// Tabulated large-drift behavior of G_n(m, tau) = lambda_1 of the
/// equal-measure ball with outward drift tau e_r.
struct AsymptoticTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// G_1(m, tau) from the closed transcendental equation
/// lambda = (tau^2/4) (1 + q)^2 exp(-q tau R), q = sqrt(1 - 4 lambda / tau^2),
/// R = m/2. Valid for tau >= pi / R; residual below 1e-12.
double g1_transcendental(double m, double tau);

/// Rows (tau, G_1, |tau^{-2} e^{tau m/2} G_1 - 1|); the error column must
/// decrease along the given taus.
AsymptoticTable g1_error_table(double m, const std::vector<double>& taus);

/// Rows (tau, G_n, G_1 bound, -log(G_n)/tau). Checks G_n(m,tau) >
/// G_1(2 (m/alpha_n)^{1/n}, tau) at every tau and that the log column
/// approaches R = (m/alpha_n)^{1/n} monotonically.
AsymptoticTable gn_comparison(int n, double m, const std::vector<double>& taus,
                              const RadialOptions& opts = {});

/// L^p-only drift bounds decay scenario: amplitudes A with
/// A (alpha_2 rho_A^2)^{1/p} = tau, rows (A, rho_A, lambda_1(B_rho, A e_r),
/// envelope rho^{-2} e^{-A rho / 2}); the lambda column must decrease to 0.
AsymptoticTable remlp_decay(double p, double tau, const std::vector<double>& amplitudes,
                            const RadialOptions& opts = {});

}  // namespace eigensymm
