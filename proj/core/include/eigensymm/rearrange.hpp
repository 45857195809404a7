#pragma once

#include <string>
#include <vector>

#include "eigensymm/elliptic.hpp"
#include "eigensymm/fields.hpp"
#include "eigensymm/radial.hpp"

namespace eigensymm {

/// Co-area bookkeeping over the superlevel sets of psi. Levels split
/// [0, max psi] into K uniform bins; each interior cell contributes
/// cellarea * g(cell) to the bin containing its psi value, so
/// bin mass / bin width approximates the co-area density
/// S_g(a) = int_{Sigma_a} g |grad psi|^{-1} dsigma. Near-empty bins are
/// merged into their neighbors when the radial profiles are extracted.
struct LevelSetTable {
    int n = 2;                    // ambient dimension of the rearranged ball
    double M = 0.0;               // max psi
    double Rstar = 0.0;           // equal-measure ball radius
    double domain_measure = 0.0;  // discrete measure of the masked region

    std::vector<double> level;        // K+1 level edges, level[0]=0, level[K]=M
    std::vector<double> supervolume;  // |Omega_{level[j]}|, strictly decreasing
    std::vector<double> rho;          // rho(level[j]) = (supervolume/alpha_n)^{1/n}
    std::vector<double> flux;         // I(level[j]) = int_{Omega_level} div(A grad psi)

    // per-bin masses (size K): mass of cellarea * g over cells in the bin
    std::vector<double> mass_one;        // g = 1
    std::vector<double> mass_invLam;     // g = Lam^{-1}
    std::vector<double> mass_om2invLam;  // g = omega^2 Lam^{-1}
    std::vector<double> mass_Vneg;       // g = V^-
    std::vector<double> mass_gradpsi;    // g = |grad psi|

    double bin_width() const { return level.size() > 1 ? level[1] - level[0] : 0.0; }
    int bins() const { return static_cast<int>(mass_one.size()); }

    /// Mid-shell radius for bin j: sphere radius at half the bin's volume.
    double bin_radius(int j) const;
    /// rho^{-1}(r) by monotone piecewise-linear inversion of the sampled rho.
    double rho_inverse(double r) const;
    /// I as a function of the radius, interpolated through (rho, flux) pairs.
    double flux_at_radius(double r) const;
};

LevelSetTable build_level_table(const ScalarField2D& psi, const ScalarField2D& Lam,
                                const ScalarField2D& omega, const ScalarField2D& Vneg,
                                const MatrixField2D& A, int K);

struct RearrangedData {
    RadialProfile Lam_hat;  // harmonic co-area mean of Lam per level set
    RadialProfile F;        // F(r) = I(rho^{-1}(r)) / (n alpha_n r^{n-1} Lam_hat(r)), F(0)=0
    RadialProfile psi_tilde;
    RadialProfile v_hat;    // |v_hat|
    RadialProfile V_hat;    // nonpositive
    RadialProfile U;        // U(r) = int_0^r |v_hat| / Lam_hat
    double max_positive_F = 0.0;  // reported, never clipped
};

/// Lam_hat(rho(a)) = S_1(a) / S_{Lam^{-1}}(a), piecewise linear in r.
RadialProfile hat_lambda(const LevelSetTable& table, int samples = 1024);

/// F from the superlevel flux and Lam_hat; psi_tilde(r) = -int_r^{Rstar} F.
/// Positive F is reported through RearrangedData::max_positive_F.
std::pair<RadialProfile, RadialProfile> tilde_psi(const LevelSetTable& table,
                                                  const RadialProfile& Lam_hat,
                                                  double* max_positive_F = nullptr);

/// |v_hat|(rho(a)) = sqrt(S_{omega^2 Lam^{-1}}(a) / S_{Lam^{-1}}(a));
/// V_hat(rho(a)) = -S_{V^-}(a) / S_1(a).
std::pair<RadialProfile, RadialProfile> hat_drift_potential(const LevelSetTable& table,
                                                            int samples = 1024);

/// U(r) = int_0^r |v_hat| Lam_hat^{-1}; U(0) = 0, nondecreasing.
RadialProfile weight_U(const RadialProfile& Lam_hat, const RadialProfile& v_hat);

RearrangedData build_rearrangement(const LevelSetTable& table, int samples = 1024);

/// One named inequality / conservation check with its margin and tolerance.
/// pass is reproducible as margin >= -tolerance.
struct CheckEntry {
    std::string name;
    double value = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    std::vector<CheckEntry> checks;
    double lambda_omega = 0.0;       // lambda_1 on the original domain (when computed)
    double lambda_star = 0.0;        // lambda_1 of the rearranged radial operator
    double pointwise_min_margin = 0.0;
    double empirical_eta_ratio = 0.0;  // min over a <= M/2 of psi_tilde(rho(a)) / a
    double wall_time_seconds = 0.0;

    bool all_pass() const;
    CheckEntry& add(std::string name, double value, double margin, double tolerance);
};

/// The section-3 inequality battery: pointwise margin, level isoperimetry,
/// conservation of the Lam^{-1} and omega^2 Lam^{-1} integrals, gradient
/// comparisons, and the weighted integral inequality for (omega0, mu).
/// Violations are recorded with magnitudes, never clipped.
ComparisonReport verify_report(const RearrangedData& data, const LevelSetTable& table,
                               const ScalarField2D& psi, const MatrixField2D& A,
                               const ScalarField2D& omega, const ScalarField2D& Vfield,
                               double omega0, double mu);

struct CompareOptions {
    int levels = 200;
    int radial_m = 2000;
    int profile_samples = 1024;
    EigenOptions eigen;
    double tol_compare_rel = 0.02;  // lambda_star <= lambda_1 + 0.02 max(1, |lambda_1|)
};

/// Full chain: principal eigenpair on Omega, rearrangement of the
/// eigenfunction, radial eigenvalue on the equal-measure ball, and the
/// comparison lambda_star <= lambda_1 + tol plus the coefficient-bound checks.
/// Scenarios with lambda_1 < 0 are rejected. The intermediate construction
/// can be captured through the optional out-parameters.
ComparisonReport compare_eigenvalues(GridPtr grid, const MatrixField2D& A,
                                     const ScalarField2D& Lam, const VectorField2D& v,
                                     const ScalarField2D& V, const CompareOptions& opts = {},
                                     RearrangedData* out_data = nullptr,
                                     LevelSetTable* out_table = nullptr);

}  // namespace eigensymm
