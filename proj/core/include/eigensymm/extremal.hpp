#pragma once

#include <vector>

#include "eigensymm/elliptic.hpp"
#include "eigensymm/fields.hpp"
#include "eigensymm/radial.hpp"

namespace eigensymm {

enum class OptimDirection { Minimize, Maximize };

struct ExtremalResult {
    VectorField2D drift;            // optimal v
    double potential_value = 0.0;   // -tau2 (min) or +tau2 (max)
    double lambda = 0.0;            // lambda_underline or lambda_overline
    ScalarField2D phi;
    std::vector<double> lambda_trace;
    double alignment_residual = 0.0;  // sup |v.grad phi +- tau1 w1^{-1} |grad phi||
    int eigen_solves = 0;
};

struct ExtremalOptions {
    int maxiter = 40;
    double tol = 1e-6;  // lambda stagnation, relative to max(1, |lambda|)
    EigenOptions eigen;
};

/// Fixed-point iteration for the extremal drift under |v| w1 <= tau1,
/// |V| <= tau2: the optimal potential is locked at -+tau2, and each sweep
/// realigns v with -+ tau1 w1^{-1} grad phi / |grad phi|, with v = 0 where
/// |grad phi| falls below the regularization floor.
ExtremalResult optimize_drift(GridPtr grid, const MatrixField2D& A, const ScalarField2D& w1,
                              double tau1, double tau2, OptimDirection direction,
                              const ExtremalOptions& opts = {});

struct BallOptimalReport {
    double lambda_2d = 0.0;      // optimize_drift on the disk
    double lambda_radial = 0.0;  // radial solver with omega = tau1 / w1
    double rel_gap = 0.0;
    bool phi_radially_decreasing = false;
    int eigen_solves = 0;
};

/// Disk cross-check of the extremal drift: the optimizer must agree with the
/// radial solver run at omega = tau1 w1^{-1} e_r, and the optimal phi must be
/// radially decreasing.
BallOptimalReport ball_optimal_check(double R, const RadialProfile& Lam,
                                     const RadialProfile& w1, double tau1, double tau2,
                                     int grid_n = 192, const ExtremalOptions& opts = {});

/// Diagonal reduction diag(a1, a2, ..., a2) with det = omega and
/// sigma_p = sigma: a2 is the largest root of
/// f(s) = omega C(n-1,p-1) s^{p-n} + C(n-1,p) s^p = sigma right of the
/// minimizer omega^{1/n}, and a1 = omega / a2^{n-1}. Requires
/// C(n,p) omega^{p/n} <= sigma.
std::pair<double, double> det_sigma_reduction(int n, int p, double omega, double sigma);

struct LpConditionsReport {
    double alignment_residual = 0.0;   // |v.grad phi + |v||grad phi|| (min case)
    double potential_sign_violation = 0.0;
    bool drift_norm_saturated = false;
    bool potential_norm_saturated = false;
};

/// Checker for the necessary conditions of the fixed-domain optimum on
/// user-supplied candidates (the general L^p problem is not optimized here).
LpConditionsReport check_lp_conditions(const VectorField2D& v, const ScalarField2D& V,
                                       const ScalarField2D& phi, const ScalarField2D& w1,
                                       double tau1, double tau2, OptimDirection direction,
                                       double rel_tol = 1e-6);

}  // namespace eigensymm
