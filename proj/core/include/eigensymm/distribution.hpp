#pragma once

#include <vector>

#include "eigensymm/fields.hpp"
#include "eigensymm/radial.hpp"
#include "eigensymm/rearrange.hpp"

namespace eigensymm {

/// Right-continuous nonincreasing distribution function mu(t) = |{u > t}|,
/// sampled at thresholds t_0 < ... < t_J. mu(t) = values[j] for
/// t in [thresholds[j], thresholds[j+1]), mu = total below t_0 and 0 at and
/// beyond the last threshold when the function comes from F_{alpha,beta}.
struct DistFn {
    std::vector<double> thresholds;
    std::vector<double> values;  // measures, in area units
    double total = 0.0;          // |Omega|

    double eval(double t) const;
    bool nonincreasing() const;
};

/// mu(t) at J uniform thresholds spanning [min u, max u], measures by
/// fraction-weighted cell counting.
DistFn distribution_function(const ScalarField2D& u, int J);

/// Distribution function over the masked cells only (solver measure);
/// used where the comparison partner lives on the same discrete domain.
DistFn distribution_function_masked(const ScalarField2D& u, int J);

/// Schwarz symmetrization: the radially nonincreasing profile on the
/// equal-measure ball equimeasurable with u (u >= 0).
RadialProfile schwarz(const ScalarField2D& u, int samples = 1024);

struct ShellRearrangement {
    RadialProfile g_k;      // per-shell equimeasurable rearrangement
    RadialProfile g_lower;  // envelope below g_k
    RadialProfile g_upper;  // envelope above g_k
    int shells = 0;
    std::vector<double> shell_volume;    // realized psi-shell volumes (== window volumes)
    std::vector<double> shell_integral;  // int of g over each realized psi-shell
};

/// Equimeasurable shell rearrangement: radii r_i = i R*/(k+1) with inner
/// pivot r_{i+1/2} = ((r_i^n + r_{i+1}^n)/2)^{1/n}; within each shell g_k is
/// the measure-preserving rearrangement of g over the matching psi-shell,
/// nondecreasing toward the pivot and nonincreasing after it. The psi-shells
/// are cut from the psi-sorted cells at the exact window volumes (straddling
/// cells contribute fractionally to both sides), so each shell's measure
/// matches its radial window and the per-shell integrals carry over. The
/// envelopes satisfy g_lower <= g_k <= g_upper and stay within
/// [min g, max g].
ShellRearrangement shell_rearrangement(const ScalarField2D& g, const ScalarField2D& psi,
                                       const LevelSetTable& table, int k, int samples = 2048);

/// g_hat(rho(a)) = S_g(a) / S_1(a).
RadialProfile hat_g(const ScalarField2D& g, const ScalarField2D& psi, const LevelSetTable& table,
                    int samples = 1024);

/// Potential with prescribed distribution function (mu in F_{alpha,beta}(m)):
/// phi = torsion of the domain, V(x) = sup{s : mu(s) > |Omega_{phi(x)}|}.
ScalarField2D potential_from_distribution(const DistFn& mu, GridPtr grid);

}  // namespace eigensymm
