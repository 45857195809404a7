#include "eigensymm/rearrange.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "eigensymm/geometry.hpp"

namespace eigensymm {

double LevelSetTable::bin_radius(int j) const {
    const double vmid = 0.5 * (supervolume[j] + supervolume[j + 1]);
    return std::pow(vmid / alpha_n(n), 1.0 / n);
}

namespace {

// Interpolate (supervolume[j], y[j]) at a query volume. Working in the
// volume coordinate keeps the interpolation exact to leading order near the
// center, where superlevel integrals vanish linearly in the volume.
double interp_by_volume(const std::vector<double>& vol, const std::vector<double>& y, double q) {
    const int K = static_cast<int>(vol.size()) - 1;
    if (q >= vol[0]) return y[0];
    if (q <= vol[K]) return y[K];
    int lo = 0, hi = K;  // vol is nonincreasing in j
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (vol[mid] > q)
            lo = mid;
        else
            hi = mid;
    }
    const double v0 = vol[lo], v1 = vol[hi];
    if (v0 <= v1) return y[hi];
    const double w = (v0 - q) / (v0 - v1);
    return y[lo] + w * (y[hi] - y[lo]);
}

}  // namespace

double LevelSetTable::rho_inverse(double r) const {
    return interp_by_volume(supervolume, level, alpha_n(n) * std::pow(r, n));
}

double LevelSetTable::flux_at_radius(double r) const {
    return interp_by_volume(supervolume, flux, alpha_n(n) * std::pow(r, n));
}

LevelSetTable build_level_table(const ScalarField2D& psi, const ScalarField2D& Lam,
                                const ScalarField2D& omega, const ScalarField2D& Vneg,
                                const MatrixField2D& A, int K) {
    if (K < 8) throw std::invalid_argument("build_level_table: need K >= 8 levels");
    const Grid2D& g = psi.grid();
    const double M = psi.max_masked();
    if (!(M > 0.0)) throw std::invalid_argument("build_level_table: max psi must be positive");
    if (!(Lam.min_masked() > 0.0))
        throw std::invalid_argument("build_level_table: Lam must be positive");

    LevelSetTable t;
    t.n = 2;
    t.M = M;
    t.domain_measure = g.masked_measure();
    t.Rstar = equal_measure_ball_radius(t.domain_measure, t.n);

    t.level.resize(K + 1);
    for (int j = 0; j <= K; ++j) t.level[j] = M * j / K;
    const double da = M / K;

    t.mass_one.assign(K, 0.0);
    t.mass_invLam.assign(K, 0.0);
    t.mass_om2invLam.assign(K, 0.0);
    t.mass_Vneg.assign(K, 0.0);
    t.mass_gradpsi.assign(K, 0.0);

    std::vector<double> count_above(K + 1, 0.0), flux_above(K + 1, 0.0);

    const ScalarField2D divpsi = div_A_grad(A, psi);
    const ScalarField2D gmag = gradient(psi).magnitude();
    const double area = g.cell_area();

    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j)) continue;
            const double p = psi(i, j);
            if (!(p > 0.0)) continue;  // psi >= 0 with zero boundary data
            // bin (level[b], level[b+1]] containing p
            int b = static_cast<int>(std::ceil(p / da)) - 1;
            b = std::clamp(b, 0, K - 1);
            t.mass_one[b] += area;
            t.mass_invLam[b] += area / Lam(i, j);
            t.mass_om2invLam[b] += area * omega(i, j) * omega(i, j) / Lam(i, j);
            t.mass_Vneg[b] += area * Vneg(i, j);
            t.mass_gradpsi[b] += area * gmag(i, j);
            // cell lies in every superlevel Omega_{level[s]} with s <= b
            count_above[b] += area;
            flux_above[b] += area * divpsi(i, j);
        }
    }
    // suffix sums: a cell in bin b satisfies level[b] < psi <= level[b+1], so
    // it belongs to every superlevel Omega_{level[s]} with s <= b
    t.supervolume.assign(K + 1, 0.0);
    t.flux.assign(K + 1, 0.0);
    double va = 0.0, fa = 0.0;
    for (int j = K; j >= 0; --j) {
        t.supervolume[j] = va;
        t.flux[j] = fa;
        if (j > 0) {
            va += count_above[j - 1];
            fa += flux_above[j - 1];
        }
    }
    // the a=0 superlevel is the whole masked region
    t.supervolume[0] = t.domain_measure;

    t.rho.resize(K + 1);
    for (int j = 0; j <= K; ++j)
        t.rho[j] = std::pow(t.supervolume[j] / alpha_n(t.n), 1.0 / t.n);
    return t;
}

namespace {

// Sample points (bin mid-shell radius, value) for nonempty bins; near-empty
// bins are skipped, which merges them into their neighbors through the
// piecewise-linear resample.
std::vector<std::pair<double, double>> bin_samples(const LevelSetTable& t,
                                                   const std::vector<double>& num,
                                                   const std::vector<double>& den) {
    std::vector<std::pair<double, double>> pts;
    const double tiny = 0.0;
    for (int j = 0; j < t.bins(); ++j) {
        if (den[j] > tiny && t.mass_one[j] > tiny)
            pts.emplace_back(t.bin_radius(j), num[j] / den[j]);
    }
    if (pts.empty()) throw std::runtime_error("rearrange: all level bins are empty");
    return pts;
}

}  // namespace

RadialProfile hat_lambda(const LevelSetTable& t, int samples) {
    return RadialProfile::from_samples(t.Rstar, bin_samples(t, t.mass_one, t.mass_invLam),
                                       samples);
}

std::pair<RadialProfile, RadialProfile> tilde_psi(const LevelSetTable& t,
                                                  const RadialProfile& Lam_hat,
                                                  double* max_positive_F) {
    const int m = static_cast<int>(Lam_hat.values.size()) - 1;
    const double h = t.Rstar / m;
    const double c = t.n * alpha_n(t.n);
    std::vector<double> F(m + 1, 0.0);
    double maxpos = 0.0;
    for (int i = 1; i <= m; ++i) {
        const double r = i * h;
        F[i] = t.flux_at_radius(r) / (c * std::pow(r, t.n - 1) * Lam_hat.eval(r));
        maxpos = std::max(maxpos, F[i]);
    }
    if (max_positive_F) *max_positive_F = std::max(0.0, maxpos);
    std::vector<double> psi(m + 1, 0.0);
    for (int i = m - 1; i >= 0; --i) psi[i] = psi[i + 1] - 0.5 * h * (F[i] + F[i + 1]);
    return {RadialProfile(t.Rstar, std::move(F)), RadialProfile(t.Rstar, std::move(psi))};
}

std::pair<RadialProfile, RadialProfile> hat_drift_potential(const LevelSetTable& t, int samples) {
    std::vector<std::pair<double, double>> vp, Vp;
    for (int j = 0; j < t.bins(); ++j) {
        if (t.mass_one[j] <= 0.0) continue;
        const double r = t.bin_radius(j);
        if (t.mass_invLam[j] > 0.0)
            vp.emplace_back(r, std::sqrt(t.mass_om2invLam[j] / t.mass_invLam[j]));
        Vp.emplace_back(r, -t.mass_Vneg[j] / t.mass_one[j]);
    }
    if (vp.empty() || Vp.empty()) throw std::runtime_error("rearrange: empty level bins");
    return {RadialProfile::from_samples(t.Rstar, std::move(vp), samples),
            RadialProfile::from_samples(t.Rstar, std::move(Vp), samples)};
}

RadialProfile weight_U(const RadialProfile& Lam_hat, const RadialProfile& v_hat) {
    const int m = static_cast<int>(Lam_hat.values.size()) - 1;
    const double R = Lam_hat.R;
    const double h = R / m;
    std::vector<double> U(m + 1, 0.0);
    for (int i = 1; i <= m; ++i) {
        const double r0 = (i - 1) * h, r1 = i * h;
        const double f0 = v_hat.eval(r0) / Lam_hat.eval(r0);
        const double f1 = v_hat.eval(r1) / Lam_hat.eval(r1);
        U[i] = U[i - 1] + 0.5 * h * (f0 + f1);
    }
    return RadialProfile(R, std::move(U));
}

RearrangedData build_rearrangement(const LevelSetTable& table, int samples) {
    RearrangedData d;
    d.Lam_hat = hat_lambda(table, samples);
    auto [F, pt] = tilde_psi(table, d.Lam_hat, &d.max_positive_F);
    d.F = std::move(F);
    d.psi_tilde = std::move(pt);
    auto [vh, Vh] = hat_drift_potential(table, samples);
    d.v_hat = std::move(vh);
    d.V_hat = std::move(Vh);
    d.U = weight_U(d.Lam_hat, d.v_hat);
    return d;
}

bool ComparisonReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

CheckEntry& ComparisonReport::add(std::string name, double value, double margin,
                                  double tolerance) {
    checks.push_back(CheckEntry{std::move(name), value, margin, tolerance,
                                margin >= -tolerance});
    return checks.back();
}

namespace {

double radial_integral(const LevelSetTable& t, int m,
                       const std::function<double(double)>& f) {
    const double h = t.Rstar / m;
    const double c = t.n * alpha_n(t.n);
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
        const double r0 = i * h, r1 = (i + 1) * h;
        s += 0.5 * h *
             (c * std::pow(r0, t.n - 1) * f(r0) + c * std::pow(r1, t.n - 1) * f(r1));
    }
    return s;
}

}  // namespace

ComparisonReport verify_report(const RearrangedData& d, const LevelSetTable& t,
                               const ScalarField2D& psi, const MatrixField2D& A,
                               const ScalarField2D& omega, const ScalarField2D& Vfield,
                               double omega0, double mu) {
    const auto t_start = std::chrono::steady_clock::now();
    ComparisonReport rep;
    const Grid2D& g = psi.grid();
    const int K = t.bins();
    const VectorField2D grad = gradient(psi);
    const ScalarField2D gmag = grad.magnitude();
    const double grad_sup = gmag.max_masked();
    const double tol_pt = 5.0 * std::max(g.hx(), g.hy()) * grad_sup;

    // (i) pointwise inequality psi_tilde(rho(a)) >= a at every level edge
    double min_margin = std::numeric_limits<double>::infinity();
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= K; ++j) {
        const double a = t.level[j];
        const double pt = d.psi_tilde.eval(t.rho[j]);
        min_margin = std::min(min_margin, pt - a);
        if (a > 0.0 && a <= 0.5 * t.M) min_ratio = std::min(min_ratio, pt / a);
    }
    rep.pointwise_min_margin = min_margin;
    rep.empirical_eta_ratio = min_ratio;
    rep.add("pointwise_level_margin", min_margin, min_margin, tol_pt);
    if (!g.domain().is_ball())
        rep.add("empirical_eta_ratio_gt1", min_ratio, min_ratio - 1.0, 0.0);

    // (ii) level-set isoperimetry, integrated over groups of bins:
    // int_bin i(a) da >= n alpha_n int_bin rho(a)^{n-1} da. Single bins can be
    // thinner than a cell, so they are aggregated until the cell-count noise
    // is subdominant.
    const double da = t.bin_width();
    const double c_n = t.n * alpha_n(t.n);
    const int group = std::max(1, K / 8);
    double min_isop = std::numeric_limits<double>::infinity();
    for (int j0 = 0; j0 < K; j0 += group) {
        double lhs = 0.0, rhs = 0.0, cells = 0.0;
        for (int j = j0; j < std::min(K, j0 + group); ++j) {
            lhs += t.mass_gradpsi[j];
            rhs += c_n * da * 0.5 *
                   (std::pow(t.rho[j], t.n - 1) + std::pow(t.rho[j + 1], t.n - 1));
            cells += t.mass_one[j];
        }
        if (cells < 32.0 * g.cell_area() || rhs <= 0.0) continue;  // sub-resolution
        min_isop = std::min(min_isop, lhs / rhs - 1.0);
    }
    if (!std::isfinite(min_isop)) min_isop = 0.0;  // nothing resolved: vacuous
    rep.add("level_isoperimetry_min_margin", min_isop, min_isop, 0.02);

    // (iii) conservation of the co-area integrals
    double int_invLam = 0.0, int_om2 = 0.0;
    for (int j = 0; j < K; ++j) {
        int_invLam += t.mass_invLam[j];
        int_om2 += t.mass_om2invLam[j];
    }
    const int mprof = static_cast<int>(d.Lam_hat.values.size()) - 1;
    const double star_invLam =
        radial_integral(t, mprof, [&](double r) { return 1.0 / d.Lam_hat.eval(r); });
    const double res_Lam = std::abs(star_invLam - int_invLam) / std::max(int_invLam, 1e-300);
    rep.add("conservation_intLambda_relres", res_Lam, 5e-3 - res_Lam, 0.0);
    if (int_om2 > 0.0) {
        const double star_om2 = radial_integral(t, mprof, [&](double r) {
            const double v = d.v_hat.eval(r);
            return v * v / d.Lam_hat.eval(r);
        });
        const double res_v = std::abs(star_om2 - int_om2) / int_om2;
        rep.add("conservation_intv2_relres", res_v, 5e-3 - res_v, 0.0);
    }

    // (iv) gradient comparisons
    double lhsA = 0.0, lhs1 = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j)) continue;
            const double gx = grad.x(i, j), gy = grad.y(i, j);
            lhsA += A.a11(i, j) * gx * gx + 2.0 * A.a12(i, j) * gx * gy +
                    A.a22(i, j) * gy * gy;
            lhs1 += gmag(i, j);
        }
    lhsA *= g.cell_area();
    lhs1 *= g.cell_area();
    const double rhsA = radial_integral(t, mprof, [&](double r) {
        const double f = d.F.eval(r);
        return d.Lam_hat.eval(r) * f * f;
    });
    const double rhs1 =
        radial_integral(t, mprof, [&](double r) { return std::abs(d.F.eval(r)); });
    rep.add("gradient_L2_comparison", rhsA - lhsA, (rhsA - lhsA) / std::max(lhsA, 1e-300), 0.01);
    rep.add("gradient_L1_comparison", rhs1 - lhs1, (rhs1 - lhs1) / std::max(lhs1, 1e-300), 0.01);

    // F sign (Lemma 3.3): positive F is a violation, reported with magnitude
    rep.add("F_nonpositive_maxpos", d.max_positive_F,
            1e-9 * std::max(1.0, d.F.max() - d.F.min()) - d.max_positive_F, 0.0);

    // (v) weighted integral inequality for (omega0, mu), when mu >= 0
    if (mu >= 0.0) {
        const double lhs = radial_integral(t, mprof, [&](double r) {
            const double f = d.F.eval(r);
            const double pt = d.psi_tilde.eval(r);
            return (d.Lam_hat.eval(r) * f * f - omega0 * std::abs(f) * pt +
                    d.V_hat.eval(r) * pt * pt) *
                   std::exp(-d.U.eval(r));
        });
        const double rhs = mu * radial_integral(t, mprof, [&](double r) {
            const double pt = d.psi_tilde.eval(r);
            return pt * pt * std::exp(-d.U.eval(r));
        });
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        rep.add("weighted_integral_inequality", rhs - lhs, (rhs - lhs) / scale, 0.01);

        // discrete hypothesis of the integral corollary, away from the
        // boundary band where the stencils differ
        const ScalarField2D divpsi = div_A_grad(A, psi);
        double hyp_max = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                if (!g.masked(i, j) || !g.masked(i - 1, j) || !g.masked(i + 1, j) ||
                    !g.masked(i, j - 1) || !g.masked(i, j + 1))
                    continue;
                const double lhs_pt = -divpsi(i, j) - omega(i, j) * gmag(i, j) -
                                      omega0 * gmag(i, j) + Vfield(i, j) * psi(i, j) -
                                      mu * psi(i, j);
                hyp_max = std::max(hyp_max, lhs_pt);
            }
        if (std::isfinite(hyp_max))
            rep.add("integral_hypothesis_interior", hyp_max, -hyp_max,
                    0.05 * std::max(1.0, std::abs(mu)) * psi.max_masked());
    }

    rep.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

ComparisonReport compare_eigenvalues(GridPtr grid, const MatrixField2D& A,
                                     const ScalarField2D& Lam, const VectorField2D& v,
                                     const ScalarField2D& V, const CompareOptions& opts,
                                     RearrangedData* out_data, LevelSetTable* out_table) {
    const auto t_start = std::chrono::steady_clock::now();
    const Grid2D& g = *grid;

    // admissibility: A >= Lam Id pointwise
    const ScalarField2D lamA = lambda_of_A(A);
    double adm = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) adm = std::min(adm, lamA(i, j) - Lam(i, j));

    Operator2D op = assemble(grid, A, v, V);
    EigenResult eig = principal_eigenpair(op, opts.eigen);
    if (eig.lambda1 < 0.0)
        throw std::runtime_error(
            "compare_eigenvalues: lambda_1 < 0; the comparison requires a nonnegative "
            "principal eigenvalue");

    const ScalarField2D omega = v.magnitude();
    ScalarField2D Vneg(grid);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) Vneg(i, j) = std::max(0.0, -V(i, j));

    LevelSetTable table = build_level_table(eig.phi, Lam, omega, Vneg, A, opts.levels);
    RearrangedData data = build_rearrangement(table, opts.profile_samples);

    RadialOptions ropts;
    ropts.m = opts.radial_m;
    ropts.validate_monotone = false;  // V_hat varies with r in general
    RadialEigenResult star =
        radial_eigenpair(table.n, table.Rstar, data.Lam_hat, data.v_hat, data.V_hat, ropts);

    ComparisonReport rep = verify_report(data, table, eig.phi, A, omega, V, 0.0, eig.lambda1);
    rep.lambda_omega = eig.lambda1;
    rep.lambda_star = star.lambda1;

    rep.add("admissibility_A_ge_Lam", adm, adm, 1e-12);

    const double tol_cmp = opts.tol_compare_rel * std::max(1.0, std::abs(eig.lambda1));
    rep.add("lambda_star_le_lambda1", star.lambda1, eig.lambda1 - star.lambda1, tol_cmp);

    // coefficient bounds carried by the rearrangement
    const double lam_lo = Lam.min_masked(), lam_hi = Lam.max_masked();
    const double span = std::max(1e-12, lam_hi - lam_lo) * 1e-6 + 1e-12;
    rep.add("bounds_Lam_hat_lower", data.Lam_hat.min(), data.Lam_hat.min() - lam_lo, span);
    rep.add("bounds_Lam_hat_upper", data.Lam_hat.max(), lam_hi - data.Lam_hat.max(), span);
    const double om_hi = omega.max_masked();
    rep.add("bounds_v_hat_sup", data.v_hat.max(), om_hi - data.v_hat.max(),
            1e-6 * std::max(1.0, om_hi));
    const double Vinf = std::max(std::abs(V.min_masked()), std::abs(V.max_masked()));
    rep.add("bounds_V_hat_lower", data.V_hat.min(), data.V_hat.min() + Vinf,
            1e-6 * std::max(1.0, Vinf));
    rep.add("bounds_V_hat_nonpositive", data.V_hat.max(), -data.V_hat.max(), 1e-12);

    rep.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (out_data) *out_data = data;
    if (out_table) *out_table = table;
    return rep;
}

}  // namespace eigensymm
