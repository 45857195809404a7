#include "eigensymm/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "eigensymm/elliptic.hpp"
#include "eigensymm/geometry.hpp"

namespace eigensymm {

double DistFn::eval(double t) const {
    if (thresholds.empty()) return 0.0;
    if (t < thresholds.front()) return total;
    // largest j with thresholds[j] <= t (right-continuous steps)
    const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), t);
    return values[static_cast<std::size_t>(it - thresholds.begin()) - 1];
}

bool DistFn::nonincreasing() const {
    for (std::size_t j = 1; j < values.size(); ++j)
        if (values[j] > values[j - 1] + 1e-12 * std::max(1.0, total)) return false;
    return values.empty() || values.front() <= total + 1e-12 * std::max(1.0, total);
}

namespace {

DistFn distribution_from_pairs(std::vector<std::pair<double, double>> vw, int J) {
    if (J < 2) throw std::invalid_argument("distribution_function: need J >= 2 thresholds");
    if (vw.empty()) throw std::invalid_argument("distribution_function: empty field");
    double lo = vw[0].first, hi = vw[0].first, total = 0.0;
    for (const auto& [v, w] : vw) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        total += w;
    }
    DistFn d;
    d.total = total;
    d.thresholds.resize(J);
    d.values.assign(J, 0.0);
    for (int j = 0; j < J; ++j) d.thresholds[j] = lo + (hi - lo) * j / (J - 1);
    std::sort(vw.begin(), vw.end());
    // suffix mass of values strictly above each threshold
    std::vector<double> suffix(vw.size() + 1, 0.0);
    for (std::size_t i = vw.size(); i-- > 0;) suffix[i] = suffix[i + 1] + vw[i].second;
    for (int j = 0; j < J; ++j) {
        const auto it = std::upper_bound(
            vw.begin(), vw.end(), std::make_pair(d.thresholds[j],
                                                 std::numeric_limits<double>::infinity()));
        d.values[j] = suffix[static_cast<std::size_t>(it - vw.begin())];
    }
    return d;
}

std::vector<std::pair<double, double>> cell_values_fraction(const ScalarField2D& u) {
    const Grid2D& g = u.grid();
    std::vector<std::pair<double, double>> vw;
    vw.reserve(g.size());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double f = g.interior_fraction(i, j);
            if (f <= 0.0) continue;
            vw.emplace_back(g.masked(i, j) ? u(i, j) : 0.0, f * g.cell_area());
        }
    return vw;
}

std::vector<std::pair<double, double>> cell_values_masked(const ScalarField2D& u) {
    const Grid2D& g = u.grid();
    std::vector<std::pair<double, double>> vw;
    vw.reserve(g.interior_count());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) vw.emplace_back(u(i, j), g.cell_area());
    return vw;
}

}  // namespace

DistFn distribution_function(const ScalarField2D& u, int J) {
    return distribution_from_pairs(cell_values_fraction(u), J);
}

DistFn distribution_function_masked(const ScalarField2D& u, int J) {
    return distribution_from_pairs(cell_values_masked(u), J);
}

RadialProfile schwarz(const ScalarField2D& u, int samples) {
    auto vw = cell_values_fraction(u);
    double total = 0.0;
    for (const auto& [v, w] : vw) total += w;
    const int n = 2;
    const double Rstar = equal_measure_ball_radius(total, n);
    std::sort(vw.begin(), vw.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> cum(vw.size() + 1, 0.0);
    for (std::size_t i = 0; i < vw.size(); ++i) cum[i + 1] = cum[i] + vw[i].second;

    std::vector<double> out(samples + 1, 0.0);
    for (int s = 0; s <= samples; ++s) {
        const double r = Rstar * s / samples;
        const double vol = alpha_n(n) * std::pow(r, n);
        // largest value v with |{u > v}| >= vol: walk to cumulative volume vol
        const auto it = std::lower_bound(cum.begin() + 1, cum.end(), vol - 1e-15 * total);
        const std::size_t idx = std::min(static_cast<std::size_t>(it - cum.begin() - 1),
                                         vw.size() - 1);
        out[s] = vw[idx].first;
    }
    return RadialProfile(Rstar, std::move(out));
}

namespace {

// Piecewise-constant min/max per segment with smoothstep junction ramps,
// placed on whichever side keeps the envelope on the correct side of g_k.
std::vector<double> mollified_envelope(const std::vector<double>& gk,
                                       const std::vector<std::size_t>& seg_start, double dr,
                                       double width, bool lower) {
    const std::size_t n = gk.size();
    const std::size_t nseg = seg_start.size() - 1;  // seg_start.back() == n
    std::vector<double> segval(nseg);
    for (std::size_t p = 0; p < nseg; ++p) {
        double v = gk[seg_start[p]];
        for (std::size_t s = seg_start[p]; s < seg_start[p + 1]; ++s)
            v = lower ? std::min(v, gk[s]) : std::max(v, gk[s]);
        segval[p] = v;
    }
    std::vector<double> env(n);
    for (std::size_t p = 0; p < nseg; ++p)
        for (std::size_t s = seg_start[p]; s < seg_start[p + 1]; ++s) env[s] = segval[p];

    const int wsamp = std::max(1, static_cast<int>(std::lround(width / dr)));
    auto smooth = [](double x) { return x <= 0 ? 0.0 : x >= 1 ? 1.0 : x * x * (3 - 2 * x); };
    for (std::size_t p = 0; p + 1 < nseg; ++p) {
        const std::size_t jn = seg_start[p + 1];
        const double a = segval[p], b = segval[p + 1];
        if (a == b) continue;
        const bool ramp_before = lower ? (b < a) : (b > a);
        if (ramp_before) {
            // blend inside segment p, ending at the junction with value b
            for (int q = 0; q <= wsamp; ++q) {
                const std::size_t s = jn - std::min<std::size_t>(jn, static_cast<std::size_t>(q));
                if (s < seg_start[p]) break;
                const double w = smooth(1.0 - static_cast<double>(q) / wsamp);
                env[s] = a + (b - a) * w;
            }
        } else {
            // blend inside segment p+1, starting at the junction with value a
            for (int q = 0; q < wsamp; ++q) {
                const std::size_t s = jn + static_cast<std::size_t>(q);
                if (s >= seg_start[p + 2 <= nseg ? p + 2 : nseg] || s >= n) break;
                const double w = smooth(static_cast<double>(q) / wsamp);
                env[s] = a + (b - a) * w;
            }
        }
    }
    return env;
}

}  // namespace

ShellRearrangement shell_rearrangement(const ScalarField2D& g, const ScalarField2D& psi,
                                       const LevelSetTable& table, int k, int samples) {
    if (k < 1) throw std::invalid_argument("shell_rearrangement: k >= 1 shells required");
    const Grid2D& gr = g.grid();
    const int n = table.n;
    const double R = table.Rstar;
    const double an = alpha_n(n);

    std::vector<double> radii(k + 2);
    for (int i = 0; i <= k + 1; ++i) radii[i] = R * i / (k + 1);

    // psi-descending order; shell s = 0 is the innermost (largest psi)
    std::vector<std::pair<double, double>> ordered;  // (psi, g)
    ordered.reserve(gr.interior_count());
    for (int j = 0; j < gr.ny(); ++j)
        for (int i = 0; i < gr.nx(); ++i) {
            if (!gr.masked(i, j)) continue;
            if (!(psi(i, j) > 0.0)) continue;
            ordered.emplace_back(psi(i, j), g(i, j));
        }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    // cut at the exact window volumes; the straddling cell is split so the
    // realized shell measure equals alpha_n (r_{s+1}^n - r_s^n)
    struct SortedShell {
        std::vector<std::pair<double, double>> vw;  // (value, weight), descending value
        std::vector<double> cum;
        double vol = 0.0;
        double integral = 0.0;
    };
    std::vector<SortedShell> ss(k + 1);
    const double area = gr.cell_area();
    std::size_t pos = 0;
    double frac_left = ordered.empty() ? 0.0 : area;  // unassigned part of cell `pos`
    for (int s = 0; s <= k; ++s) {
        double want = an * (std::pow(radii[s + 1], n) - std::pow(radii[s], n));
        auto& S = ss[s];
        while (want > 1e-15 * area && pos < ordered.size()) {
            const double take = std::min(want, frac_left);
            S.vw.emplace_back(ordered[pos].second, take);
            want -= take;
            frac_left -= take;
            if (frac_left <= 1e-15 * area) {
                ++pos;
                frac_left = area;
            }
        }
        if (S.vw.empty())
            throw std::runtime_error("shell_rearrangement: degenerate shell (zero measure)");
        std::sort(S.vw.begin(), S.vw.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        S.cum.assign(S.vw.size() + 1, 0.0);
        for (std::size_t i = 0; i < S.vw.size(); ++i) {
            S.cum[i + 1] = S.cum[i] + S.vw[i].second;
            S.integral += S.vw[i].first * S.vw[i].second;
        }
        S.vol = S.cum.back();
    }

    const double dr = R / samples;
    std::vector<double> gk(samples + 1);
    std::vector<std::size_t> seg_start;
    const int segs_per_shell = 8;
    for (int idx = 0; idx <= samples; ++idx) {
        const double r = idx * dr;
        int s = std::min(static_cast<int>(r / (R / (k + 1))), k);
        const double r0 = radii[s], r1 = radii[s + 1];
        const double pivot = std::pow(0.5 * (std::pow(r0, n) + std::pow(r1, n)), 1.0 / n);
        const double q = 2.0 * an * std::abs(std::pow(pivot, n) - std::pow(r, n));
        const auto& S = ss[s];
        const double qq = std::min(q, S.vol);
        const auto it = std::lower_bound(S.cum.begin() + 1, S.cum.end(), qq - 1e-15 * S.vol);
        const std::size_t c = std::min(static_cast<std::size_t>(it - S.cum.begin() - 1),
                                       S.vw.size() - 1);
        gk[idx] = S.vw[c].first;
    }
    for (int s = 0; s <= k; ++s)
        for (int p = 0; p < segs_per_shell; ++p) {
            const double r = radii[s] + (radii[s + 1] - radii[s]) * p / segs_per_shell;
            seg_start.push_back(static_cast<std::size_t>(std::lround(r / dr)));
        }
    seg_start.push_back(samples + 1);
    std::sort(seg_start.begin(), seg_start.end());
    seg_start.erase(std::unique(seg_start.begin(), seg_start.end()), seg_start.end());

    const double width = (R / (k + 1)) / 8.0;
    ShellRearrangement out;
    out.shells = k;
    out.g_k = RadialProfile(R, gk);
    out.g_lower = RadialProfile(R, mollified_envelope(gk, seg_start, dr, width, true));
    out.g_upper = RadialProfile(R, mollified_envelope(gk, seg_start, dr, width, false));
    for (const auto& S : ss) {
        out.shell_volume.push_back(S.vol);
        out.shell_integral.push_back(S.integral);
    }
    return out;
}

RadialProfile hat_g(const ScalarField2D& g, const ScalarField2D& psi, const LevelSetTable& table,
                    int samples) {
    const Grid2D& gr = g.grid();
    const int K = table.bins();
    const double da = table.bin_width();
    std::vector<double> mass_g(K, 0.0);
    for (int j = 0; j < gr.ny(); ++j)
        for (int i = 0; i < gr.nx(); ++i) {
            if (!gr.masked(i, j)) continue;
            const double p = psi(i, j);
            if (!(p > 0.0)) continue;
            int b = static_cast<int>(std::ceil(p / da)) - 1;
            b = std::clamp(b, 0, K - 1);
            mass_g[b] += g(i, j) * gr.cell_area();
        }
    std::vector<std::pair<double, double>> pts;
    for (int j = 0; j < K; ++j)
        if (table.mass_one[j] > 0.0)
            pts.emplace_back(table.bin_radius(j), mass_g[j] / table.mass_one[j]);
    if (pts.empty()) throw std::runtime_error("hat_g: empty level bins");
    return RadialProfile::from_samples(table.Rstar, std::move(pts), samples);
}

ScalarField2D potential_from_distribution(const DistFn& mu, GridPtr grid) {
    if (!mu.nonincreasing())
        throw std::invalid_argument("potential_from_distribution: mu must be nonincreasing");
    const Grid2D& g = *grid;
    const MeasureResult mr = measure(g.domain(), g);
    if (std::abs(mu.total - mr.grid_area) > 0.01 * mr.grid_area)
        throw std::invalid_argument(
            "potential_from_distribution: mu total mass does not match the domain measure");

    const ScalarField2D phi = torsion_function(grid, MatrixField2D::identity(grid));

    // superlevel volume of phi at each cell's own level, by descending sort
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(g.interior_count());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) order.emplace_back(phi(i, j), g.index(i, j));
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    ScalarField2D V(grid);
    const double area = g.cell_area();
    std::size_t pos = 0;
    double vol_strictly_above = 0.0;
    while (pos < order.size()) {
        std::size_t end = pos;
        while (end < order.size() && order[end].first == order[pos].first) ++end;
        const double w = vol_strictly_above;
        // V(x) = sup{s : mu(s) > w}: the first threshold with mu(t) <= w
        // (mu is nonincreasing, so lower_bound with a descending comparator)
        const auto it = std::lower_bound(mu.values.begin(), mu.values.end(), w,
                                         [](double a, double b) { return a > b; });
        const double val = it == mu.values.end()
                               ? mu.thresholds.back()
                               : mu.thresholds[static_cast<std::size_t>(it - mu.values.begin())];
        for (std::size_t q = pos; q < end; ++q) V.data()[order[q].second] = val;
        vol_strictly_above += area * static_cast<double>(end - pos);
        pos = end;
    }
    return V;
}

}  // namespace eigensymm
