#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eigensymm/fields.hpp"
#include "eigensymm/geometry.hpp"
#include "eigensymm/rearrange.hpp"

namespace eigensymm {

/// Portable deterministic generator (64-bit LCG, MMIX constants); identical
/// streams on every platform for a fixed seed.
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next_u64() {
        state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
        return state_;
    }
    double next_unit() {  // uniform in [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    std::uint64_t state_;
};

/// Coefficient recipe: constant, radial formula, or band-limited random
/// (8 trigonometric modes, coefficients from the seeded LCG, post-shifted to
/// the declared bounds).
struct CoeffRecipe {
    enum class Kind { Constant, Radial, Random } kind = Kind::Constant;
    double value = 0.0;             // Constant
    double base = 1.0, amp = 0.0;   // Radial: base + amp * (r / Rbox)
    double lo = 0.0, hi = 1.0;      // Random bounds
};

struct DriftRecipe {
    enum class Kind { Zero, RadialOutward, Random } kind = Kind::Zero;
    double amplitude = 0.0;  // RadialOutward: amplitude * e_r; Random: sup bound
};

struct MatrixRecipe {
    enum class Kind { Identity, LambdaPlus } kind = Kind::Identity;
    double scale = 1.0;     // Identity
    double extra = 0.0;     // LambdaPlus: random nonnegative diagonal excess up to extra
    double offdiag = 0.0;   // LambdaPlus: a12 bounded by offdiag (kept admissible)
};

struct Scenario {
    std::string name = "scenario";
    std::string task = "compare";  // rfk | symmetrize | compare | extremal | asympt | distcheck
    DomainSpec domain = DomainSpec::disk(1.0);
    int grid_n = 256;
    int levels = 200;
    std::uint64_t seed = 1;

    CoeffRecipe Lambda{};
    MatrixRecipe A{};
    DriftRecipe v{};
    CoeffRecipe V{};
    CoeffRecipe w1{};

    // constraint tuple
    double tau1 = 0.0;
    double tau2 = 0.0;
    int p = 1;
    double det_omega = 1.0;
    double sigma = 2.0;
    // prescribed distribution for distcheck tasks: mu(t) = frac * |Omega| on
    // [t_j, t_{j+1}); defaults to the two-step {0.3: 0.45, 0.7: 0}
    std::vector<double> mu_thresholds = {0.3, 0.7};
    std::vector<double> mu_fractions = {0.45, 0.0};

    // asymptotics controls
    double asympt_m = 2.0;
    std::vector<double> asympt_taus = {10.0, 15.0, 20.0, 25.0};
    std::vector<double> gn_taus = {0.0, 5.0, 10.0};
    double remlp_p = 1.5;
    double remlp_tau = 24.0;
    std::vector<double> remlp_amps = {50.0, 100.0, 200.0};
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

struct ScenarioFields {
    GridPtr grid;
    ScalarField2D Lambda;
    MatrixField2D A;
    VectorField2D v;
    ScalarField2D V;
    ScalarField2D w1;
};

/// Realize the recipes on the scenario grid; seed-deterministic, with the
/// declared admissibility checks (A >= Lambda Id, |v| <= tau1 where claimed).
ScenarioFields build_fields(const Scenario& s);

/// lambda_1 >= m_V + sqrt(lambda_1(Omega)) * max(0, m_Lam sqrt(lambda_1(Omega)) - M_v).
double apriori_lower_bound(double m_V, double m_Lambda, double M_v, double lambda1_Omega);

struct ScenarioReport {
    std::string name;
    std::string task;
    ComparisonReport body;
    std::map<std::string, double> scalars;
    // side outputs written by write_report: <name>_<tag>.csv / <name>_<tag>.field
    std::vector<std::pair<std::string, std::string>> csv_blobs;
    std::vector<std::pair<std::string, std::string>> field_blobs;
};

ScenarioReport run_scenario(const Scenario& s);

/// JSON report + CSV tables into the output directory; returns file paths.
std::vector<std::string> write_report(const ScenarioReport& report, const std::string& out_dir);

/// Batch runner: scenario parallelism capped by EIGENSYMM_THREADS (default 1).
/// Returns true when every asserted flag passes.
bool run_batch(const std::vector<Scenario>& scenarios, const std::string& out_dir);

}  // namespace eigensymm
