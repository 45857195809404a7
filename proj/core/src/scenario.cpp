#include "eigensymm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "eigensymm/asymptotics.hpp"
#include "eigensymm/distribution.hpp"
#include "eigensymm/elliptic.hpp"
#include "eigensymm/extremal.hpp"
#include "eigensymm/radial.hpp"

namespace eigensymm {

using nlohmann::json;

namespace {

DomainSpec parse_domain(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    Point c{};
    if (j.contains("center")) {
        c.x = j["center"][0].get<double>();
        c.y = j["center"][1].get<double>();
    }
    if (type == "disk") return DomainSpec::disk(j.at("radius").get<double>(), c);
    if (type == "ellipse")
        return DomainSpec::ellipse(j.at("a").get<double>(), j.at("b").get<double>(), c);
    if (type == "rectangle")
        return DomainSpec::rectangle(j.at("lx").get<double>(), j.at("ly").get<double>(), c);
    if (type == "stadium")
        return DomainSpec::stadium(j.at("len").get<double>(), j.at("rad").get<double>(), c);
    if (type == "polygon") {
        std::vector<Point> vs;
        for (const auto& p : j.at("vertices")) vs.push_back({p[0].get<double>(), p[1].get<double>()});
        return DomainSpec::polygon(std::move(vs));
    }
    throw std::invalid_argument("unknown domain type: " + type);
}

CoeffRecipe parse_coeff(const json& j) {
    CoeffRecipe r;
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") {
        r.kind = CoeffRecipe::Kind::Constant;
        r.value = j.value("value", 0.0);
    } else if (kind == "radial") {
        r.kind = CoeffRecipe::Kind::Radial;
        r.base = j.value("base", 1.0);
        r.amp = j.value("amp", 0.0);
    } else if (kind == "random") {
        r.kind = CoeffRecipe::Kind::Random;
        r.lo = j.value("lo", 0.0);
        r.hi = j.value("hi", 1.0);
    } else {
        throw std::invalid_argument("unknown coefficient kind: " + kind);
    }
    return r;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    const json j = json::parse(text);
    Scenario s;
    s.name = j.value("name", std::string("scenario"));
    s.task = j.value("task", std::string("compare"));
    if (j.contains("domain")) s.domain = parse_domain(j["domain"]);
    s.grid_n = j.value("grid", 256);
    s.levels = j.value("levels", 200);
    s.seed = j.value("seed", 1ull);
    if (j.contains("coefficients")) {
        const auto& c = j["coefficients"];
        if (c.contains("Lambda")) s.Lambda = parse_coeff(c["Lambda"]);
        if (c.contains("V")) s.V = parse_coeff(c["V"]);
        if (c.contains("w1")) s.w1 = parse_coeff(c["w1"]);
        if (c.contains("A")) {
            const std::string kind = c["A"].value("kind", "identity");
            if (kind == "identity") {
                s.A.kind = MatrixRecipe::Kind::Identity;
                s.A.scale = c["A"].value("scale", 1.0);
            } else if (kind == "lambda_plus") {
                s.A.kind = MatrixRecipe::Kind::LambdaPlus;
                s.A.extra = c["A"].value("extra", 0.0);
                s.A.offdiag = c["A"].value("offdiag", 0.0);
            } else {
                throw std::invalid_argument("unknown A kind: " + kind);
            }
        }
        if (c.contains("v")) {
            const std::string kind = c["v"].value("kind", "zero");
            if (kind == "zero") {
                s.v.kind = DriftRecipe::Kind::Zero;
            } else if (kind == "radial") {
                s.v.kind = DriftRecipe::Kind::RadialOutward;
                s.v.amplitude = c["v"].value("amplitude", 0.0);
            } else if (kind == "random") {
                s.v.kind = DriftRecipe::Kind::Random;
                s.v.amplitude = c["v"].value("amplitude", 0.0);
            } else {
                throw std::invalid_argument("unknown v kind: " + kind);
            }
        }
    }
    if (j.contains("constraints")) {
        const auto& c = j["constraints"];
        s.tau1 = c.value("tau1", 0.0);
        s.tau2 = c.value("tau2", 0.0);
        s.p = c.value("p", 1);
        s.det_omega = c.value("omega", 1.0);
        s.sigma = c.value("sigma", 2.0);
        if (c.contains("mu")) {
            s.mu_thresholds = c["mu"].at("thresholds").get<std::vector<double>>();
            s.mu_fractions = c["mu"].at("fractions").get<std::vector<double>>();
            if (s.mu_thresholds.size() != s.mu_fractions.size() || s.mu_thresholds.empty())
                throw std::invalid_argument("constraints.mu: thresholds/fractions mismatch");
        }
    }
    if (j.contains("asympt")) {
        const auto& a = j["asympt"];
        s.asympt_m = a.value("m", 2.0);
        if (a.contains("taus")) s.asympt_taus = a["taus"].get<std::vector<double>>();
        if (a.contains("gn_taus")) s.gn_taus = a["gn_taus"].get<std::vector<double>>();
        s.remlp_p = a.value("p", 1.5);
        s.remlp_tau = a.value("tau", 24.0);
        if (a.contains("amplitudes")) s.remlp_amps = a["amplitudes"].get<std::vector<double>>();
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open scenario config: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str());
}

namespace {

// Band-limited random field: 8 trigonometric modes over the bounding box,
// coefficients from the LCG, min-max shifted to [lo, hi] on the mask.
ScalarField2D random_field(GridPtr grid, Lcg64& rng, double lo, double hi) {
    const Grid2D& g = *grid;
    const auto bb = g.domain().bounding_box();
    const double w = bb[2] - bb[0], h = bb[3] - bb[1];
    struct Mode {
        double a, kx, ky, phase;
    };
    std::vector<Mode> modes(8);
    for (auto& m : modes) {
        m.a = rng.next_in(-1.0, 1.0);
        m.kx = static_cast<double>(rng.next_u64() % 4);
        m.ky = static_cast<double>(rng.next_u64() % 4);
        m.phase = rng.next_in(0.0, 2.0 * std::numbers::pi);
    }
    ScalarField2D f(grid);
    double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j)) continue;
            const double x = (g.cx(i) - bb[0]) / w, y = (g.cy(j) - bb[1]) / h;
            double s = 0.0;
            for (const auto& m : modes)
                s += m.a * std::cos(2.0 * std::numbers::pi * (m.kx * x + m.ky * y) + m.phase);
            f(i, j) = s;
            fmin = std::min(fmin, s);
            fmax = std::max(fmax, s);
        }
    const double span = fmax - fmin;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j))
                f(i, j) = span > 0.0 ? lo + (hi - lo) * (f(i, j) - fmin) / span : 0.5 * (lo + hi);
    return f;
}

ScalarField2D realize_coeff(const CoeffRecipe& r, GridPtr grid, Lcg64& rng) {
    const Grid2D& g = *grid;
    ScalarField2D f(grid);
    switch (r.kind) {
        case CoeffRecipe::Kind::Constant:
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i)
                    if (g.masked(i, j)) f(i, j) = r.value;
            return f;
        case CoeffRecipe::Kind::Radial: {
            const auto bb = g.domain().bounding_box();
            const double rbox = 0.5 * std::max(bb[2] - bb[0], bb[3] - bb[1]);
            const Point c = g.domain().center();
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i)
                    if (g.masked(i, j))
                        f(i, j) = r.base +
                                  r.amp * std::hypot(g.cx(i) - c.x, g.cy(j) - c.y) / rbox;
            return f;
        }
        case CoeffRecipe::Kind::Random:
            return random_field(grid, rng, r.lo, r.hi);
    }
    return f;
}

}  // namespace

ScenarioFields build_fields(const Scenario& s) {
    auto grid = std::make_shared<Grid2D>(s.domain, s.grid_n);
    const Grid2D& g = *grid;
    Lcg64 rng(s.seed);

    ScalarField2D Lambda = realize_coeff(s.Lambda, grid, rng);
    if (s.Lambda.kind == CoeffRecipe::Kind::Constant && s.Lambda.value == 0.0) {
        // unset Lambda defaults to 1
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                if (g.masked(i, j)) Lambda(i, j) = 1.0;
    }

    MatrixField2D A(grid);
    if (s.A.kind == MatrixRecipe::Kind::Identity) {
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                A.a11(i, j) = s.A.scale;
                A.a22(i, j) = s.A.scale;
            }
    } else {
        ScalarField2D e1 = random_field(grid, rng, 0.0, s.A.extra);
        ScalarField2D e2 = random_field(grid, rng, 0.0, s.A.extra);
        ScalarField2D od = random_field(grid, rng, -s.A.offdiag, s.A.offdiag);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                if (!g.masked(i, j)) continue;
                // A = Lambda Id + E with E psd: diagonal excess dominating a12
                const double o = od(i, j);
                A.a11(i, j) = Lambda(i, j) + e1(i, j) + std::abs(o);
                A.a22(i, j) = Lambda(i, j) + e2(i, j) + std::abs(o);
                A.a12(i, j) = o;
            }
    }

    VectorField2D v(grid);
    if (s.v.kind == DriftRecipe::Kind::RadialOutward) {
        const Point c = s.domain.center();
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                if (!g.masked(i, j)) continue;
                const double dx = g.cx(i) - c.x, dy = g.cy(j) - c.y;
                const double r = std::hypot(dx, dy);
                if (r > 1e-12) {
                    v.x(i, j) = s.v.amplitude * dx / r;
                    v.y(i, j) = s.v.amplitude * dy / r;
                }
            }
    } else if (s.v.kind == DriftRecipe::Kind::Random) {
        ScalarField2D vx = random_field(grid, rng, -1.0, 1.0);
        ScalarField2D vy = random_field(grid, rng, -1.0, 1.0);
        double sup = 0.0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                if (g.masked(i, j)) sup = std::max(sup, std::hypot(vx(i, j), vy(i, j)));
        const double scale = sup > 0.0 ? s.v.amplitude / sup : 0.0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                if (g.masked(i, j)) {
                    v.x(i, j) = scale * vx(i, j);
                    v.y(i, j) = scale * vy(i, j);
                }
    }

    ScalarField2D V = realize_coeff(s.V, grid, rng);
    ScalarField2D w1 = realize_coeff(s.w1, grid, rng);
    if (s.w1.kind == CoeffRecipe::Kind::Constant && s.w1.value == 0.0) {
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                if (g.masked(i, j)) w1(i, j) = 1.0;
    }

    ScenarioFields f{grid, std::move(Lambda), std::move(A), std::move(v), std::move(V),
                     std::move(w1)};

    // admissibility
    const ScalarField2D lamA = lambda_of_A(f.A);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j) && lamA(i, j) < f.Lambda(i, j) - 1e-12)
                throw std::runtime_error("build_fields: A >= Lambda Id violated");
    if (s.v.kind != DriftRecipe::Kind::Zero && s.tau1 > 0.0) {
        if (f.v.sup_norm() > s.tau1 * (1.0 + 1e-9))
            throw std::runtime_error("build_fields: |v| exceeds tau1");
    }
    return f;
}

double apriori_lower_bound(double m_V, double m_Lambda, double M_v, double lambda1_Omega) {
    const double s = std::sqrt(lambda1_Omega);
    return m_V + s * std::max(0.0, m_Lambda * s - M_v);
}

}  // namespace eigensymm
