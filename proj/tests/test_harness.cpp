#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eigensymm/scenario.hpp"

using namespace eigensymm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kCompareConfig = R"({
  "name": "ellipse_seeded",
  "task": "compare",
  "domain": {"type": "ellipse", "a": 1.5, "b": 0.6667},
  "grid": 96,
  "levels": 64,
  "seed": 42,
  "coefficients": {
    "Lambda": {"kind": "random", "lo": 0.8, "hi": 1.4},
    "A": {"kind": "lambda_plus", "extra": 0.4, "offdiag": 0.15},
    "v": {"kind": "random", "amplitude": 0.6},
    "V": {"kind": "random", "lo": -0.3, "hi": 0.5}
  },
  "constraints": {"tau1": 0.6, "tau2": 0.5}
})";

}  // namespace

TEST_CASE("apriori lower bound branches") {
    CHECK(apriori_lower_bound(0.5, 2.0, 0.0, 4.0) == doctest::Approx(0.5 + 2.0 * 4.0));
    // m_Lam sqrt(lam) <= M_v: zero branch
    CHECK(apriori_lower_bound(0.7, 1.0, 5.0, 4.0) == doctest::Approx(0.7));
    CHECK(apriori_lower_bound(0.0, 1.0, 1.0, 4.0) == doctest::Approx(2.0 * (2.0 - 1.0)));
}

TEST_CASE("scenario parsing round trip") {
    Scenario s = parse_scenario(kCompareConfig);
    CHECK(s.name == "ellipse_seeded");
    CHECK(s.task == "compare");
    CHECK(s.grid_n == 96);
    CHECK(s.levels == 64);
    CHECK(s.seed == 42);
    CHECK(s.domain.kind() == DomainSpec::Kind::Ellipse);
    CHECK(s.tau1 == doctest::Approx(0.6));
    CHECK(s.Lambda.kind == CoeffRecipe::Kind::Random);
    CHECK(s.A.kind == MatrixRecipe::Kind::LambdaPlus);
}

TEST_CASE("seeded fields are deterministic and admissible") {
    Scenario s = parse_scenario(kCompareConfig);
    ScenarioFields f1 = build_fields(s);
    ScenarioFields f2 = build_fields(s);
    for (std::size_t k = 0; k < f1.Lambda.data().size(); ++k)
        CHECK(f1.Lambda.data()[k] == f2.Lambda.data()[k]);  // bitwise
    CHECK(f1.v.sup_norm() <= s.tau1 * (1.0 + 1e-12));

    // a different seed gives different fields
    Scenario s2 = s;
    s2.seed = 43;
    ScenarioFields f3 = build_fields(s2);
    bool differs = false;
    for (std::size_t k = 0; k < f1.Lambda.data().size() && !differs; ++k)
        differs = f1.Lambda.data()[k] != f3.Lambda.data()[k];
    CHECK(differs);
}

TEST_CASE("compare scenario end to end with deterministic reports") {
    Scenario s = parse_scenario(kCompareConfig);
    ScenarioReport r1 = run_scenario(s);
    CHECK(r1.body.all_pass());
    CHECK(r1.body.lambda_star <= r1.body.lambda_omega +
                                     0.02 * std::max(1.0, std::abs(r1.body.lambda_omega)));

    const std::string dir1 = (fs::temp_directory_path() / "eigensymm_t1").string();
    const std::string dir2 = (fs::temp_directory_path() / "eigensymm_t2").string();
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    auto files1 = write_report(r1, dir1);
    ScenarioReport r2 = run_scenario(s);
    auto files2 = write_report(r2, dir2);
    REQUIRE(files1.size() == files2.size());

    // determinism: identical config + seed => byte-identical reports
    std::string a = slurp(files1[0]), b = slurp(files2[0]);
    // wall time differs between runs; strip it before comparing
    auto strip = [](std::string t) {
        const auto p = t.find("wall_time_seconds");
        if (p != std::string::npos) {
            const auto q = t.find('\n', p);
            t.erase(p, q - p);
        }
        return t;
    };
    CHECK(strip(a) == strip(b));

    // every pass flag is reproducible from margin and tolerance alone
    for (const auto& c : r1.body.checks) CHECK(c.pass == (c.margin >= -c.tolerance));
}

TEST_CASE("rfk scenario on square and disk") {
    Scenario sq;
    sq.name = "rfk_square";
    sq.task = "rfk";
    sq.domain = DomainSpec::rectangle(std::sqrt(std::acos(-1.0)), std::sqrt(std::acos(-1.0)));
    sq.grid_n = 128;
    ScenarioReport rep = run_scenario(sq);
    CHECK(rep.body.all_pass());
    // margin = 2 pi - j01^2 within 5%
    const double margin = rep.scalars.at("lambda1") - rep.scalars.at("rfk_value");
    CHECK(std::abs(margin - 0.5001) < 0.05 * 0.5 + 0.01);

    Scenario dk;
    dk.name = "rfk_disk";
    dk.task = "rfk";
    dk.domain = DomainSpec::disk(1.0);
    dk.grid_n = 128;
    ScenarioReport drep = run_scenario(dk);
    CHECK(drep.body.all_pass());
    for (const auto& c : drep.body.checks)
        if (c.name == "FK_equality_gap") CHECK(c.value < 0.01 * 6.0);
}

TEST_CASE("empty report writes valid JSON and round-trips numerics") {
    ScenarioReport rep;
    rep.name = "empty";
    rep.task = "compare";
    rep.scalars["pi_ish"] = 0.1 + 0.2;  // not exactly representable
    const std::string dir = (fs::temp_directory_path() / "eigensymm_empty").string();
    fs::remove_all(dir);
    auto files = write_report(rep, dir);
    REQUIRE(!files.empty());

    // parse back: valid JSON, zero check entries, numbers bit-exact
    const std::string text = slurp(files[0]);
    CHECK(text.find("\"checks\": []") != std::string::npos);
    const auto pos = text.find("pi_ish");
    REQUIRE(pos != std::string::npos);
    const auto colon = text.find(':', pos);
    const double back = std::stod(text.substr(colon + 1));
    CHECK(back == 0.1 + 0.2);
}

TEST_CASE("distcheck scenario passes the distribution battery") {
    Scenario s;
    s.name = "distcheck_small";
    s.task = "distcheck";
    s.domain = DomainSpec::ellipse(1.3, 0.75);
    s.grid_n = 128;
    s.levels = 100;
    s.seed = 4242;
    ScenarioReport rep = run_scenario(s);
    for (const auto& c : rep.body.checks) {
        INFO(c.name, " value=", c.value, " margin=", c.margin);
        CHECK(c.pass);
    }
}

TEST_CASE("batch runner respects the exit contract") {
    Scenario ok;
    ok.name = "batch_disk";
    ok.task = "rfk";
    ok.domain = DomainSpec::disk(1.0);
    ok.grid_n = 96;
    const std::string dir = (fs::temp_directory_path() / "eigensymm_batch").string();
    fs::remove_all(dir);
    CHECK(run_batch({ok}, dir));
    CHECK(fs::exists(fs::path(dir) / "batch_disk.json"));
}
