#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "whitlyap/harness.hpp"

using namespace whitlyap;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path d = fs::temp_directory_path() / "whitlyap-harness-tests";
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("monotonicity audit") {
    CHECK(monotonicity_audit({{0, 3}, {1, 2}, {2, 1}}, 0.0).empty());
    std::vector<std::size_t> bad = monotonicity_audit({{0, 1}, {1, 1}}, 1e-9);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == 0);
    // increases are violations too
    CHECK(monotonicity_audit({{0, 1}, {1, 2}, {2, 0}}, 1e-9) ==
          std::vector<std::size_t>{0});
    // fewer than two samples cannot be audited
    CHECK_THROWS_AS(monotonicity_audit({{0, 1}}, 0.0), std::invalid_argument);
    // params must be strictly increasing
    CHECK_THROWS_AS(monotonicity_audit({{1, 2}, {1, 1}}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(monotonicity_audit({{2, 2}, {1, 1}}, 0.0), std::invalid_argument);
}

TEST_CASE("config parsing rejects unknown keys by name") {
    CHECK_THROWS_WITH_AS(parse_run_config_json(R"({"mode":"size","bogus_key":1})"),
                         doctest::Contains("bogus_key"), std::invalid_argument);
    CHECK_THROWS_AS(parse_run_config_json("{invalid json"), std::invalid_argument);
    // nested keys are rejected with their section name
    CHECK_THROWS_WITH_AS(parse_run_config_json(R"({"mode":"audit","audit":{"tolx":1}})"),
                         doctest::Contains("tolx"), std::invalid_argument);
    CHECK_THROWS_AS(parse_run_config_json(R"({"mode":"warp"})"), std::invalid_argument);
    RunConfig cfg = parse_run_config_json(
        R"({"mode":"audit","audit":{"tol":1e-6},"seed":7,"io":{"inputs":["a.csv"]}})");
    CHECK(cfg.mode == "audit");
    CHECK(cfg.audit_tol == 1e-6);
    CHECK(cfg.seed == 7);
    REQUIRE(cfg.inputs.size() == 1);
    // defaults survive omission
    CHECK(cfg.mu_depth == 64);
    CHECK(cfg.delta == 0.2);
}

TEST_CASE("point csv round trip") {
    fs::path p = temp_dir() / "pts.csv";
    FinitePointSet pts({{0.125, 0.25}, {0.5, 0.75}, {1.0, 0.0}});
    write_point_csv(p, pts);
    FinitePointSet back = load_point_csv(p);
    REQUIRE(back.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t a = 0; a < 2; ++a) CHECK(back.points[i][a] == pts.points[i][a]);
    CHECK_THROWS_AS(load_point_csv(temp_dir() / "missing.csv"), std::runtime_error);
}

TEST_CASE("pair and chain csv loading") {
    fs::path p = temp_dir() / "pairs.csv";
    std::ofstream(p) << "0.1,0.2,0.3,0.4\n0.5,0.5,0.6,0.5\n";
    auto pairs = load_pairs_csv(p, 2);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].x[0] == 0.1);
    CHECK(pairs[1].y[0] == 0.6);

    auto sp = AmbientSpace::flat_torus({1.0, 1.0});
    fs::path c = temp_dir() / "chains.csv";
    std::ofstream(c) << "0,0.1,0.2\n0,0.15,0.2\n1,0.5,0.5\n1,0.5,0.55\n";
    auto chains = load_chains_csv(c, *sp, 1e-3);
    REQUIRE(chains.size() == 2);
    CHECK(chains[0].eps_chain == 1e-3);
    CHECK(chain_diameter(*sp, chains[0]) == doctest::Approx(0.05));
}

TEST_CASE("summary json round trip") {
    LyapunovReport rep;
    rep.params = {0.0, 1.0, 2.0};
    rep.V = {3.0, 2.0, 1.5};
    rep.tol = 1e-9;
    rep.mesh = 0.01;
    rep.depth = 64;
    rep.run_audit();
    fs::path p = temp_dir() / "summary.json";
    export_summary_json(p, rep);
    LyapunovReport back = load_summary_json(p);
    CHECK(back.violations == rep.violations);
    CHECK(back.tol == rep.tol);
    CHECK(back.mesh == rep.mesh);
    CHECK(back.depth == rep.depth);
}

TEST_CASE("expansivity json round trip") {
    ExpansivityReport rep;
    rep.verdict = "separated-at-horizon";
    rep.delta = 0.2;
    rep.horizon = 64;
    rep.first_separation = {std::optional<long>(6), std::nullopt, std::optional<long>(-2)};
    rep.errors = {"", "overflow", ""};
    fs::path p = temp_dir() / "exp.json";
    export_expansivity_json(p, rep);
    ExpansivityReport back = load_expansivity_json(p);
    CHECK(back.verdict == rep.verdict);
    CHECK(back.delta == rep.delta);
    CHECK(back.horizon == rep.horizon);
    REQUIRE(back.first_separation.size() == 3);
    CHECK(*back.first_separation[0] == 6);
    CHECK(!back.first_separation[1].has_value());
    CHECK(*back.first_separation[2] == -2);
    CHECK(back.errors[1] == "overflow");
}

TEST_CASE("run_config mode exit codes") {
    fs::path out = temp_dir() / "runs";
    fs::create_directories(out);

    // size mode on explicit points
    fs::path pts = out / "in.csv";
    std::ofstream(pts) << "0.0\n0.5\n1.0\n";
    RunConfig size_cfg;
    size_cfg.mode = "size";
    size_cfg.mu_depth = 3;
    size_cfg.inputs = {pts.string()};
    CHECK(run_config(size_cfg, out, true) == ExitClean);

    // audit mode: a clean series exits 0, a violating one exits 2
    fs::path good = out / "good.csv";
    std::ofstream(good) << "0,3.0\n1,2.0\n2,1.0\n";
    RunConfig audit_cfg;
    audit_cfg.mode = "audit";
    audit_cfg.audit_tol = 1e-9;
    audit_cfg.inputs = {good.string()};
    audit_cfg.outputs = {"audit.json"};
    CHECK(run_config(audit_cfg, out, true) == ExitClean);

    fs::path bad = out / "bad.csv";
    std::ofstream(bad) << "0,1.0\n1,2.0\n";
    audit_cfg.inputs = {bad.string()};
    CHECK(run_config(audit_cfg, out, true) == ExitAuditViolation);

    // expansive mode: rotation produces a counterexample (exit 3), cat map none
    RunConfig rot;
    rot.mode = "expansive";
    rot.system_id = "rotation";
    rot.system_params = {0.3819660112501051};
    rot.samples = 3;
    rot.audit_horizon = 100;
    rot.outputs = {"rot.json"};
    CHECK(run_config(rot, out, true) == ExitCounterexample);

    RunConfig cat;
    cat.mode = "expansive";
    cat.system_id = "cat_map";
    cat.samples = 3;
    cat.audit_horizon = 64;
    cat.outputs = {"cat.json"};
    CHECK(run_config(cat, out, true) == ExitClean);
    ExpansivityReport rep = load_expansivity_json(out / "cat.json");
    CHECK(rep.verdict == "separated-at-horizon");

    // unknown mode is an error
    RunConfig junk;
    junk.mode = "nonsense";
    CHECK_THROWS_AS(run_config(junk, out, true), std::invalid_argument);
}

TEST_CASE("repeated runs are byte identical") {
    fs::path out1 = temp_dir() / "det1";
    fs::path out2 = temp_dir() / "det2";
    fs::create_directories(out1);
    fs::create_directories(out2);
    RunConfig cfg;
    cfg.mode = "expansive";
    cfg.system_id = "cat_map";
    cfg.samples = 5;
    cfg.seed = 42;
    cfg.audit_horizon = 64;
    cfg.outputs = {"rep.json", "sep.csv"};
    CHECK(run_config(cfg, out1, true) == run_config(cfg, out2, true));
    CHECK(slurp(out1 / "rep.json") == slurp(out2 / "rep.json"));
    CHECK(slurp(out1 / "sep.csv") == slurp(out2 / "sep.csv"));
}

TEST_CASE("lyap mode writes series and summary") {
    fs::path out = temp_dir() / "lyap";
    fs::create_directories(out);
    RunConfig cfg;
    cfg.mode = "lyap-asymptotic";
    cfg.system_id = "linear_node";
    cfg.system_params = {-1.0, -2.0};
    cfg.samples = 3;
    cfg.seed = 9;
    cfg.outputs = {"series.csv", "summary.json"};
    CHECK(run_config(cfg, out, true) == ExitClean);
    LyapunovReport sum = load_summary_json(out / "summary.json");
    CHECK(sum.violations.empty());
    std::string series = slurp(out / "series.csv");
    CHECK(series.rfind("t,V", 0) == 0);  // header row first
}
