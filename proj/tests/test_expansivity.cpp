#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "whitlyap/expansivity.hpp"

using namespace whitlyap;

namespace {

SizeConfig cfg_for(const SpacePtr& sp, int depth = 64) {
    SizeConfig cfg;
    cfg.depth = depth;
    cfg.seq = std::make_shared<DenseSequence>(sp);
    return cfg;
}

double u0(double v) { return v - std::floor(v); }  // wrap into [0,1)

double max_gap(const AmbientSpace& sp, const Chain& c) {
    double g = 0.0;
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i)
        g = std::max(g, sp.distance(c.points[i], c.points[i + 1]));
    return g;
}

}  // namespace

TEST_CASE("segment chains keep their gap bound under iteration") {
    SystemSpec f = SystemSpec::cat_map();
    auto sp = f.default_space();
    const double eps = 1e-3;
    Chain c = make_segment_chain(*sp, {0.1, 0.2}, {0.12, 0.21}, eps);
    CHECK(max_gap(*sp, c) <= eps);
    for (int k = 0; k < 8; ++k) {
        c = advance_chain(f, *sp, c);
        CHECK(max_gap(*sp, c) <= eps);
    }
    CHECK_THROWS_AS(make_segment_chain(*sp, {0.1, 0.2}, {0.12, 0.21}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("eigen-segment diameter grows by the exact eigenvalue") {
    SystemSpec f = SystemSpec::cat_map();
    auto sp = f.default_space();
    const double ev = (3.0 + std::sqrt(5.0)) / 2.0;  // expanding eigenvalue
    const double su = (std::sqrt(5.0) - 1.0) / 2.0;
    double nu = std::hypot(1.0, su);
    double len = 1e-3;
    Chain c = make_segment_chain(*sp, {0.0, 0.0}, {len / nu, len * su / nu}, 1e-5);
    for (int n = 1; n <= 6; ++n) {
        c = advance_chain(f, *sp, c);
        double expect = len * std::pow(ev, n);
        CHECK(chain_diameter(*sp, c) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("stable eigen-segment contracts forward, expands backward") {
    SystemSpec f = SystemSpec::cat_map();
    auto sp = f.default_space();
    const double ss = (std::sqrt(5.0) + 1.0) / 2.0;
    double ns = std::hypot(1.0, ss);
    double len = 1e-3;
    // endpoint in cover coordinates; the chain wraps it onto the torus
    Chain c = make_segment_chain(*sp, {0.0, 0.0}, {len / ns, -len * ss / ns}, 1e-5);
    Chain fwd = advance_chain(f, *sp, c);
    CHECK(chain_diameter(*sp, fwd) < chain_diameter(*sp, c));
    Chain bwd = c;
    for (int n = 0; n < 6; ++n) bwd = advance_chain(f, *sp, bwd, Direction::Backward);
    const double ev = (3.0 + std::sqrt(5.0)) / 2.0;
    CHECK(chain_diameter(*sp, bwd) == doctest::Approx(len * std::pow(ev, 6)).epsilon(1e-9));
}

TEST_CASE("pair and chain endpoints report the same first separation") {
    SystemSpec f = SystemSpec::cat_map();
    auto sp = f.default_space();
    const double su = (std::sqrt(5.0) - 1.0) / 2.0;
    double nu = std::hypot(1.0, su);
    Point a{0.3, 0.4};
    Point b{0.3 + 1e-3 / nu, 0.4 + 1e-3 * su / nu};

    ExpansivityReport pr = check_expansive_pairs(f, *sp, 0.2, 64, {PairState{a, b}});
    ExpansivityReport cr =
        check_cw_expansive(f, *sp, 0.2, 64, {make_segment_chain(*sp, a, b, 1e-4)});
    CHECK(pr.verdict == "separated-at-horizon");
    CHECK(cr.verdict == "separated-at-horizon");
    REQUIRE(pr.first_separation.size() == 1);
    REQUIRE(cr.first_separation.size() == 1);
    REQUIRE(pr.first_separation[0].has_value());
    // the chain contains its endpoints, so it can only separate earlier or at
    // the same iterate as the endpoint pair
    REQUIRE(cr.first_separation[0].has_value());
    CHECK(*cr.first_separation[0] <= *pr.first_separation[0]);
    // pair on the unstable line through a: separation after exactly 6 steps
    CHECK(*pr.first_separation[0] == 6);
}

TEST_CASE("degenerate inputs are skipped, not separated") {
    SystemSpec f = SystemSpec::cat_map();
    auto sp = f.default_space();
    ExpansivityReport rep = check_expansive_pairs(f, *sp, 0.2, 8, {PairState{{0.3, 0.4}, {0.3, 0.4}}});
    // only degenerate samples: nothing was tested, so no verdict either way
    CHECK(rep.verdict == "inconclusive");
    CHECK(!rep.first_separation[0].has_value());
    CHECK(!rep.witness.has_value());
    // a pair already separated at n = 0 counts immediately
    ExpansivityReport far = check_expansive_pairs(f, *sp, 0.2, 8, {PairState{{0.0, 0.0}, {0.5, 0.5}}});
    CHECK(far.verdict == "separated-at-horizon");
    REQUIRE(far.first_separation[0].has_value());
    CHECK(*far.first_separation[0] == 0);
}

TEST_CASE("random cat-map arcs separate within 8 iterates") {
    SystemSpec f = SystemSpec::cat_map();
    auto sp = f.default_space();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Chain> seeds;
    for (int i = 0; i < 20; ++i) {
        Point a{u(rng), u(rng)};
        double dx = 1e-3 * (u(rng) - 0.5), dy = 1e-3 * (u(rng) - 0.5);
        if (std::fabs(dx) + std::fabs(dy) < 1e-5) dx = 1e-3;
        seeds.push_back(make_segment_chain(*sp, a, {u0(a[0] + dx), u0(a[1] + dy)}, 1e-4));
    }
    ExpansivityReport rep = check_cw_expansive(f, *sp, 0.2, 64, seeds);
    CHECK(rep.verdict == "separated-at-horizon");
    for (const auto& s : rep.first_separation) {
        REQUIRE(s.has_value());
        CHECK(std::labs(*s) <= 8);
    }
}

TEST_CASE("irrational rotation yields a counterexample with flat witness") {
    SystemSpec r = SystemSpec::rotation(0.3819660112501051);
    auto sp = r.default_space();
    ExpansivityReport rep =
        check_expansive_pairs(r, *sp, 0.2, 200, {PairState{{0.0}, {0.05}}});
    CHECK(rep.verdict == "counterexample");
    REQUIRE(rep.witness.has_value());
    REQUIRE(rep.witness_diameters.size() == 2 * 200 + 1);
    // the rotation is an isometry: every replayed diameter equals the initial one
    for (double d : rep.witness_diameters) CHECK(d == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("arc chains on the circle advance by the rotation angle") {
    SystemSpec r = SystemSpec::rotation(0.25);
    auto sp = r.default_space();
    Chain c = make_arc_chain(*sp, 0.1, 0.18, 1e-3);
    CHECK(chain_diameter(*sp, c) == doctest::Approx(0.08).epsilon(1e-12));
    Chain d = advance_chain(r, *sp, c);
    CHECK(chain_diameter(*sp, d) == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(sp->distance(d.points.front(), {0.35}) <= 1e-12);
    ExpansivityReport rep = check_cw_expansive(r, *sp, 0.2, 50, {c});
    CHECK(rep.verdict == "counterexample");
}

TEST_CASE("refinement overflow guards the point budget") {
    SystemSpec f = SystemSpec::cat_map();
    auto sp = f.default_space();
    Chain c = make_segment_chain(*sp, {0.0, 0.0}, {0.1, 0.0}, 1e-6);
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 64; ++i) c = advance_chain(f, *sp, c, Direction::Forward, 100000);
        }(),
        RefinementOverflow);
}

TEST_CASE("hyperspace Lyapunov values on pairs") {
    SystemSpec f = SystemSpec::cat_map();
    auto sp = f.default_space();
    HyperLyapunov L(f, sp, 0.2, cfg_for(sp));

    // exactly zero on the diagonal
    CHECK(lyap_pair(L, *sp, PairState{{0.3, 0.4}, {0.3, 0.4}}) == 0.0);

    // decreases from a separating pair to its image while both stay in U;
    // the probe family is concentrated near the first dense anchor, so the
    // pair is planted there to land inside the certifiable window
    const double su = (std::sqrt(5.0) - 1.0) / 2.0;
    double nu = std::hypot(1.0, su);
    PairState A{{0.0, 0.0}, {1e-3 / nu, 1e-3 * su / nu}};
    PairState fA{f.map_forward(A.x), f.map_forward(A.y)};
    double vA = lyap_pair(L, *sp, A);
    double vfA = lyap_pair(L, *sp, fA);
    CHECK(vA > 0.0);
    CHECK(vfA < vA);

    // out-of-neighborhood states are rejected
    CHECK_THROWS_AS(lyap_pair(L, *sp, PairState{{0.0, 0.0}, {0.5, 0.5}}), std::invalid_argument);

    // audit along the in-U run: strictly decreasing at tolerance
    HyperAuditResult res = L.audit_pair(A);
    CHECK(res.report.violations.empty());
    CHECK_FALSE(res.isolation_suspect);
}

TEST_CASE("hyperspace Lyapunov values on chains") {
    SystemSpec f = SystemSpec::cat_map();
    auto sp = f.default_space();
    HyperLyapunov L(f, sp, 0.2, cfg_for(sp));
    const double su = (std::sqrt(5.0) - 1.0) / 2.0;
    double nu = std::hypot(1.0, su);
    Chain c = make_segment_chain(*sp, {0.0, 0.0}, {0.01 / nu, 0.01 * su / nu}, 1e-4);
    double v = lyap_chain(L, *sp, c);
    Chain fc = advance_chain(f, *sp, c);
    // strict decrease along the forward image, well past the audit tolerance
    CHECK(lyap_chain(L, *sp, fc) < v - 1e-9);
    HyperAuditResult res = L.audit_chain(c);
    CHECK(res.report.violations.empty());
    CHECK_THROWS_AS(lyap_chain(L, *sp, make_segment_chain(*sp, {0.0, 0.0}, {0.4, 0.0}, 1e-3)),
                    std::invalid_argument);
}

TEST_CASE("rotation pairs stall: the audit reports the trapped orbit") {
    SystemSpec r = SystemSpec::rotation(0.3819660112501051);
    auto sp = r.default_space();
    HyperOpts opts;
    opts.horizon = 256;
    HyperLyapunov L(r, sp, 0.2, cfg_for(sp), opts);
    HyperAuditResult res = L.audit_pair(PairState{{0.0}, {0.05}});
    CHECK(res.isolation_suspect);
    CHECK(!res.report.violations.empty());
}
