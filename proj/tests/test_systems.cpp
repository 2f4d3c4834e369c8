#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "whitlyap/dynamics.hpp"

using namespace whitlyap;

TEST_CASE("catalog construction and validation") {
    CHECK_THROWS_AS(SystemSpec::linear_node({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(SystemSpec::planar_saddle(-1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemSpec::from_catalog_id("unknown", {}), std::invalid_argument);
    CHECK_THROWS_AS(SystemSpec::custom_linear(SystemKind::Map, 2, {1, 1, 1, 1}),
                    std::invalid_argument);  // singular matrix has no inverse
    CHECK(SystemSpec::from_catalog_id("cat_map", {}).kind() == SystemKind::Map);
    CHECK(SystemSpec::from_catalog_id("planar_saddle", {2.0, -0.5}).catalog_id() ==
          "planar_saddle");
}

TEST_CASE("integrator matches closed forms to 1e-8") {
    struct Case {
        SystemSpec sys;
        Point x0;
    };
    std::vector<Case> cases{
        {SystemSpec::linear_node({-1.0, -2.0}), {0.8, -0.6}},
        {SystemSpec::planar_saddle(1.0, -1.0), {0.01, 0.9}},
        {SystemSpec::north_south_circle(), {2.0}},
        {SystemSpec::attracting_circle(), {0.5, 0.1}},
    };
    for (const auto& c : cases) {
        auto sp = c.sys.default_space();
        Point x = c.x0;
        double t = 0.0;
        for (int i = 0; i < 2000; ++i) {  // T_max = 20 at h = 0.01
            x = c.sys.rk4_step(x, c.sys.step());
            t += c.sys.step();
            if (!sp->contains(x, 1e-6)) break;
            Point e = c.sys.flow_exact(c.x0, t);
            CHECK(sp->distance(x, e) <= 1e-8);
        }
    }
}

TEST_CASE("flow exact example: exponential decay") {
    SystemSpec sys = SystemSpec::linear_node({-1.0});
    Point x = sys.flow_exact({1.0}, 1.0);
    CHECK(x[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("sample_orbit basics") {
    SystemSpec sys = SystemSpec::linear_node({-1.0});
    OrbitSegment seg = sample_orbit(sys, {1.0}, Direction::Forward, 1.0);
    CHECK(seg.points.front()[0] == 1.0);
    CHECK(seg.points.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
    CHECK(seg.times.front() == 0.0);
    for (std::size_t i = 0; i + 1 < seg.times.size(); ++i) CHECK(seg.times[i] < seg.times[i + 1]);
}

TEST_CASE("cat map iterates exactly") {
    SystemSpec f = SystemSpec::cat_map();
    Point x{0.1, 0.0};
    Point x1 = f.map_forward(x);
    CHECK(x1[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(x1[1] == doctest::Approx(0.1).epsilon(1e-15));
    Point x2 = f.map_forward(x1);
    CHECK(x2[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(x2[1] == doctest::Approx(0.3).epsilon(1e-15));
    // inverse undoes forward
    Point back = f.map_inverse(x2);
    CHECK(back[0] == doctest::Approx(x1[0]).epsilon(1e-15));
    CHECK(back[1] == doctest::Approx(x1[1]).epsilon(1e-15));
}

TEST_CASE("rotation is an isometry with exact inverse") {
    SystemSpec r = SystemSpec::rotation(0.1234);
    auto sp = r.default_space();
    Point a{0.3}, b{0.55};
    double d0 = sp->distance(a, b);
    for (int i = 0; i < 50; ++i) {
        a = r.map_forward(a);
        b = r.map_forward(b);
        CHECK(sp->distance(a, b) == doctest::Approx(d0).epsilon(1e-12));
    }
    Point x{0.3};
    CHECK(sp->distance(r.map_inverse(r.map_forward(x)), x) <= 1e-15);
}

TEST_CASE("custom linear map inverse") {
    SystemSpec m = SystemSpec::custom_linear(SystemKind::Map, 2, {2, 0, 0, 0.5});
    Point x{0.25, 0.5};
    Point y = m.map_forward(x);
    CHECK(y[0] == doctest::Approx(0.5));
    CHECK(y[1] == doctest::Approx(0.25));
    Point back = m.map_inverse(y);
    CHECK(back[0] == doctest::Approx(x[0]).epsilon(1e-14));
    CHECK(back[1] == doctest::Approx(x[1]).epsilon(1e-14));
}

TEST_CASE("north-south circle fixed points") {
    SystemSpec sys = SystemSpec::north_south_circle();
    const double pi = 3.14159265358979323846;
    CHECK(sys.flow_exact({0.0}, 5.0)[0] == doctest::Approx(0.0));
    CHECK(sys.flow_exact({pi}, 5.0)[0] == doctest::Approx(pi));
    // generic point flows toward the sink at 0
    double th = sys.flow_exact({1.0}, 10.0)[0];
    CHECK(std::min(th, 2.0 * pi - th) < 1e-4);
}
