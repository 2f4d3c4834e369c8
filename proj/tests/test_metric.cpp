#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "whitlyap/dynamics.hpp"
#include "whitlyap/metric.hpp"

using namespace whitlyap;

namespace {

std::vector<Point> random_points(const AmbientSpace& space, std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> out;
    if (const auto* q = std::get_if<QuotientCollapseRule>(&space.rule()))
        return random_points(*q->base, n, seed);
    if (const auto* b = std::get_if<EuclideanBoxRule>(&space.rule())) {
        for (std::size_t i = 0; i < n; ++i) {
            Point p(space.dim());
            for (std::size_t a = 0; a < p.size(); ++a)
                p[a] = std::uniform_real_distribution<double>(b->lo[a], b->hi[a])(rng);
            out.push_back(std::move(p));
        }
    } else {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            Point p(space.dim());
            if (const auto* t = std::get_if<FlatTorusRule>(&space.rule()))
                for (std::size_t a = 0; a < p.size(); ++a) p[a] = u(rng) * t->periods[a];
            else
                p[0] = u(rng) * std::get<CircleArcRule>(space.rule()).circumference;
            out.push_back(std::move(p));
        }
    }
    return out;
}

void check_metric_axioms(const AmbientSpace& space, unsigned seed) {
    auto pts = random_points(space, 3000, seed);
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
        const Point &x = pts[i], &y = pts[i + 1], &z = pts[i + 2];
        double dxy = space.distance(x, y), dyx = space.distance(y, x);
        CHECK(dxy == dyx);
        CHECK(dxy >= 0.0);
        CHECK(space.distance(x, x) == 0.0);
        CHECK(dxy <= space.distance(x, z) + space.distance(z, y) + 1e-12);
        CHECK(dxy <= space.diameter_upper() + 1e-12);
    }
}

}  // namespace

TEST_CASE("euclidean box distance") {
    auto sp = AmbientSpace::euclidean_box({0.0, 0.0}, {5.0, 5.0});
    CHECK(sp->distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(sp->distance({1.5, 2.5}, {1.5, 2.5}) == 0.0);
}

TEST_CASE("flat torus wrap-around") {
    auto sp = AmbientSpace::flat_torus({1.0, 1.0});
    CHECK(sp->distance({0.9, 0.0}, {0.1, 0.0}) == doctest::Approx(0.2));
    CHECK(sp->distance({0.0, 0.0}, {0.5, 0.5}) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("point outside domain rejected") {
    auto sp = AmbientSpace::euclidean_box({0.0}, {1.0});
    CHECK_THROWS_AS(sp->distance({2.0}, {0.5}), std::domain_error);
}

TEST_CASE("metric axioms on random samples per rule") {
    check_metric_axioms(*AmbientSpace::euclidean_box({-1.0, -1.0}, {1.0, 1.0}), 1);
    check_metric_axioms(*AmbientSpace::flat_torus({1.0, 1.0}), 2);
    check_metric_axioms(*AmbientSpace::circle(1.0), 3);
    auto base = AmbientSpace::euclidean_box({-1.0, -1.0}, {1.0, 1.0});
    auto q = AmbientSpace::quotient_collapse(base, FinitePointSet({{0.5, 0.5}}));
    check_metric_axioms(*q, 4);
}

TEST_CASE("diameter") {
    auto sp = AmbientSpace::euclidean_box({-2.0, -2.0}, {2.0, 2.0});
    CHECK(diameter(*sp, FinitePointSet({{0, 0}})) == 0.0);
    CHECK(diameter(*sp, FinitePointSet({{0, 0}, {1, 0}, {0, 1}})) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(diameter(*sp, FinitePointSet{}), std::invalid_argument);

    // brute-force oracle on random sets
    auto pts = random_points(*sp, 100, 9);
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, sp->distance(pts[i], pts[j]));
    CHECK(diameter(*sp, FinitePointSet(pts)) == best);
}

TEST_CASE("connected component on a line") {
    auto sp = AmbientSpace::euclidean_box({0.0}, {1.0});
    FinitePointSet A({{0.0}, {0.1}, {0.2}, {0.9}, {1.0}});
    auto comp = connected_component(*sp, A, {0.0}, 0.15);
    REQUIRE(comp.size() == 3);
    CHECK(comp.points[0][0] == 0.0);
    CHECK(comp.points[2][0] == doctest::Approx(0.2));

    CHECK(connected_component(*sp, A, {0.0}, 1.1).size() == A.size());
    CHECK(connected_component(*sp, A, {0.9}, 0.05).size() == 1);
    CHECK_THROWS_AS(connected_component(*sp, A, {0.5}, 0.15), std::invalid_argument);
}

TEST_CASE("connected component idempotent and monotone in radius") {
    auto sp = AmbientSpace::euclidean_box({0.0, 0.0}, {1.0, 1.0});
    auto pts = random_points(*sp, 60, 17);
    FinitePointSet A(pts);
    for (double r : {0.05, 0.1, 0.2}) {
        auto c1 = connected_component(*sp, A, pts[0], r);
        auto c2 = connected_component(*sp, c1, pts[0], r);
        CHECK(c1.size() == c2.size());
        auto bigger = connected_component(*sp, A, pts[0], r * 2.0);
        for (const Point& p : c1.points) {
            bool found = false;
            for (const Point& q : bigger.points) found = found || sp->distance(p, q) == 0.0;
            CHECK(found);
        }
    }
}

TEST_CASE("dense sequence on the unit interval") {
    auto sp = AmbientSpace::euclidean_box({0.0}, {1.0});
    DenseSequence seq(sp);
    CHECK(seq.point(1)[0] == 0.0);
    CHECK(seq.point(2)[0] == 1.0);
    CHECK(seq.point(3)[0] == 0.5);
    CHECK(seq.point(4)[0] == 0.25);
    CHECK(seq.point(5)[0] == 0.75);
    // determinism
    CHECK(seq.point(3)[0] == dense_point(seq, 3)[0]);
}

TEST_CASE("dense prefix is level-dense") {
    auto sp = AmbientSpace::euclidean_box({0.0, 0.0}, {1.0, 1.0});
    DenseSequence seq(sp);
    for (unsigned level = 1; level <= 4; ++level) {
        std::size_t n = seq.level_prefix_size(level);
        double bound = sp->diameter_upper() / double(1 << level);
        // every level-k grid vertex has a prefix point within the bound
        int g = 1 << level;
        for (int i = 0; i <= g; ++i)
            for (int j = 0; j <= g; ++j) {
                Point v{double(i) / g, double(j) / g};
                double best = 1e9;
                for (std::size_t k = 1; k <= n; ++k)
                    best = std::min(best, sp->distance(v, seq.point(k)));
                CHECK(best <= bound + 1e-12);
            }
    }
}

TEST_CASE("dense sequence torus levels") {
    auto sp = AmbientSpace::flat_torus({1.0, 1.0});
    DenseSequence seq(sp);
    CHECK(seq.level_prefix_size(0) == 1);
    CHECK(seq.level_prefix_size(1) == 4);
    CHECK(seq.level_prefix_size(2) == 16);
    CHECK(seq.level_prefix_size(5) == 1024);
    Point q1 = seq.point(1);
    CHECK(q1[0] == 0.0);
    CHECK(q1[1] == 0.0);
}

TEST_CASE("quotient collapse distance") {
    auto base = AmbientSpace::euclidean_box({-1.5, -1.5}, {1.5, 1.5});
    // sampled unit circle
    FinitePointSet lam;
    for (int k = 0; k < 360; ++k) {
        double a = 2.0 * 3.14159265358979323846 * k / 360.0;
        lam.points.push_back({std::cos(a), std::sin(a)});
    }
    lam.mesh = 0.01;
    auto q = AmbientSpace::quotient_collapse(base, lam);
    // both branches evaluated directly
    CHECK(q->distance({1.2, 0.0}, {-1.2, 0.0}) == doctest::Approx(0.4).epsilon(1e-3));
    // di <= dist and equality far from Lambda
    CHECK(q->distance({0.05, 0.0}, {0.0, 0.05}) ==
          doctest::Approx(base->distance({0.05, 0.0}, {0.0, 0.05})));
    CHECK(quotient_distance(*base, lam, {1.0, 0.0}, {0.6, 0.0}) == doctest::Approx(0.4).epsilon(1e-3));
}

TEST_CASE("quotient distance properties") {
    auto base = AmbientSpace::euclidean_box({-1.0, -1.0}, {1.0, 1.0});
    FinitePointSet lam({{0.3, -0.2}});
    auto pts = random_points(*base, 3000, 23);
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
        double d = quotient_distance(*base, lam, pts[i], pts[i + 1]);
        CHECK(d == quotient_distance(*base, lam, pts[i + 1], pts[i]));
        CHECK(d <= base->distance(pts[i], pts[i + 1]) + 1e-15);
        double d2 = quotient_distance(*base, lam, pts[i], pts[i + 2]) +
                    quotient_distance(*base, lam, pts[i + 2], pts[i + 1]);
        CHECK(d <= d2 + 1e-12);
    }
    CHECK_THROWS_AS(quotient_distance(*base, FinitePointSet{}, {0, 0}, {0.1, 0.1}),
                    std::invalid_argument);
}
