#include "whitlyap/hyperspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/multiprecision/mpfr.hpp>

#include "whitlyap/systems.hpp"

namespace whitlyap {

using big_float = boost::multiprecision::mpfr_float;

double SizeConfig::tail_bound() const {
    if (!seq) throw std::invalid_argument("SizeConfig: missing dense sequence");
    if (depth < 1) throw std::invalid_argument("SizeConfig: depth must be >= 1");
    return std::ldexp(seq->space()->diameter_upper(), -depth);
}

double hausdorff_distance(const AmbientSpace& space, const FinitePointSet& A,
                          const FinitePointSet& B) {
    if (A.empty() || B.empty()) throw std::invalid_argument("hausdorff_distance: empty set");
    double ab = 0.0, ba = 0.0;
    for (const Point& a : A.points) ab = std::max(ab, space.distance_to_set(a, B));
    for (const Point& b : B.points) ba = std::max(ba, space.distance_to_set(b, A));
    return std::max(ab, ba);
}

double size_component(const AmbientSpace& space, const FinitePointSet& A, const Point& q) {
    if (A.empty()) throw std::invalid_argument("size_component: empty set");
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (const Point& a : A.points) {
        double d = space.distance(q, a);
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    return dmax - dmin;
}

SizeValue whitney_size(const AmbientSpace& space, const FinitePointSet& A, const SizeConfig& cfg) {
    if (A.empty()) throw std::invalid_argument("whitney_size: empty set");
    SizeValue out;
    out.tail_bound = cfg.tail_bound();
    double sum = 0.0;
    for (int i = 1; i <= cfg.depth; ++i) {
        double w = std::ldexp(1.0, -i);
        if (w == 0.0) break;
        sum += size_component(space, A, cfg.seq->point(std::size_t(i))) * w;
    }
    out.value = sum;
    return out;
}

namespace {

// Squared distance on the torus, exact in double for dyadic grid points.
double torus_dist2(const FlatTorusRule& r, const Point& x, const Point& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.periods.size(); ++i) {
        double p = r.periods[i];
        double d = std::fabs(wrap_coord(x[i], p) - wrap_coord(y[i], p));
        d = std::min(d, p - d);
        s += d * d;
    }
    return s;
}

// mu(A) as an exact-coefficient radical sum: for each series index the arg-max
// and arg-min squared distances are found with exact double comparisons, the
// dyadic weights are accumulated per distinct squared distance, and the square
// roots are taken once at full precision.
big_float grid_whitney_size(const FlatTorusRule& rule, const FinitePointSet& A,
                            const SizeConfig& cfg) {
    std::map<double, big_float> coeff;
    const int depth = cfg.depth;
    std::vector<big_float> pow2(std::size_t(depth) + 1);
    big_float one(1);
    for (int i = 1; i <= depth; ++i) pow2[std::size_t(i)] = ldexp(one, -i);

    for (int i = 1; i <= depth; ++i) {
        Point q = cfg.seq->point(std::size_t(i));
        double d2max = -1.0, d2min = std::numeric_limits<double>::infinity();
        for (const Point& a : A.points) {
            double d2 = torus_dist2(rule, q, a);
            d2max = std::max(d2max, d2);
            d2min = std::min(d2min, d2);
        }
        if (d2max == d2min) continue;
        coeff[d2max] += pow2[std::size_t(i)];
        coeff[d2min] -= pow2[std::size_t(i)];
    }
    big_float mu(0);
    for (const auto& [d2, c] : coeff) mu += sqrt(big_float(d2)) * c;
    return mu;
}

}  // namespace

int whitney_compare_grid(const AmbientSpace& space, const FinitePointSet& A,
                         const FinitePointSet& B, const SizeConfig& cfg) {
    const auto* rule = std::get_if<FlatTorusRule>(&space.rule());
    if (!rule) throw std::invalid_argument("whitney_compare_grid: flat-torus space required");
    if (A.empty() || B.empty()) throw std::invalid_argument("whitney_compare_grid: empty set");
    unsigned digits = unsigned((cfg.depth + 192) * 0.302) + 4;
    big_float::default_precision(digits);
    big_float a = grid_whitney_size(*rule, A, cfg);
    big_float b = grid_whitney_size(*rule, B, cfg);
    return a < b ? -1 : (b < a ? 1 : 0);
}

FinitePointSet induced_image(const SystemSpec& f, const FinitePointSet& A) {
    if (A.empty()) throw std::invalid_argument("induced_image: empty set");
    if (f.kind() != SystemKind::Map)
        throw std::invalid_argument("induced_image: flow system passed, map required");
    FinitePointSet out;
    out.mesh = A.mesh;
    out.points.reserve(A.size());
    for (const Point& a : A.points) out.points.push_back(f.map_forward(a));
    return out;
}

}  // namespace whitlyap
