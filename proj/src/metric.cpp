#include "whitlyap/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace whitlyap {

namespace {

double box_distance(const EuclideanBoxRule& r, const Point& x, const Point& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.lo.size(); ++i) s += sqr(x[i] - y[i]);
    return std::sqrt(s);
}

double torus_distance(const FlatTorusRule& r, const Point& x, const Point& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.periods.size(); ++i) {
        double p = r.periods[i];
        double d = std::fabs(wrap_coord(x[i], p) - wrap_coord(y[i], p));
        s += sqr(std::min(d, p - d));
    }
    return std::sqrt(s);
}

double norm_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += sqr(c);
    return std::sqrt(s);
}

}  // namespace

AmbientSpace::AmbientSpace(std::size_t dim, MetricRule rule, double diam)
    : dim_(dim), rule_(std::move(rule)), diameter_upper_(diam) {}

SpacePtr AmbientSpace::euclidean_box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.empty() || lo.size() != hi.size())
        throw std::invalid_argument("euclidean_box: bounds must be nonempty and of equal dimension");
    std::vector<double> side(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(hi[i] > lo[i])) throw std::invalid_argument("euclidean_box: need hi > lo on every axis");
        side[i] = hi[i] - lo[i];
    }
    double diam = norm_of(side);
    return SpacePtr(new AmbientSpace(lo.size(), EuclideanBoxRule{std::move(lo), std::move(hi)}, diam));
}

SpacePtr AmbientSpace::flat_torus(std::vector<double> periods) {
    if (periods.empty()) throw std::invalid_argument("flat_torus: need at least one axis");
    std::vector<double> half(periods.size());
    for (std::size_t i = 0; i < periods.size(); ++i) {
        if (!(periods[i] > 0)) throw std::invalid_argument("flat_torus: periods must be positive");
        half[i] = periods[i] / 2.0;
    }
    double diam = norm_of(half);
    return SpacePtr(new AmbientSpace(periods.size(), FlatTorusRule{std::move(periods)}, diam));
}

SpacePtr AmbientSpace::circle(double circumference) {
    if (!(circumference > 0)) throw std::invalid_argument("circle: circumference must be positive");
    return SpacePtr(new AmbientSpace(1, CircleArcRule{circumference}, circumference / 2.0));
}

SpacePtr AmbientSpace::quotient_collapse(SpacePtr base, FinitePointSet lambda) {
    if (!base) throw std::invalid_argument("quotient_collapse: null base space");
    if (lambda.empty()) throw std::invalid_argument("quotient_collapse: empty collapse set");
    for (const Point& p : lambda.points) base->require_inside(p, "quotient_collapse");
    double diam = base->diameter_upper();
    std::size_t dim = base->dim();
    return SpacePtr(new AmbientSpace(dim, QuotientCollapseRule{std::move(base), std::move(lambda)}, diam));
}

double AmbientSpace::distance(const Point& x, const Point& y) const {
    check_dim(x, dim_, "distance");
    check_dim(y, dim_, "distance");
    require_inside(x, "distance");
    require_inside(y, "distance");
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, EuclideanBoxRule>) {
                return box_distance(r, x, y);
            } else if constexpr (std::is_same_v<T, FlatTorusRule>) {
                return torus_distance(r, x, y);
            } else if constexpr (std::is_same_v<T, CircleArcRule>) {
                double d = std::fabs(wrap_coord(x[0], r.circumference) - wrap_coord(y[0], r.circumference));
                return std::min(d, r.circumference - d);
            } else {
                double direct = r.base->distance(x, y);
                double via = r.base->distance_to_set(x, r.lambda) + r.base->distance_to_set(y, r.lambda);
                return std::min(direct, via);
            }
        },
        rule_);
}

bool AmbientSpace::contains(const Point& x, double tol) const {
    if (x.size() != dim_) return false;
    for (double c : x)
        if (!std::isfinite(c)) return false;
    return std::visit(
        [&](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, EuclideanBoxRule>) {
                for (std::size_t i = 0; i < dim_; ++i)
                    if (x[i] < r.lo[i] - tol || x[i] > r.hi[i] + tol) return false;
                return true;
            } else if constexpr (std::is_same_v<T, QuotientCollapseRule>) {
                return r.base->contains(x, tol);
            } else {
                return true;  // periodic axes wrap
            }
        },
        rule_);
}

void AmbientSpace::require_inside(const Point& x, const char* what) const {
    if (!contains(x))
        throw std::domain_error(std::string(what) + ": point " + point_str(x) + " outside the domain");
}

double AmbientSpace::distance_to_set(const Point& x, const FinitePointSet& A) const {
    if (A.empty()) throw std::invalid_argument("distance_to_set: empty set");
    double best = std::numeric_limits<double>::infinity();
    for (const Point& a : A.points) best = std::min(best, distance(x, a));
    return best;
}

Point AmbientSpace::collapsed_point() const {
    const auto* q = std::get_if<QuotientCollapseRule>(&rule_);
    if (!q) throw std::logic_error("collapsed_point: not a quotient space");
    return q->lambda.points.front();
}

// --- DenseSequence --------------------------------------------------------

DenseSequence::DenseSequence(SpacePtr space) : metric_space_(std::move(space)) {
    if (!metric_space_) throw std::invalid_argument("DenseSequence: null space");
    space_ = metric_space_;
    while (const auto* q = std::get_if<QuotientCollapseRule>(&space_->rule())) space_ = q->base;
}

void DenseSequence::emit_level(unsigned level) const {
    const std::size_t dim = space_->dim();
    // Per-axis grid values at this level, plus whether index j is "new".
    std::vector<std::vector<double>> axis_vals(dim);
    std::vector<std::size_t> counts(dim);
    const bool periodic = !std::holds_alternative<EuclideanBoxRule>(space_->rule());
    const std::size_t denom = std::size_t(1) << level;
    for (std::size_t a = 0; a < dim; ++a) {
        double lo = 0.0, span = 0.0;
        if (const auto* b = std::get_if<EuclideanBoxRule>(&space_->rule())) {
            lo = b->lo[a];
            span = b->hi[a] - b->lo[a];
        } else if (const auto* t = std::get_if<FlatTorusRule>(&space_->rule())) {
            span = t->periods[a];
        } else {
            span = std::get<CircleArcRule>(space_->rule()).circumference;
        }
        std::size_t n = periodic ? denom : denom + 1;
        axis_vals[a].resize(n);
        for (std::size_t j = 0; j < n; ++j) axis_vals[a][j] = lo + span * double(j) / double(denom);
        counts[a] = n;
    }
    std::vector<std::size_t> idx(dim, 0);
    for (;;) {
        bool all_even = level > 0;
        if (level > 0)
            for (std::size_t a = 0; a < dim; ++a)
                if (idx[a] % 2 != 0) { all_even = false; break; }
        if (!all_even) {
            Point p(dim);
            for (std::size_t a = 0; a < dim; ++a) p[a] = axis_vals[a][idx[a]];
            cache_.push_back(std::move(p));
        }
        // lexicographic advance, last axis fastest
        std::size_t a = dim;
        while (a > 0) {
            --a;
            if (++idx[a] < counts[a]) break;
            idx[a] = 0;
            if (a == 0) { level_ends_.push_back(cache_.size()); return; }
        }
    }
}

void DenseSequence::extend_to(std::size_t n) const {
    while (cache_.size() < n) {
        if (next_level_ > 30) throw std::length_error("DenseSequence: enumeration request too large");
        emit_level(next_level_++);
    }
}

Point DenseSequence::point(std::size_t i) const {
    if (i == 0) throw std::invalid_argument("dense_point: index is 1-based");
    std::lock_guard<std::mutex> lock(mu_);
    extend_to(i);
    return cache_[i - 1];
}

std::size_t DenseSequence::level_prefix_size(unsigned level) const {
    std::lock_guard<std::mutex> lock(mu_);
    while (next_level_ <= level) emit_level(next_level_++);
    return level_ends_[level];
}

// --- free operations ------------------------------------------------------

double distance(const AmbientSpace& space, const Point& x, const Point& y) {
    return space.distance(x, y);
}

double diameter(const AmbientSpace& space, const FinitePointSet& A) {
    if (A.empty()) throw std::invalid_argument("diameter: empty set");
    double best = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = i + 1; j < A.size(); ++j)
            best = std::max(best, space.distance(A.points[i], A.points[j]));
    return best;
}

FinitePointSet connected_component(const AmbientSpace& space, const FinitePointSet& A,
                                   const Point& x, double link_radius) {
    if (A.empty()) throw std::invalid_argument("connected_component: empty set");
    if (!(link_radius > 0)) throw std::invalid_argument("connected_component: link_radius must be positive");
    std::size_t start = A.size();
    for (std::size_t i = 0; i < A.size(); ++i)
        if (space.distance(A.points[i], x) <= 1e-12) { start = i; break; }
    if (start == A.size())
        throw std::invalid_argument("connected_component: seed point is not a member of the set");

    std::vector<char> seen(A.size(), 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < A.size(); ++j)
            if (!seen[j] && space.distance(A.points[i], A.points[j]) <= link_radius) {
                seen[j] = 1;
                stack.push_back(j);
            }
    }
    FinitePointSet out;
    out.mesh = A.mesh;
    for (std::size_t i = 0; i < A.size(); ++i)
        if (seen[i]) out.points.push_back(A.points[i]);
    return out;
}

Point dense_point(const DenseSequence& seq, std::size_t i) { return seq.point(i); }

}  // namespace whitlyap
