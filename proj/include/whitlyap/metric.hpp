#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include "whitlyap/geometry.hpp"

namespace whitlyap {

/// Finite, ordered sample of a compact set. `mesh` is the claimed density:
/// every point of the intended set lies within `mesh` of some listed point.
struct FinitePointSet {
    std::vector<Point> points;
    double mesh = 0.0;

    FinitePointSet() = default;
    explicit FinitePointSet(std::vector<Point> pts, double mesh_ = 0.0)
        : points(std::move(pts)), mesh(mesh_) {}

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
};

class AmbientSpace;
using SpacePtr = std::shared_ptr<const AmbientSpace>;

struct EuclideanBoxRule {
    std::vector<double> lo, hi;
};
struct FlatTorusRule {
    std::vector<double> periods;
};
struct CircleArcRule {
    double circumference;
};
struct QuotientCollapseRule {
    SpacePtr base;
    FinitePointSet lambda;  // the class collapsed to a single point
};

using MetricRule = std::variant<EuclideanBoxRule, FlatTorusRule, CircleArcRule, QuotientCollapseRule>;

/// Compact metric space: a domain, a distance rule and an a-priori diameter bound.
class AmbientSpace {
  public:
    static SpacePtr euclidean_box(std::vector<double> lo, std::vector<double> hi);
    static SpacePtr flat_torus(std::vector<double> periods);
    static SpacePtr circle(double circumference);
    /// Collapse-to-a-point quotient of `base` identifying all of `lambda`:
    /// di(x,y) = min{ d(x,y), d(x,L) + d(y,L) }.
    static SpacePtr quotient_collapse(SpacePtr base, FinitePointSet lambda);

    std::size_t dim() const { return dim_; }
    double diameter_upper() const { return diameter_upper_; }
    const MetricRule& rule() const { return rule_; }

    double distance(const Point& x, const Point& y) const;
    bool contains(const Point& x, double tol = 1e-9) const;
    void require_inside(const Point& x, const char* what) const;

    /// Distance from x to the nearest sampled point of A.
    double distance_to_set(const Point& x, const FinitePointSet& A) const;

    /// For quotient spaces, the token standing for the collapsed class.
    Point collapsed_point() const;

  private:
    AmbientSpace(std::size_t dim, MetricRule rule, double diam);
    std::size_t dim_;
    MetricRule rule_;
    double diameter_upper_;
};

/// Deterministic dense sequence: dyadic-grid breadth-first enumeration of the
/// domain. Level 0 holds the corner (box) or origin (torus/circle) points,
/// level k adds all grid points of denominator 2^k not seen before, in
/// lexicographic coordinate order. The prefix through level k is
/// (diameter_upper/2^k)-dense in the domain.
class DenseSequence {
  public:
    explicit DenseSequence(SpacePtr space);

    /// 1-based index into the fixed enumeration.
    Point point(std::size_t i) const;

    /// Number of points in the enumeration through dyadic level k.
    std::size_t level_prefix_size(unsigned level) const;

    const SpacePtr& space() const { return metric_space_; }

  private:
    void extend_to(std::size_t n) const;
    void emit_level(unsigned level) const;

    SpacePtr space_;           // box/torus/circle space the grid lives in
    SpacePtr metric_space_;    // space whose metric callers asked for (may be quotient)
    mutable std::mutex mu_;
    mutable std::vector<Point> cache_;
    mutable std::vector<std::size_t> level_ends_;
    mutable unsigned next_level_ = 0;
};

using DenseSeqPtr = std::shared_ptr<DenseSequence>;

// --- operations -----------------------------------------------------------

double distance(const AmbientSpace& space, const Point& x, const Point& y);

/// Max pairwise distance over the sampled set; 0 iff a singleton.
double diameter(const AmbientSpace& space, const FinitePointSet& A);

/// Component of the graph on A with edges between points at distance
/// <= link_radius, seeded at x (x must be a member of A).
FinitePointSet connected_component(const AmbientSpace& space, const FinitePointSet& A,
                                   const Point& x, double link_radius);

Point dense_point(const DenseSequence& seq, std::size_t i);

}  // namespace whitlyap
