#pragma once

#include <functional>
#include <optional>

#include "whitlyap/systems.hpp"

namespace whitlyap {

enum class Direction { Forward, Backward };

/// Time-stamped sampled trajectory piece. For maps the "times" are iterate
/// indices. `exited` records that the stop predicate fired; the segment holds
/// the samples strictly before the exit.
struct OrbitSegment {
    Point base;
    std::vector<double> times;
    std::vector<Point> points;
    bool exited = false;
    std::optional<double> exit_time;

    FinitePointSet as_point_set(const AmbientSpace& space) const;
};

/// Metric-ball neighborhood data for an isolated singularity: 0 < rho < r.
struct NeighborhoodSpec {
    Point p;
    double r = 0.0;
    double rho = 0.0;

    void validate() const;
};

struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IsolationViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using RegionPredicate = std::function<bool(const Point&)>;

/// Sample the orbit of x at the system step until `stop` fires (exit recorded)
/// or T_max is reached. `stop` may be null.
OrbitSegment sample_orbit(const SystemSpec& sys, const Point& x, Direction direction,
                          double T_max, const RegionPredicate& stop = nullptr);

/// Forward orbit sampled until within eps_stop of p, with p appended.
/// Throws NonConvergenceError if T_max is reached first.
FinitePointSet orbit_closure_to_point(const SystemSpec& sys, const AmbientSpace& space,
                                      const Point& x, const Point& p, double eps_stop,
                                      double T_max);

/// True iff the sampled orbit component of x inside B_r(p) meets B_rho(p).
bool adapted_membership(const SystemSpec& sys, const AmbientSpace& space,
                        const NeighborhoodSpec& nbhd, const Point& x, double horizon);

/// Orbit segment of x inside the region U, truncated at the first exit.
OrbitSegment orbit_segment_in_U(const SystemSpec& sys, const Point& x, const RegionPredicate& in_U,
                                Direction direction, double horizon);

enum class ManifoldSide { Stable, Unstable };

/// Sampled W^s_U(p) / W^u_U(p). Catalog systems with known eigen-structure get
/// an analytic sample; otherwise a grid of density grid_density is classified
/// by convergence within the horizon. Always contains p.
FinitePointSet invariant_manifold_sample(const SystemSpec& sys, const AmbientSpace& space,
                                         const NeighborhoodSpec& nbhd, ManifoldSide which,
                                         double grid_density, double horizon);

/// di(x,y) = min{ d(x,y), d(x,L) + d(y,L) } on the base space.
double quotient_distance(const AmbientSpace& base, const FinitePointSet& lambda, const Point& x,
                         const Point& y);

struct AdaptedSearchResult {
    NeighborhoodSpec nbhd;
    double audit_resolution = 0.0;  // sampling scale of the audit
    int starts_checked = 0;
    std::vector<Point> violations;  // starts whose segment left U_rho between member runs
};

/// Search rho in { r/2, r/4, ... } until the sampled adapted-neighborhood
/// audit passes: orbit segments with endpoints in U_rho and trajectory within
/// the closure of B_r stay in U_rho. The audit can only falsify at its
/// resolution; the result records that resolution.
AdaptedSearchResult find_adapted_neighborhood(const SystemSpec& sys, const AmbientSpace& space,
                                              const Point& p, double r, double grid_density,
                                              double horizon);

}  // namespace whitlyap
