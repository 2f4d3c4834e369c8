#include "whitlyap/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace whitlyap {

namespace {

bool finite_point(const Point& x) {
    for (double c : x)
        if (!std::isfinite(c)) return false;
    return true;
}

Point advance(const SystemSpec& sys, const Point& x, Direction dir) {
    if (sys.kind() == SystemKind::Flow)
        return sys.rk4_step(x, dir == Direction::Forward ? sys.step() : -sys.step());
    return dir == Direction::Forward ? sys.map_forward(x) : sys.map_inverse(x);
}

}  // namespace

FinitePointSet OrbitSegment::as_point_set(const AmbientSpace& space) const {
    FinitePointSet out;
    out.points = points;
    double gap = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        gap = std::max(gap, space.distance(points[i], points[i + 1]));
    out.mesh = gap / 2.0;
    return out;
}

void NeighborhoodSpec::validate() const {
    if (!(r > 0) || !(rho > 0) || !(rho < r))
        throw std::invalid_argument("NeighborhoodSpec: need 0 < rho < r");
}

OrbitSegment sample_orbit(const SystemSpec& sys, const Point& x, Direction direction, double T_max,
                          const RegionPredicate& stop) {
    if (!(T_max > 0)) throw std::invalid_argument("sample_orbit: T_max must be positive");
    if (sys.kind() == SystemKind::Flow && sys.step() > T_max)
        throw std::invalid_argument("sample_orbit: integrator step exceeds T_max");
    const double h = sys.kind() == SystemKind::Flow ? sys.step() : 1.0;

    OrbitSegment seg;
    seg.base = x;
    if (stop && stop(x))
        throw std::invalid_argument("sample_orbit: start point already outside the region");
    seg.times.push_back(0.0);
    seg.points.push_back(x);
    Point cur = x;
    double t = 0.0;
    std::size_t steps = std::size_t(std::floor(T_max / h + 1e-9));
    for (std::size_t k = 1; k <= steps; ++k) {
        cur = advance(sys, cur, direction);
        t = double(k) * h;
        if (!finite_point(cur))
            throw NumericalError("sample_orbit: non-finite state at t=" + std::to_string(t));
        if (stop && stop(cur)) {
            seg.exited = true;
            seg.exit_time = direction == Direction::Forward ? t : -t;
            break;
        }
        seg.times.push_back(direction == Direction::Forward ? t : -t);
        seg.points.push_back(cur);
    }
    return seg;
}

FinitePointSet orbit_closure_to_point(const SystemSpec& sys, const AmbientSpace& space,
                                      const Point& x, const Point& p, double eps_stop,
                                      double T_max) {
    if (!(eps_stop > 0)) throw std::invalid_argument("orbit_closure_to_point: eps_stop must be positive");
    space.require_inside(x, "orbit_closure_to_point");
    const double h = sys.kind() == SystemKind::Flow ? sys.step() : 1.0;

    FinitePointSet out;
    Point cur = x;
    double t = 0.0, gap = 0.0;
    bool converged = space.distance(cur, p) <= eps_stop;
    out.points.push_back(cur);
    while (!converged) {
        if (t >= T_max)
            throw NonConvergenceError("orbit_closure_to_point: still " +
                                      std::to_string(space.distance(cur, p)) + " from target at T_max");
        Point next = advance(sys, cur, Direction::Forward);
        t += h;
        if (!finite_point(next))
            throw NumericalError("orbit_closure_to_point: non-finite state at t=" + std::to_string(t));
        gap = std::max(gap, space.distance(cur, next));
        out.points.push_back(next);
        cur = std::move(next);
        converged = space.distance(cur, p) <= eps_stop;
    }
    out.points.push_back(p);
    out.mesh = std::max(gap, eps_stop);
    return out;
}

bool adapted_membership(const SystemSpec& sys, const AmbientSpace& space,
                        const NeighborhoodSpec& nbhd, const Point& x, double horizon) {
    nbhd.validate();
    if (space.distance(x, nbhd.p) > nbhd.r)
        throw std::invalid_argument("adapted_membership: point outside B_r(p)");
    auto leaves_ball = [&](const Point& y) { return space.distance(y, nbhd.p) > nbhd.r; };
    for (Direction dir : {Direction::Forward, Direction::Backward}) {
        OrbitSegment seg = sample_orbit(sys, x, dir, horizon, leaves_ball);
        for (const Point& y : seg.points)
            if (space.distance(y, nbhd.p) <= nbhd.rho) return true;
    }
    return false;
}

OrbitSegment orbit_segment_in_U(const SystemSpec& sys, const Point& x, const RegionPredicate& in_U,
                                Direction direction, double horizon) {
    if (!in_U(x)) throw std::invalid_argument("orbit_segment_in_U: point not in U");
    return sample_orbit(sys, x, direction, horizon, [&](const Point& y) { return !in_U(y); });
}

namespace {

// Axis-aligned bounding box of B_r(p) intersected with the domain, sampled at
// the given density. Points outside B_r are dropped.
std::vector<Point> ball_grid(const AmbientSpace& space, const Point& p, double r, double density) {
    std::size_t dim = space.dim();
    std::size_t steps = std::size_t(std::ceil(2.0 * r / density));
    std::vector<Point> out;
    std::vector<std::size_t> idx(dim, 0);
    for (;;) {
        Point x(dim);
        for (std::size_t a = 0; a < dim; ++a) x[a] = p[a] - r + (2.0 * r) * double(idx[a]) / double(steps);
        if (space.contains(x) && space.distance(x, p) <= r) out.push_back(x);
        std::size_t a = dim;
        bool done = true;
        while (a > 0) {
            --a;
            if (++idx[a] <= steps) { done = false; break; }
            idx[a] = 0;
        }
        if (done) break;
    }
    return out;
}

FinitePointSet line_sample(const AmbientSpace& space, const Point& p, const Point& dir_unit,
                           double r, double density) {
    FinitePointSet out;
    out.mesh = density;
    std::size_t n = std::size_t(std::ceil(r / density));
    for (std::size_t k = 0; k <= n; ++k) {
        double t = r * double(k) / double(n);
        for (double sign : {1.0, -1.0}) {
            if (k == 0 && sign < 0) continue;
            Point x(p.size());
            for (std::size_t a = 0; a < p.size(); ++a) x[a] = p[a] + sign * t * dir_unit[a];
            if (space.contains(x) && space.distance(x, p) <= r) out.points.push_back(x);
        }
    }
    return out;
}

}  // namespace

FinitePointSet invariant_manifold_sample(const SystemSpec& sys, const AmbientSpace& space,
                                         const NeighborhoodSpec& nbhd, ManifoldSide which,
                                         double grid_density, double horizon) {
    nbhd.validate();
    if (!(grid_density > 0)) throw std::invalid_argument("invariant_manifold_sample: bad grid density");
    const Point& p = nbhd.p;
    const double r = nbhd.r;

    auto near_origin = [&] {
        for (double c : p)
            if (std::fabs(c) > 1e-12) return false;
        return true;
    };

    // Analytic overrides where the catalog knows the eigen-structure.
    if (sys.catalog() == Catalog::PlanarSaddle && near_origin()) {
        Point axis = which == ManifoldSide::Stable ? Point{0.0, 1.0} : Point{1.0, 0.0};
        return line_sample(space, p, axis, r, grid_density);
    }
    if (sys.catalog() == Catalog::CatMap && near_origin()) {
        const double s5 = std::sqrt(5.0);
        // Eigenvectors of [[2,1],[1,1]]: unstable (1,(s5-1)/2), stable (1,-(s5+1)/2).
        double slope = which == ManifoldSide::Unstable ? (s5 - 1.0) / 2.0 : -(s5 + 1.0) / 2.0;
        double nrm = std::hypot(1.0, slope);
        return line_sample(space, p, {1.0 / nrm, slope / nrm}, r, grid_density);
    }
    if (sys.catalog() == Catalog::LinearNode) {
        if (which == ManifoldSide::Unstable) return FinitePointSet({p}, grid_density);
        FinitePointSet out(std::vector<Point>{}, grid_density);
        out.points = ball_grid(space, p, r, grid_density);
        if (out.points.empty()) out.points.push_back(p);
        return out;
    }

    // Grid classification fallback.
    auto leaves_ball = [&](const Point& y) { return space.distance(y, nbhd.p) > r; };
    Direction dir = which == ManifoldSide::Stable ? Direction::Forward : Direction::Backward;
    FinitePointSet out(std::vector<Point>{p}, grid_density);
    double conv_tol = std::max(grid_density, nbhd.rho);
    for (const Point& g : ball_grid(space, p, r, grid_density)) {
        try {
            OrbitSegment seg = sample_orbit(sys, g, dir, horizon, leaves_ball);
            if (!seg.exited && space.distance(seg.points.back(), p) <= conv_tol &&
                space.distance(g, p) > 1e-12)
                out.points.push_back(g);
        } catch (const NumericalError&) {
            // diverging grid point, not on the manifold
        }
    }
    return out;
}

double quotient_distance(const AmbientSpace& base, const FinitePointSet& lambda, const Point& x,
                         const Point& y) {
    if (lambda.empty()) throw std::invalid_argument("quotient_distance: empty collapse set");
    double direct = base.distance(x, y);
    double via = base.distance_to_set(x, lambda) + base.distance_to_set(y, lambda);
    return std::min(direct, via);
}

AdaptedSearchResult find_adapted_neighborhood(const SystemSpec& sys, const AmbientSpace& space,
                                              const Point& p, double r, double grid_density,
                                              double horizon) {
    if (!(r > 0)) throw std::invalid_argument("find_adapted_neighborhood: r must be positive");
    std::vector<Point> starts = ball_grid(space, p, r, grid_density);

    for (double rho = r / 2.0; rho > r / 512.0; rho /= 2.0) {
        AdaptedSearchResult res;
        res.nbhd = NeighborhoodSpec{p, r, rho};
        res.starts_checked = int(starts.size());
        // audit resolution: integrator displacement scale plus the start grid
        double max_speed = 0.0;
        for (const Point& s : starts)
            if (sys.kind() == SystemKind::Flow) {
                Point v = sys.vector_field(s);
                max_speed = std::max(max_speed, std::sqrt([&] {
                                         double t = 0;
                                         for (double c : v) t += c * c;
                                         return t;
                                     }()));
            }
        double step_disp = sys.kind() == SystemKind::Flow ? max_speed * sys.step() : grid_density;
        res.audit_resolution = std::max(grid_density, step_disp);

        for (const Point& x : starts) {
            // Full sampled trajectory through x, both directions, inside the domain.
            std::vector<Point> traj;
            auto outside = [&](const Point& y) { return !space.contains(y); };
            try {
                OrbitSegment back = sample_orbit(sys, x, Direction::Backward, horizon, outside);
                OrbitSegment fwd = sample_orbit(sys, x, Direction::Forward, horizon, outside);
                traj.assign(back.points.rbegin(), back.points.rend());
                traj.insert(traj.end(), fwd.points.begin() + 1, fwd.points.end());
            } catch (const NumericalError&) {
                continue;  // trajectory blew up outside the compact part, irrelevant here
            }
            // Runs inside B_r; a run is a U_rho member iff it meets B_rho.
            std::vector<std::pair<std::size_t, std::size_t>> runs;
            std::vector<bool> member;
            std::size_t i = 0;
            while (i < traj.size()) {
                if (space.distance(traj[i], p) > r) { ++i; continue; }
                std::size_t j = i;
                bool meets = false;
                while (j < traj.size() && space.distance(traj[j], p) <= r) {
                    if (space.distance(traj[j], p) <= rho) meets = true;
                    ++j;
                }
                runs.emplace_back(i, j);
                member.push_back(meets);
                i = j;
            }
            // An orbit segment with endpoints in member runs that stays within
            // the closure of B_r (at audit resolution) must stay in U_rho.
            for (std::size_t a = 0; a + 1 < runs.size(); ++a) {
                if (!member[a]) continue;
                for (std::size_t b = a + 1; b < runs.size(); ++b) {
                    if (!member[b]) continue;
                    bool near_closure = true;
                    for (std::size_t k = runs[a].second; k < runs[b].first && near_closure; ++k)
                        if (space.distance(traj[k], p) > r + res.audit_resolution) near_closure = false;
                    bool interior_ok = true;
                    for (std::size_t k = runs[a].second; k < runs[b].first && interior_ok; ++k) {
                        bool in_member_run = false;
                        for (std::size_t c = a; c <= b; ++c)
                            if (member[c] && k >= runs[c].first && k < runs[c].second) in_member_run = true;
                        if (!in_member_run) interior_ok = false;
                    }
                    if (near_closure && !interior_ok) res.violations.push_back(x);
                }
            }
        }
        if (res.violations.empty()) return res;
    }
    throw std::runtime_error("find_adapted_neighborhood: no rho passed the sampled audit");
}

}  // namespace whitlyap
