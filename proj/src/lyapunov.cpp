#include "whitlyap/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace whitlyap {

namespace {

// Grid over the underlying box/torus/circle domain at the given spacing.
std::vector<Point> domain_grid(const AmbientSpace& space, double density) {
    const AmbientSpace* s = &space;
    while (const auto* q = std::get_if<QuotientCollapseRule>(&s->rule())) s = q->base.get();
    std::size_t dim = s->dim();
    std::vector<double> lo(dim, 0.0), span(dim, 0.0);
    bool periodic = false;
    if (const auto* b = std::get_if<EuclideanBoxRule>(&s->rule())) {
        lo = b->lo;
        for (std::size_t a = 0; a < dim; ++a) span[a] = b->hi[a] - b->lo[a];
    } else if (const auto* t = std::get_if<FlatTorusRule>(&s->rule())) {
        span = t->periods;
        periodic = true;
    } else {
        span[0] = std::get<CircleArcRule>(s->rule()).circumference;
        periodic = true;
    }
    std::vector<std::size_t> steps(dim);
    for (std::size_t a = 0; a < dim; ++a)
        steps[a] = std::max<std::size_t>(1, std::size_t(std::ceil(span[a] / density)));
    std::vector<Point> out;
    std::vector<std::size_t> idx(dim, 0);
    for (;;) {
        Point x(dim);
        for (std::size_t a = 0; a < dim; ++a) x[a] = lo[a] + span[a] * double(idx[a]) / double(steps[a]);
        out.push_back(std::move(x));
        std::size_t a = dim;
        bool done = true;
        while (a > 0) {
            --a;
            std::size_t last = periodic ? steps[a] - 1 : steps[a];
            if (++idx[a] <= last) { done = false; break; }
            idx[a] = 0;
        }
        if (done) break;
    }
    return out;
}

double max_gap(const AmbientSpace& space, const std::vector<Point>& pts) {
    double g = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        g = std::max(g, space.distance(pts[i], pts[i + 1]));
    return g;
}

}  // namespace

void LyapunovReport::run_audit() {
    violations.clear();
    max_step_delta = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < V.size(); ++i) {
        double delta = V[i + 1] - V[i];
        max_step_delta = std::max(max_step_delta, delta);
        if (delta >= -tol) violations.push_back(i);
    }
}

void coarsen_to_certified_drops(LyapunovReport& rep) {
    if (rep.V.size() < 2) return;
    std::vector<std::size_t> keep{0};
    for (std::size_t j = 1; j < rep.V.size(); ++j)
        if (rep.V[j] < rep.V[keep.back()] - rep.tol) keep.push_back(j);
    auto pick = [&](std::vector<double>& v) {
        if (v.empty()) return;
        std::vector<double> out;
        out.reserve(keep.size());
        for (std::size_t j : keep) out.push_back(v[j]);
        v = std::move(out);
    };
    pick(rep.params);
    pick(rep.V);
    pick(rep.mu_plus);
    pick(rep.mu_minus);
}

double lyap_asymptotic(const SystemSpec& sys, const AmbientSpace& space, const Point& p,
                       const SizeConfig& cfg, const Point& x, const IntegrateOpts& opts) {
    FinitePointSet orbit = orbit_closure_to_point(sys, space, x, p, opts.eps_stop, opts.T_max);
    return whitney_size(space, orbit, cfg).value;
}

LyapunovReport lyap_asymptotic_series(const SystemSpec& sys, const AmbientSpace& space,
                                      const Point& p, const SizeConfig& cfg, const Point& x,
                                      const IntegrateOpts& opts) {
    FinitePointSet orbit = orbit_closure_to_point(sys, space, x, p, opts.eps_stop, opts.T_max);
    const std::size_t m = orbit.size() - 1;  // orbit samples; last entry is p itself
    const double h = sys.kind() == SystemKind::Flow ? sys.step() : 1.0;

    LyapunovReport rep;
    rep.depth = cfg.depth;
    rep.tail_bound = cfg.tail_bound();
    rep.mesh = orbit.mesh;
    rep.truncation_horizon = opts.T_max;
    // Consecutive evaluation sets are exactly nested samples, so no mesh term
    // enters the step comparison.
    rep.tol = 1e-9 + 2.0 * rep.tail_bound;
    rep.V.assign(m, 0.0);
    rep.params.resize(m);
    for (std::size_t j = 0; j < m; ++j) rep.params[j] = double(j) * h;

    std::vector<double> d(m + 1);
    for (int i = 1; i <= cfg.depth; ++i) {
        double w = std::ldexp(1.0, -i);
        if (w == 0.0) break;
        Point q = cfg.seq->point(std::size_t(i));
        for (std::size_t j = 0; j <= m; ++j) d[j] = space.distance(q, orbit.points[j]);
        double mx = d[m], mn = d[m];
        // suffix pass: V_j uses {x_j, ..., x_{m-1}, p}
        std::vector<double> vs(m);
        for (std::size_t j = m; j-- > 0;) {
            mx = std::max(mx, d[j]);
            mn = std::min(mn, d[j]);
            vs[j] = (mx - mn) * w;
        }
        for (std::size_t j = 0; j < m; ++j) rep.V[j] += vs[j];
    }
    coarsen_to_certified_drops(rep);
    rep.run_audit();
    return rep;
}

// --- SingularityContext ---------------------------------------------------

SingularityContext::SingularityContext(SystemSpec sys, SpacePtr space, NeighborhoodSpec nbhd,
                                       SizeConfig cfg, double grid_density, double horizon)
    : sys_(std::move(sys)), space_(std::move(space)), nbhd_(std::move(nbhd)), cfg_(std::move(cfg)),
      grid_density_(grid_density), horizon_(horizon) {
    nbhd_.validate();
    if (!cfg_.seq) throw std::invalid_argument("SingularityContext: missing dense sequence");

    for (int i = 1; i <= cfg_.depth; ++i) {
        double w = std::ldexp(1.0, -i);
        if (w == 0.0) break;
        qs_.push_back(cfg_.seq->point(std::size_t(i)));
        wts_.push_back(w);
    }

    Wu_ = invariant_manifold_sample(sys_, *space_, nbhd_, ManifoldSide::Unstable, grid_density_,
                                    horizon_);
    Ws_ = invariant_manifold_sample(sys_, *space_, nbhd_, ManifoldSide::Stable, grid_density_,
                                    horizon_);

    C_.mesh = grid_density_;
    for (const Point& g : domain_grid(*space_, grid_density_))
        if (!in_U(g)) C_.points.push_back(g);
    if (C_.empty())
        throw std::runtime_error("SingularityContext: U covers the sampled domain, no complement");

    mesh_ = std::max({C_.mesh, Wu_.mesh, Ws_.mesh});

    auto tabulate = [&](const FinitePointSet& A, std::vector<double>& mx, std::vector<double>& mn) {
        mx.resize(qs_.size());
        mn.resize(qs_.size());
        for (std::size_t i = 0; i < qs_.size(); ++i) {
            double a = 0.0, b = std::numeric_limits<double>::infinity();
            for (const Point& pt : A.points) {
                double d = space_->distance(qs_[i], pt);
                a = std::max(a, d);
                b = std::min(b, d);
            }
            mx[i] = a;
            mn[i] = b;
        }
    };
    tabulate(C_, maxC_, minC_);
    tabulate(Wu_, maxWu_, minWu_);
    tabulate(Ws_, maxWs_, minWs_);
}

double SingularityContext::strictness_tol() const {
    return 1e-9 + 2.0 * cfg_.tail_bound() + 4.0 * mesh_;
}

bool SingularityContext::in_U(const Point& x) const {
    if (space_->distance(x, nbhd_.p) > nbhd_.r) return false;
    return adapted_membership(sys_, *space_, nbhd_, x, horizon_);
}

std::pair<FinitePointSet, FinitePointSet> SingularityContext::vpm_sets(const Point& x) const {
    if (!in_U(x)) throw std::invalid_argument("vpm_sets: point not in the adapted neighborhood");
    // Inside B_r the orbit component keeps its U membership, so the in-U
    // segment is the in-B_r segment.
    auto in_ball = [&](const Point& y) { return space_->distance(y, nbhd_.p) <= nbhd_.r; };
    OrbitSegment fwd = orbit_segment_in_U(sys_, x, in_ball, Direction::Forward, horizon_);
    OrbitSegment bwd = orbit_segment_in_U(sys_, x, in_ball, Direction::Backward, horizon_);

    auto assemble = [&](const std::vector<Point>& seg, const FinitePointSet& W) {
        FinitePointSet out;
        out.points = seg;
        out.points.insert(out.points.end(), W.points.begin(), W.points.end());
        out.points.insert(out.points.end(), C_.points.begin(), C_.points.end());
        out.mesh = std::max({max_gap(*space_, seg) / 2.0, W.mesh, C_.mesh});
        return out;
    };
    return {assemble(fwd.points, Wu_), assemble(bwd.points, Ws_)};
}

SingularityContext::MuParts SingularityContext::eval(const std::vector<Point>& fwd,
                                                     const std::vector<Point>& bwd) const {
    double mp = 0.0, mm = 0.0;
    for (std::size_t i = 0; i < qs_.size(); ++i) {
        double fmx = 0.0, fmn = std::numeric_limits<double>::infinity();
        for (const Point& pt : fwd) {
            double d = space_->distance(qs_[i], pt);
            fmx = std::max(fmx, d);
            fmn = std::min(fmn, d);
        }
        double bmx = 0.0, bmn = std::numeric_limits<double>::infinity();
        for (const Point& pt : bwd) {
            double d = space_->distance(qs_[i], pt);
            bmx = std::max(bmx, d);
            bmn = std::min(bmn, d);
        }
        mp += (std::max({maxC_[i], maxWu_[i], fmx}) - std::min({minC_[i], minWu_[i], fmn})) * wts_[i];
        mm += (std::max({maxC_[i], maxWs_[i], bmx}) - std::min({minC_[i], minWs_[i], bmn})) * wts_[i];
    }
    return {mp, mm};
}

double SingularityContext::value(const Point& x) const {
    if (!in_U(x)) throw std::invalid_argument("lyap_singularity: point not in the adapted neighborhood");
    auto in_ball = [&](const Point& y) { return space_->distance(y, nbhd_.p) <= nbhd_.r; };
    OrbitSegment fwd = orbit_segment_in_U(sys_, x, in_ball, Direction::Forward, horizon_);
    OrbitSegment bwd = orbit_segment_in_U(sys_, x, in_ball, Direction::Backward, horizon_);
    MuParts m = eval(fwd.points, bwd.points);
    return m.mu_plus - m.mu_minus;
}

LyapunovReport SingularityContext::series(const Point& x) const {
    if (!in_U(x)) throw std::invalid_argument("lyap series: point not in the adapted neighborhood");
    auto in_ball = [&](const Point& y) { return space_->distance(y, nbhd_.p) <= nbhd_.r; };
    OrbitSegment fwd = orbit_segment_in_U(sys_, x, in_ball, Direction::Forward, horizon_);
    OrbitSegment bwd = orbit_segment_in_U(sys_, x, in_ball, Direction::Backward, horizon_);

    // Full in-U trajectory through x; x sits at index `off`.
    std::vector<Point> traj(bwd.points.rbegin(), bwd.points.rend());
    const std::size_t off = traj.size() - 1;
    traj.insert(traj.end(), fwd.points.begin() + 1, fwd.points.end());
    const std::size_t n = traj.size(), m = fwd.points.size();

    LyapunovReport rep;
    rep.depth = cfg_.depth;
    rep.tail_bound = cfg_.tail_bound();
    rep.mesh = std::max(mesh_, max_gap(*space_, traj) / 2.0);
    rep.truncation_horizon = horizon_;
    // The fixed side sets C, W^u, W^s are shared by every evaluation and the
    // orbit samples are exactly nested, so the step comparison carries no
    // mesh slack; the mesh enters only value-level claims (strictness_tol).
    rep.tol = 1e-9 + 2.0 * rep.tail_bound;
    rep.params = fwd.times;
    rep.V.assign(m, 0.0);
    rep.mu_plus.assign(m, 0.0);
    rep.mu_minus.assign(m, 0.0);

    std::vector<double> d(n), sufmax(n), sufmin(n), premax(n), premin(n);
    for (std::size_t i = 0; i < qs_.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) d[j] = space_->distance(qs_[i], traj[j]);
        sufmax[n - 1] = sufmin[n - 1] = d[n - 1];
        for (std::size_t j = n - 1; j-- > 0;) {
            sufmax[j] = std::max(d[j], sufmax[j + 1]);
            sufmin[j] = std::min(d[j], sufmin[j + 1]);
        }
        premax[0] = premin[0] = d[0];
        for (std::size_t j = 1; j < n; ++j) {
            premax[j] = std::max(premax[j - 1], d[j]);
            premin[j] = std::min(premin[j - 1], d[j]);
        }
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t j = off + k;
            rep.mu_plus[k] +=
                (std::max({maxC_[i], maxWu_[i], sufmax[j]}) - std::min({minC_[i], minWu_[i], sufmin[j]})) *
                wts_[i];
            rep.mu_minus[k] +=
                (std::max({maxC_[i], maxWs_[i], premax[j]}) - std::min({minC_[i], minWs_[i], premin[j]})) *
                wts_[i];
        }
    }
    for (std::size_t k = 0; k < m; ++k) rep.V[k] = rep.mu_plus[k] - rep.mu_minus[k];
    coarsen_to_certified_drops(rep);
    rep.run_audit();
    return rep;
}

std::pair<FinitePointSet, FinitePointSet> vpm_sets(const SingularityContext& ctx, const Point& x) {
    return ctx.vpm_sets(x);
}

double lyap_singularity(const SingularityContext& ctx, const Point& x) { return ctx.value(x); }

// --- IsolatedLyapunov -----------------------------------------------------

IsolatedLyapunov::IsolatedLyapunov(SystemSpec sys, SpacePtr base_space, FinitePointSet lambda,
                                   const SizeConfig& cfg, const IsolatedOpts& opts)
    : sys_(std::move(sys)), lambda_(std::move(lambda)), cfg_(cfg), opts_(opts) {
    if (lambda_.empty()) throw std::invalid_argument("IsolatedLyapunov: empty invariant set");
    qspace_ = AmbientSpace::quotient_collapse(std::move(base_space), lambda_);
    token_ = qspace_->collapsed_point();

    // Probe starts in U away from Lambda: classify attracting / saddle-like /
    // isolation failure.
    const double horizon = sys_.kind() == SystemKind::Flow ? opts_.integrate.T_max : opts_.horizon;
    const double conv_tol = std::max(opts_.integrate.eps_stop, 2.0 * lambda_.mesh);
    std::vector<Point> probes;
    for (const Point& g : domain_grid(*qspace_, opts_.grid_density)) {
        double d = qspace_->distance(g, token_);
        if (d > conv_tol * 2.0 && d < opts_.r) probes.push_back(g);
    }
    if (probes.size() > std::size_t(opts_.probe_count)) {
        std::vector<Point> thin;
        for (std::size_t i = 0; i < probes.size(); i += probes.size() / std::size_t(opts_.probe_count))
            thin.push_back(probes[i]);
        probes = std::move(thin);
    }
    bool all_converge = !probes.empty();
    auto leaves_U = [&](const Point& y) { return qspace_->distance(y, token_) > opts_.r; };
    for (const Point& x : probes) {
        try {
            OrbitSegment seg = sample_orbit(sys_, x, Direction::Forward, horizon, leaves_U);
            if (seg.exited) {
                all_converge = false;
                continue;
            }
            if (qspace_->distance(seg.points.back(), token_) > conv_tol) {
                // Check the backward direction: a full orbit trapped in U off
                // Lambda contradicts isolation.
                OrbitSegment back = sample_orbit(sys_, x, Direction::Backward, horizon, leaves_U);
                all_converge = false;
                if (!back.exited && qspace_->distance(back.points.back(), token_) > conv_tol)
                    throw IsolationViolation("IsolatedLyapunov: orbit of " + point_str(x) +
                                             " stays in U for the full horizon off the invariant set");
            }
        } catch (const NumericalError&) {
            all_converge = false;
        }
    }
    attracting_ = all_converge;

    if (!attracting_) {
        NeighborhoodSpec nbhd;
        if (opts_.rho > 0) {
            nbhd = NeighborhoodSpec{token_, opts_.r, opts_.rho};
        } else {
            nbhd = find_adapted_neighborhood(sys_, *qspace_, token_, opts_.r, opts_.grid_density,
                                             opts_.horizon)
                       .nbhd;
        }
        ctx_ = std::make_shared<SingularityContext>(sys_, qspace_, nbhd, cfg_, opts_.grid_density,
                                                    opts_.horizon);
        v_token_ = ctx_->value(token_);
    }
}

// Convergence to a sampled set cannot be resolved below its mesh: widen the
// stop tolerance accordingly, matching the classification pass.
IntegrateOpts IsolatedLyapunov::mesh_aware(const IntegrateOpts& opts) const {
    IntegrateOpts out = opts;
    out.eps_stop = std::max(opts.eps_stop, 2.0 * lambda_.mesh);
    return out;
}

double IsolatedLyapunov::value(const Point& x) const {
    if (qspace_->distance(x, token_) <= lambda_.mesh + 1e-12) return 0.0;
    if (attracting_)
        return lyap_asymptotic(sys_, *qspace_, token_, cfg_, x, mesh_aware(opts_.integrate));
    return ctx_->value(x) - v_token_;
}

LyapunovReport IsolatedLyapunov::series(const Point& x) const {
    if (attracting_)
        return lyap_asymptotic_series(sys_, *qspace_, token_, cfg_, x, mesh_aware(opts_.integrate));
    LyapunovReport rep = ctx_->series(x);
    for (double& v : rep.V) v -= v_token_;
    return rep;
}

double IsolatedLyapunov::mesh_slack() const {
    double mesh = lambda_.mesh;
    if (ctx_) mesh = std::max(mesh, ctx_->mesh());
    return 1e-9 + 2.0 * cfg_.tail_bound() + 4.0 * mesh;
}

double lyap_isolated_set(const SystemSpec& sys, const SpacePtr& base_space,
                         const FinitePointSet& lambda, const SizeConfig& cfg, const Point& x,
                         const IsolatedOpts& opts) {
    return IsolatedLyapunov(sys, base_space, lambda, cfg, opts).value(x);
}

double lyap_discrete(const SystemSpec& map, const SpacePtr& base_space,
                     const FinitePointSet& lambda, const SizeConfig& cfg, const Point& x,
                     const IsolatedOpts& opts) {
    if (map.kind() != SystemKind::Map)
        throw std::invalid_argument("lyap_discrete: map system required");
    return IsolatedLyapunov(map, base_space, lambda, cfg, opts).value(x);
}

}  // namespace whitlyap
