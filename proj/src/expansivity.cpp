#include "whitlyap/expansivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace whitlyap {

namespace {

Point wrap_into(const AmbientSpace& space, Point x) {
    if (const auto* t = std::get_if<FlatTorusRule>(&space.rule())) {
        for (std::size_t a = 0; a < x.size(); ++a) x[a] = wrap_coord(x[a], t->periods[a]);
    } else if (const auto* c = std::get_if<CircleArcRule>(&space.rule())) {
        x[0] = wrap_coord(x[0], c->circumference);
    }
    return x;
}

double min_period(const AmbientSpace& space) {
    if (const auto* t = std::get_if<FlatTorusRule>(&space.rule()))
        return *std::min_element(t->periods.begin(), t->periods.end());
    if (const auto* c = std::get_if<CircleArcRule>(&space.rule())) return c->circumference;
    return std::numeric_limits<double>::infinity();
}

double seg_length(const Chain::LinearSegment& s) {
    double t = 0.0;
    for (std::size_t a = 0; a < s.a.size(); ++a) t += sqr(s.b[a] - s.a[a]);
    return std::sqrt(t);
}

std::vector<Point> resample_segment(const AmbientSpace& space, const Chain::LinearSegment& s,
                                    double eps, std::size_t budget) {
    double len = seg_length(s);
    if (len == 0.0) return {wrap_into(space, s.a)};
    std::size_t n = std::size_t(std::ceil(len / eps * (1.0 + 1e-9))) + 1;
    if (n > budget)
        throw RefinementOverflow("chain refinement needs " + std::to_string(n) +
                                 " points, budget is " + std::to_string(budget));
    std::vector<Point> pts(n);
    for (std::size_t k = 0; k < n; ++k) {
        double t = double(k) / double(n - 1);
        Point p(s.a.size());
        for (std::size_t a = 0; a < p.size(); ++a) p[a] = s.a[a] + t * (s.b[a] - s.a[a]);
        pts[k] = wrap_into(space, std::move(p));
    }
    return pts;
}

std::vector<Point> resample_arc(const AmbientSpace& space, const Chain::Arc& arc, double eps,
                                std::size_t budget) {
    double len = std::fabs(arc.b - arc.a);
    if (len == 0.0) return {wrap_into(space, {arc.a})};
    std::size_t n = std::size_t(std::ceil(len / eps * (1.0 + 1e-9))) + 1;
    if (n > budget) throw RefinementOverflow("arc refinement exceeds the point budget");
    std::vector<Point> pts(n);
    for (std::size_t k = 0; k < n; ++k)
        pts[k] = wrap_into(space, {arc.a + (arc.b - arc.a) * double(k) / double(n - 1)});
    return pts;
}

}  // namespace

Chain make_segment_chain(const AmbientSpace& space, const Point& a, const Point& b,
                         double eps_chain) {
    if (!(eps_chain > 0)) throw std::invalid_argument("make_segment_chain: eps_chain must be positive");
    check_dim(a, space.dim(), "make_segment_chain");
    check_dim(b, space.dim(), "make_segment_chain");
    Chain c;
    c.eps_chain = eps_chain;
    c.source = Chain::LinearSegment{a, b};
    c.points = resample_segment(space, Chain::LinearSegment{a, b}, eps_chain, 1'000'000);
    return c;
}

Chain make_arc_chain(const AmbientSpace& space, double a, double b, double eps_chain) {
    if (!(eps_chain > 0)) throw std::invalid_argument("make_arc_chain: eps_chain must be positive");
    if (space.dim() != 1) throw std::invalid_argument("make_arc_chain: 1-d space required");
    Chain c;
    c.eps_chain = eps_chain;
    c.source = Chain::Arc{a, b};
    c.points = resample_arc(space, Chain::Arc{a, b}, eps_chain, 1'000'000);
    return c;
}

double chain_diameter(const AmbientSpace& space, const Chain& c) {
    double cap = min_period(space) / 2.0;
    if (const auto* s = std::get_if<Chain::LinearSegment>(&c.source))
        return std::min(seg_length(*s), cap);
    const auto& arc = std::get<Chain::Arc>(c.source);
    return std::min(std::fabs(arc.b - arc.a), cap);
}

Chain advance_chain(const SystemSpec& map, const AmbientSpace& space, const Chain& c,
                    Direction direction, std::size_t point_budget) {
    if (map.kind() != SystemKind::Map) throw std::invalid_argument("advance_chain: map system required");
    if (c.points.empty()) throw std::invalid_argument("advance_chain: empty chain");
    const bool fwd = direction == Direction::Forward;

    Chain out;
    out.eps_chain = c.eps_chain;
    if (const auto* s = std::get_if<Chain::LinearSegment>(&c.source)) {
        auto m = map.cover_matrix(fwd);
        if (!m) throw std::invalid_argument("advance_chain: map has no linear cover action on segments");
        auto apply = [&](const Point& x) {
            std::size_t n = x.size();
            Point y(n, 0.0);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t cc = 0; cc < n; ++cc) y[r] += (*m)[r * n + cc] * x[cc];
            return y;
        };
        Chain::LinearSegment img{apply(s->a), apply(s->b)};
        out.points = resample_segment(space, img, c.eps_chain, point_budget);
        out.source = img;
        return out;
    }
    const auto& arc = std::get<Chain::Arc>(c.source);
    if (map.catalog() != Catalog::Rotation)
        throw std::invalid_argument("advance_chain: arc chains support rotation maps only");
    double alpha = fwd ? map.params()[0] : -map.params()[0];
    Chain::Arc img{arc.a + alpha, arc.b + alpha};
    out.points = resample_arc(space, img, c.eps_chain, point_budget);
    out.source = img;
    return out;
}

// --- checkers -------------------------------------------------------------

namespace {

// Shared scan: `diam_at` advances the sample and reports the diameter of the
// n-th forward/backward image.
template <class StateT, class AdvanceFn, class DiamFn>
void scan_samples(ExpansivityReport& rep, const std::vector<StateT>& samples, AdvanceFn advance,
                  DiamFn diam_of) {
    rep.first_separation.assign(samples.size(), std::nullopt);
    rep.errors.assign(samples.size(), "");
    bool any_nondegenerate = false;

    for (std::size_t i = 0; i < samples.size(); ++i) {
        try {
            if (diam_of(samples[i]) <= 0.0) continue;  // degenerate, skipped
            any_nondegenerate = true;
            if (diam_of(samples[i]) > rep.delta) {
                rep.first_separation[i] = 0;
                continue;
            }
            StateT f = samples[i], b = samples[i];
            for (long n = 1; n <= rep.horizon; ++n) {
                f = advance(f, true);
                if (diam_of(f) > rep.delta) {
                    rep.first_separation[i] = n;
                    break;
                }
                b = advance(b, false);
                if (diam_of(b) > rep.delta) {
                    rep.first_separation[i] = -n;
                    break;
                }
            }
            if (!rep.first_separation[i] && !rep.witness) {
                rep.witness = i;
                StateT w = samples[i];
                std::vector<double> back;
                for (long n = 1; n <= rep.horizon; ++n) {
                    w = advance(w, false);
                    back.push_back(diam_of(w));
                }
                rep.witness_diameters.assign(back.rbegin(), back.rend());
                w = samples[i];
                rep.witness_diameters.push_back(diam_of(w));
                for (long n = 1; n <= rep.horizon; ++n) {
                    w = advance(w, true);
                    rep.witness_diameters.push_back(diam_of(w));
                }
            }
        } catch (const RefinementOverflow& e) {
            rep.errors[i] = e.what();
        }
    }

    bool all_separated = true;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (rep.errors[i].empty() && diam_of(samples[i]) > 0.0 && !rep.first_separation[i])
            all_separated = false;
    if (!any_nondegenerate)
        rep.verdict = "inconclusive";
    else if (!all_separated)
        rep.verdict = "counterexample";
    else if (std::any_of(rep.errors.begin(), rep.errors.end(),
                         [](const std::string& e) { return !e.empty(); }))
        rep.verdict = "inconclusive";
    else
        rep.verdict = "separated-at-horizon";
}

}  // namespace

ExpansivityReport check_expansive_pairs(const SystemSpec& map, const AmbientSpace& space,
                                        double delta, long horizon,
                                        const std::vector<PairState>& samples) {
    if (horizon < 1) throw std::invalid_argument("check_expansive_pairs: horizon must be >= 1");
    if (!(delta > 0)) throw std::invalid_argument("check_expansive_pairs: delta must be positive");
    ExpansivityReport rep;
    rep.delta = delta;
    rep.horizon = horizon;
    scan_samples(
        rep, samples,
        [&](const PairState& p, bool fwd) {
            return fwd ? PairState{map.map_forward(p.x), map.map_forward(p.y)}
                       : PairState{map.map_inverse(p.x), map.map_inverse(p.y)};
        },
        [&](const PairState& p) { return p.diam(space); });
    return rep;
}

ExpansivityReport check_cw_expansive(const SystemSpec& map, const AmbientSpace& space, double delta,
                                     long horizon, const std::vector<Chain>& seeds) {
    if (horizon < 1) throw std::invalid_argument("check_cw_expansive: horizon must be >= 1");
    if (!(delta > 0)) throw std::invalid_argument("check_cw_expansive: delta must be positive");
    ExpansivityReport rep;
    rep.delta = delta;
    rep.horizon = horizon;
    scan_samples(
        rep, seeds,
        [&](const Chain& c, bool fwd) {
            return advance_chain(map, space, c, fwd ? Direction::Forward : Direction::Backward);
        },
        [&](const Chain& c) { return chain_diameter(space, c); });
    return rep;
}

// --- HyperLyapunov --------------------------------------------------------

HyperLyapunov::HyperLyapunov(SystemSpec map, SpacePtr base_space, double delta, SizeConfig cfg,
                             HyperOpts opts)
    : map_(std::move(map)), space_(std::move(base_space)), delta_(delta), cfg_(std::move(cfg)),
      opts_(opts) {
    if (map_.kind() != SystemKind::Map) throw std::invalid_argument("HyperLyapunov: map system required");
    if (!(delta_ > 0)) throw std::invalid_argument("HyperLyapunov: delta must be positive");
    if (!cfg_.seq) throw std::invalid_argument("HyperLyapunov: missing dense sequence");

    const std::size_t dim = space_->dim();
    token_ = State{FinitePointSet({cfg_.seq->point(1)}), 0.0, std::nullopt};
    tail_ = std::ldexp(space_->diameter_upper(), -cfg_.depth);
    mesh_ = opts_.anchor_spacing / 2.0;

    std::vector<Point> dirs;
    if (dim == 1) {
        dirs = {{1.0}};
    } else {
        dirs = {{1.0, 0.0}, {0.0, 1.0}, {std::sqrt(0.5), std::sqrt(0.5)},
                {std::sqrt(0.5), -std::sqrt(0.5)}};
    }
    if (map_.catalog() == Catalog::CatMap) {
        // Lead with the eigen directions: iterated pair/chain states align
        // with them, and probes must resolve those states to register decrease.
        const double s5 = std::sqrt(5.0);
        double su = (s5 - 1.0) / 2.0, ss = -(s5 + 1.0) / 2.0;
        dirs.insert(dirs.begin(), {1.0 / std::hypot(1.0, ss), ss / std::hypot(1.0, ss)});
        dirs.insert(dirs.begin(), {1.0 / std::hypot(1.0, su), su / std::hypot(1.0, su)});
        dirs.resize(4);  // two eigen directions plus the axes
    }
    auto offset_pair = [&](const Point& anchor, const Point& dir, double mag) {
        Point b(anchor.size());
        for (std::size_t a = 0; a < b.size(); ++a) b[a] = anchor[a] + mag * dir[a];
        b = wrap_into(*space_, std::move(b));
        FinitePointSet pts({anchor, b});
        double r = space_->distance(anchor, b) / 2.0;
        return State{std::move(pts), r, std::nullopt};
    };

    // Dense probe states: the collapsed point first, then anchor x offset
    // pair states at geometrically shrinking scales.
    qs_.push_back(token_);
    {
        std::size_t want = std::size_t(std::max(1, cfg_.depth));
        // Scale-diverse probes at the first anchor keep shrinking states
        // resolvable; later anchors get a coarse sweep.
        for (int m = 0; m < 10 && qs_.size() < want; ++m)
            for (const Point& d : dirs)
                if (qs_.size() < want)
                    qs_.push_back(
                        offset_pair(cfg_.seq->point(1), d, 0.9 * delta_ * std::ldexp(1.0, -m)));
        for (std::size_t a = 2; a <= 8 && qs_.size() < want; ++a)
            for (int m = 0; m < 6 && qs_.size() < want; m += 2)
                for (std::size_t di = 0; di < 2 && di < dirs.size() && qs_.size() < want; ++di)
                    qs_.push_back(
                        offset_pair(cfg_.seq->point(a), dirs[di], 0.9 * delta_ * std::ldexp(1.0, -m)));
        for (int i = 1; i <= int(qs_.size()); ++i) wts_.push_back(std::ldexp(1.0, -i));
    }

    // Coarse anchor grid for the manifold and complement samples.
    std::vector<Point> anchors;
    {
        std::size_t per_axis = std::size_t(std::ceil(space_->diameter_upper() / opts_.anchor_spacing));
        per_axis = std::max<std::size_t>(per_axis, 2);
        std::size_t i = 1;
        // the dyadic enumeration visits the whole domain breadth-first
        std::size_t count = 1;
        for (std::size_t a = 0; a < dim; ++a) count *= per_axis;
        for (; anchors.size() < count; ++i) anchors.push_back(cfg_.seq->point(i));
    }

    wu_.push_back(token_);
    ws_.push_back(token_);
    if (map_.catalog() == Catalog::CatMap) {
        const double s5 = std::sqrt(5.0);
        double su = (s5 - 1.0) / 2.0, ss = -(s5 + 1.0) / 2.0;
        Point eu{1.0 / std::hypot(1.0, su), su / std::hypot(1.0, su)};
        Point es{1.0 / std::hypot(1.0, ss), ss / std::hypot(1.0, ss)};
        for (const Point& a : anchors)
            for (int m = 0; m <= 6; ++m) {
                double t = 0.95 * delta_ * std::ldexp(1.0, -m);
                wu_.push_back(offset_pair(a, eu, t));
                ws_.push_back(offset_pair(a, es, t));
            }
    }
    for (const Point& a : anchors)
        for (const Point& d : dirs)
            for (double f : {1.05, 1.2, 1.0 + opts_.collar})
                comp_.push_back(offset_pair(a, d, delta_ * f));

    // Normalization so V vanishes exactly at the collapsed diagonal: the
    // token's hyperspace orbit is itself, so its raw value uses run = {token}.
    std::vector<const State*> plus, minus;
    plus.push_back(&token_);
    for (const State& st : wu_) plus.push_back(&st);
    for (const State& st : comp_) plus.push_back(&st);
    minus.push_back(&token_);
    for (const State& st : ws_) minus.push_back(&st);
    for (const State& st : comp_) minus.push_back(&st);
    v_token_ = mu(plus) - mu(minus);
}

HyperLyapunov::State HyperLyapunov::pair_state(const PairState& A) const {
    FinitePointSet pts({A.x, A.y});
    return State{std::move(pts), A.diam(*space_) / 2.0, std::nullopt};
}

HyperLyapunov::State HyperLyapunov::chain_state(const Chain& C) const {
    FinitePointSet pts(C.points);
    return State{std::move(pts), chain_diameter(*space_, C) / 2.0, C};
}

HyperLyapunov::State HyperLyapunov::advance_state(const State& s, Direction dir) const {
    if (s.chain) {
        Chain next = advance_chain(map_, *space_, *s.chain, dir);
        return chain_state(next);
    }
    State out;
    out.pts.points.reserve(s.pts.size());
    for (const Point& p : s.pts.points)
        out.pts.points.push_back(dir == Direction::Forward ? map_.map_forward(p)
                                                          : map_.map_inverse(p));
    out.radius = diameter(*space_, out.pts) / 2.0;
    return out;
}

double HyperLyapunov::state_dist(const State& a, const State& b) const {
    double dh = hausdorff_distance(*space_, a.pts, b.pts);
    return std::min(dh, a.radius + b.radius);
}

std::vector<HyperLyapunov::State> HyperLyapunov::run_in_U(State s, Direction dir) const {
    std::vector<State> run{std::move(s)};
    for (long n = 0; n < opts_.horizon; ++n) {
        State next = advance_state(run.back(), dir);
        if (2.0 * next.radius >= delta_) break;
        run.push_back(std::move(next));
    }
    return run;
}

double HyperLyapunov::mu(const std::vector<const State*>& set) const {
    double total = 0.0;
    for (std::size_t i = 0; i < qs_.size(); ++i) {
        double mx = 0.0, mn = std::numeric_limits<double>::infinity();
        for (const State* st : set) {
            double d = state_dist(qs_[i], *st);
            mx = std::max(mx, d);
            mn = std::min(mn, d);
        }
        total += (mx - mn) * wts_[i];
    }
    return total;
}

double HyperLyapunov::value(const State& s) const {
    if (s.radius <= 1e-15) return 0.0;  // collapsed diagonal state
    std::vector<State> fwd = run_in_U(s, Direction::Forward);
    std::vector<State> bwd = run_in_U(s, Direction::Backward);
    std::vector<const State*> plus, minus;
    for (const State& st : fwd) plus.push_back(&st);
    for (const State& st : wu_) plus.push_back(&st);
    for (const State& st : comp_) plus.push_back(&st);
    for (const State& st : bwd) minus.push_back(&st);
    for (const State& st : ws_) minus.push_back(&st);
    for (const State& st : comp_) minus.push_back(&st);
    return (mu(plus) - mu(minus)) - v_token_;
}

double HyperLyapunov::strictness_tol() const { return 1e-9 + 2.0 * tail_ + 4.0 * mesh_; }

HyperAuditResult HyperLyapunov::audit(const State& s) const {
    HyperAuditResult res;
    LyapunovReport& rep = res.report;
    rep.depth = int(qs_.size());
    rep.tail_bound = tail_;
    rep.mesh = mesh_;
    rep.truncation_horizon = double(opts_.horizon);
    // Step comparisons share the side sets and the nested runs, so the mesh
    // slack of strictness_tol() does not enter them.
    rep.tol = 1e-9 + 2.0 * tail_;
    if (s.radius <= 1e-15) {
        rep.params = {0.0};
        rep.V = {0.0};
        rep.run_audit();
        return res;
    }

    std::vector<State> fwd = run_in_U(s, Direction::Forward);
    std::vector<State> bwd = run_in_U(s, Direction::Backward);
    std::vector<State> traj(bwd.rbegin(), bwd.rend());
    const std::size_t off = traj.size() - 1;
    traj.insert(traj.end(), fwd.begin() + 1, fwd.end());
    const std::size_t n = traj.size(), m = fwd.size();

    bool fwd_capped = long(fwd.size()) > opts_.horizon;
    bool bwd_capped = long(bwd.size()) > opts_.horizon;
    double min_rad = std::numeric_limits<double>::infinity();
    for (const State& st : traj) min_rad = std::min(min_rad, st.radius);
    res.isolation_suspect = fwd_capped && bwd_capped && min_rad > opts_.iso_tol;

    rep.params.resize(m);
    for (std::size_t k = 0; k < m; ++k) rep.params[k] = double(k);
    rep.V.assign(m, 0.0);
    rep.mu_plus.assign(m, 0.0);
    rep.mu_minus.assign(m, 0.0);

    // per-probe extremes of the fixed side sets
    std::vector<double> d(n), sufmax(n), sufmin(n), premax(n), premin(n);
    for (std::size_t i = 0; i < qs_.size(); ++i) {
        double wuMx = 0.0, wuMn = std::numeric_limits<double>::infinity();
        for (const State& st : wu_) {
            double dd = state_dist(qs_[i], st);
            wuMx = std::max(wuMx, dd);
            wuMn = std::min(wuMn, dd);
        }
        double wsMx = 0.0, wsMn = std::numeric_limits<double>::infinity();
        for (const State& st : ws_) {
            double dd = state_dist(qs_[i], st);
            wsMx = std::max(wsMx, dd);
            wsMn = std::min(wsMn, dd);
        }
        double cMx = 0.0, cMn = std::numeric_limits<double>::infinity();
        for (const State& st : comp_) {
            double dd = state_dist(qs_[i], st);
            cMx = std::max(cMx, dd);
            cMn = std::min(cMn, dd);
        }
        for (std::size_t j = 0; j < n; ++j) d[j] = state_dist(qs_[i], traj[j]);
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
            rep.mu_plus[k] += (std::max({cMx, wuMx, sufmax[j]}) - std::min({cMn, wuMn, sufmin[j]})) * wts_[i];
            rep.mu_minus[k] += (std::max({cMx, wsMx, premax[j]}) - std::min({cMn, wsMn, premin[j]})) * wts_[i];
        }
    }
    for (std::size_t k = 0; k < m; ++k) rep.V[k] = (rep.mu_plus[k] - rep.mu_minus[k]) - v_token_;
    // A state trapped in U at macroscopic diameter is a genuine stall, not a
    // resolution artifact: keep the fine series so the audit reports it.
    if (!res.isolation_suspect) coarsen_to_certified_drops(rep);
    rep.run_audit();
    return res;
}

double HyperLyapunov::value_pair(const PairState& A) const {
    if (A.diam(*space_) >= delta_)
        throw std::invalid_argument("lyap_pair: set diameter is outside the neighborhood U");
    return value(pair_state(A));
}

double HyperLyapunov::value_chain(const Chain& C) const {
    if (chain_diameter(*space_, C) >= delta_)
        throw std::invalid_argument("lyap_chain: chain diameter is outside the neighborhood U");
    return value(chain_state(C));
}

HyperAuditResult HyperLyapunov::audit_pair(const PairState& A) const {
    if (A.diam(*space_) >= delta_)
        throw std::invalid_argument("lyap_pair: set diameter is outside the neighborhood U");
    return audit(pair_state(A));
}

HyperAuditResult HyperLyapunov::audit_chain(const Chain& C) const {
    if (chain_diameter(*space_, C) >= delta_)
        throw std::invalid_argument("lyap_chain: chain diameter is outside the neighborhood U");
    return audit(chain_state(C));
}

double lyap_pair(const HyperLyapunov& lyap, const AmbientSpace&, const PairState& A) {
    return lyap.value_pair(A);
}

double lyap_chain(const HyperLyapunov& lyap, const AmbientSpace&, const Chain& C) {
    return lyap.value_chain(C);
}

}  // namespace whitlyap
