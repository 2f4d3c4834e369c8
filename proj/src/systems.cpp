#include "whitlyap/systems.hpp"

#include <cmath>

namespace whitlyap {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> invert_matrix(const std::vector<double>& m, std::size_t n) {
    // Gauss-Jordan with partial pivoting.
    std::vector<double> a = m, inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
        if (std::fabs(a[piv * n + c]) < 1e-12)
            throw std::invalid_argument("custom_linear: matrix is singular, map needs an inverse");
        for (std::size_t k = 0; k < n; ++k) {
            std::swap(a[piv * n + k], a[c * n + k]);
            std::swap(inv[piv * n + k], inv[c * n + k]);
        }
        double d = a[c * n + c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c * n + k] /= d;
            inv[c * n + k] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            double f = a[r * n + c];
            for (std::size_t k = 0; k < n; ++k) {
                a[r * n + k] -= f * a[c * n + k];
                inv[r * n + k] -= f * inv[c * n + k];
            }
        }
    }
    return inv;
}

Point mat_apply(const std::vector<double>& m, const Point& x) {
    std::size_t n = x.size();
    Point y(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) y[r] += m[r * n + c] * x[c];
    return y;
}

}  // namespace

SystemSpec::SystemSpec(SystemKind kind, Catalog catalog, std::vector<double> params, double h,
                       bool closed_form, std::size_t dim)
    : kind_(kind), catalog_(catalog), params_(std::move(params)), h_(h),
      closed_form_(closed_form), dim_(dim) {
    if (kind_ == SystemKind::Flow && !(h_ > 0))
        throw std::invalid_argument("SystemSpec: flows need integrator step h > 0");
}

SystemSpec SystemSpec::linear_node(std::vector<double> rates, double h) {
    if (rates.empty()) throw std::invalid_argument("linear_node: need at least one rate");
    for (double r : rates)
        if (!(r < 0)) throw std::invalid_argument("linear_node: all rates must be negative");
    std::size_t dim = rates.size();
    return SystemSpec(SystemKind::Flow, Catalog::LinearNode, std::move(rates), h, true, dim);
}

SystemSpec SystemSpec::planar_saddle(double lambda_u, double lambda_s, double h) {
    if (!(lambda_u > 0) || !(lambda_s < 0))
        throw std::invalid_argument("planar_saddle: need lambda_u > 0 and lambda_s < 0");
    return SystemSpec(SystemKind::Flow, Catalog::PlanarSaddle, {lambda_u, lambda_s}, h, true, 2);
}

SystemSpec SystemSpec::north_south_circle(double h) {
    return SystemSpec(SystemKind::Flow, Catalog::NorthSouthCircle, {}, h, true, 1);
}

SystemSpec SystemSpec::attracting_circle(double h) {
    return SystemSpec(SystemKind::Flow, Catalog::AttractingCircle, {}, h, true, 2);
}

SystemSpec SystemSpec::cat_map() {
    return SystemSpec(SystemKind::Map, Catalog::CatMap, {}, 1.0, true, 2);
}

SystemSpec SystemSpec::rotation(double alpha) {
    return SystemSpec(SystemKind::Map, Catalog::Rotation, {alpha}, 1.0, true, 1);
}

SystemSpec SystemSpec::custom_linear(SystemKind kind, std::size_t dim,
                                     std::vector<double> row_major, double h) {
    if (row_major.size() != dim * dim)
        throw std::invalid_argument("custom_linear: matrix size must be dim*dim");
    SystemSpec s(kind, Catalog::CustomLinear, row_major, h, false, dim);
    s.matrix_ = std::move(row_major);
    if (kind == SystemKind::Map) s.inverse_ = invert_matrix(s.matrix_, dim);
    return s;
}

SystemSpec SystemSpec::from_catalog_id(const std::string& id, const std::vector<double>& params,
                                       double h) {
    if (id == "linear_node") {
        if (params.empty()) return linear_node({-1.0, -2.0}, h);
        return linear_node(params, h);
    }
    if (id == "planar_saddle") {
        if (params.empty()) return planar_saddle(1.0, -1.0, h);
        if (params.size() != 2) throw std::invalid_argument("planar_saddle: expected 2 rates");
        return planar_saddle(params[0], params[1], h);
    }
    if (id == "north_south_circle") return north_south_circle(h);
    if (id == "attracting_circle") return attracting_circle(h);
    if (id == "cat_map") return cat_map();
    if (id == "rotation") {
        if (params.size() != 1) throw std::invalid_argument("rotation: expected 1 angle parameter");
        return rotation(params[0]);
    }
    if (id == "custom_linear_map" || id == "custom_linear_flow") {
        std::size_t dim = std::size_t(std::sqrt(double(params.size())));
        if (dim * dim != params.size())
            throw std::invalid_argument("custom_linear: parameter list must be a square matrix");
        SystemKind k = id == "custom_linear_map" ? SystemKind::Map : SystemKind::Flow;
        return custom_linear(k, dim, params, h);
    }
    throw std::invalid_argument("unknown catalog id: " + id);
}

std::string SystemSpec::catalog_id() const {
    switch (catalog_) {
        case Catalog::LinearNode: return "linear_node";
        case Catalog::PlanarSaddle: return "planar_saddle";
        case Catalog::NorthSouthCircle: return "north_south_circle";
        case Catalog::AttractingCircle: return "attracting_circle";
        case Catalog::CatMap: return "cat_map";
        case Catalog::Rotation: return "rotation";
        case Catalog::CustomLinear:
            return kind_ == SystemKind::Map ? "custom_linear_map" : "custom_linear_flow";
    }
    return "?";
}

SpacePtr SystemSpec::default_space() const {
    switch (catalog_) {
        case Catalog::LinearNode:
        case Catalog::CustomLinear: {
            std::vector<double> lo(dim_, -1.0), hi(dim_, 1.0);
            return AmbientSpace::euclidean_box(lo, hi);
        }
        case Catalog::PlanarSaddle:
            return AmbientSpace::euclidean_box({-1.2, -1.2}, {1.2, 1.2});
        case Catalog::NorthSouthCircle:
            return AmbientSpace::circle(2.0 * kPi);
        case Catalog::AttractingCircle:
            return AmbientSpace::euclidean_box({-1.6, -1.6}, {1.6, 1.6});
        case Catalog::CatMap:
            return AmbientSpace::flat_torus({1.0, 1.0});
        case Catalog::Rotation:
            return AmbientSpace::circle(1.0);
    }
    throw std::logic_error("default_space: unhandled catalog entry");
}

Point SystemSpec::vector_field(const Point& x) const {
    if (kind_ != SystemKind::Flow) throw std::invalid_argument("vector_field: map system");
    check_dim(x, dim_, "vector_field");
    switch (catalog_) {
        case Catalog::LinearNode: {
            Point v(dim_);
            for (std::size_t i = 0; i < dim_; ++i) v[i] = params_[i] * x[i];
            return v;
        }
        case Catalog::PlanarSaddle:
            return {params_[0] * x[0], params_[1] * x[1]};
        case Catalog::NorthSouthCircle:
            return {-std::sin(x[0])};
        case Catalog::AttractingCircle: {
            double r = std::hypot(x[0], x[1]);
            return {x[0] * (1.0 - r) - x[1], x[1] * (1.0 - r) + x[0]};
        }
        case Catalog::CustomLinear:
            return mat_apply(matrix_, x);
        default:
            throw std::logic_error("vector_field: unhandled catalog entry");
    }
}

Point SystemSpec::rk4_step(const Point& x, double h_signed) const {
    Point k1 = vector_field(x);
    Point tmp(dim_);
    for (std::size_t i = 0; i < dim_; ++i) tmp[i] = x[i] + 0.5 * h_signed * k1[i];
    Point k2 = vector_field(tmp);
    for (std::size_t i = 0; i < dim_; ++i) tmp[i] = x[i] + 0.5 * h_signed * k2[i];
    Point k3 = vector_field(tmp);
    for (std::size_t i = 0; i < dim_; ++i) tmp[i] = x[i] + h_signed * k3[i];
    Point k4 = vector_field(tmp);
    Point y(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        y[i] = x[i] + h_signed / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return y;
}

Point SystemSpec::flow_exact(const Point& x, double t) const {
    if (!closed_form_ || kind_ != SystemKind::Flow)
        throw std::invalid_argument("flow_exact: no closed form for this system");
    check_dim(x, dim_, "flow_exact");
    switch (catalog_) {
        case Catalog::LinearNode: {
            Point y(dim_);
            for (std::size_t i = 0; i < dim_; ++i) y[i] = x[i] * std::exp(params_[i] * t);
            return y;
        }
        case Catalog::PlanarSaddle:
            return {x[0] * std::exp(params_[0] * t), x[1] * std::exp(params_[1] * t)};
        case Catalog::NorthSouthCircle: {
            // theta' = -sin(theta); sink at 0, source at pi.
            double th = wrap_coord(x[0], 2.0 * kPi);
            if (th > kPi) th -= 2.0 * kPi;  // to (-pi, pi]
            if (th == kPi) return {kPi};
            double y = 2.0 * std::atan(std::tan(th / 2.0) * std::exp(-t));
            return {wrap_coord(y, 2.0 * kPi)};
        }
        case Catalog::AttractingCircle: {
            double r0 = std::hypot(x[0], x[1]);
            double th = std::atan2(x[1], x[0]) + t;
            if (r0 == 0.0) return {0.0, 0.0};
            double e = std::exp(t);
            double r = r0 * e / (1.0 - r0 + r0 * e);
            return {r * std::cos(th), r * std::sin(th)};
        }
        default:
            throw std::logic_error("flow_exact: unhandled catalog entry");
    }
}

Point SystemSpec::map_forward(const Point& x) const {
    if (kind_ != SystemKind::Map) throw std::invalid_argument("map_forward: flow system");
    check_dim(x, dim_, "map_forward");
    switch (catalog_) {
        case Catalog::CatMap:
            return {wrap_coord(2.0 * x[0] + x[1], 1.0), wrap_coord(x[0] + x[1], 1.0)};
        case Catalog::Rotation:
            return {wrap_coord(x[0] + params_[0], 1.0)};
        case Catalog::CustomLinear:
            return mat_apply(matrix_, x);
        default:
            throw std::logic_error("map_forward: unhandled catalog entry");
    }
}

std::optional<std::vector<double>> SystemSpec::cover_matrix(bool forward) const {
    if (kind_ != SystemKind::Map) return std::nullopt;
    switch (catalog_) {
        case Catalog::CatMap:
            return forward ? std::vector<double>{2, 1, 1, 1} : std::vector<double>{1, -1, -1, 2};
        case Catalog::CustomLinear:
            return forward ? matrix_ : inverse_;
        default:
            return std::nullopt;
    }
}

Point SystemSpec::map_inverse(const Point& x) const {
    if (kind_ != SystemKind::Map) throw std::invalid_argument("map_inverse: flow system");
    check_dim(x, dim_, "map_inverse");
    switch (catalog_) {
        case Catalog::CatMap:
            return {wrap_coord(x[0] - x[1], 1.0), wrap_coord(-x[0] + 2.0 * x[1], 1.0)};
        case Catalog::Rotation:
            return {wrap_coord(x[0] - params_[0], 1.0)};
        case Catalog::CustomLinear:
            return mat_apply(inverse_, x);
        default:
            throw std::logic_error("map_inverse: unhandled catalog entry");
    }
}

}  // namespace whitlyap
