#pragma once

#include <optional>
#include <string>
#include <vector>

#include "whitlyap/metric.hpp"

namespace whitlyap {

enum class SystemKind { Flow, Map };

enum class Catalog {
    LinearNode,
    PlanarSaddle,
    NorthSouthCircle,
    AttractingCircle,
    CatMap,
    Rotation,
    CustomLinear,
};

/// A catalog dynamical system: either a flow (vector field + fixed-step RK4
/// integrator, closed-form solution where the catalog knows one) or an
/// invertible map with an exact inverse.
class SystemSpec {
  public:
    static SystemSpec linear_node(std::vector<double> rates, double h = 0.01);
    static SystemSpec planar_saddle(double lambda_u, double lambda_s, double h = 0.01);
    static SystemSpec north_south_circle(double h = 0.01);
    static SystemSpec attracting_circle(double h = 0.01);
    static SystemSpec cat_map();
    static SystemSpec rotation(double alpha);
    static SystemSpec custom_linear(SystemKind kind, std::size_t dim,
                                    std::vector<double> row_major, double h = 0.01);

    /// CLI-facing constructor: catalog id string plus parameter list.
    static SystemSpec from_catalog_id(const std::string& id, const std::vector<double>& params,
                                      double h = 0.01);

    SystemKind kind() const { return kind_; }
    Catalog catalog() const { return catalog_; }
    double step() const { return h_; }
    bool closed_form_available() const { return closed_form_; }
    const std::vector<double>& params() const { return params_; }
    std::string catalog_id() const;

    /// The natural compact ambient space for this catalog entry.
    SpacePtr default_space() const;

    Point vector_field(const Point& x) const;
    Point rk4_step(const Point& x, double h_signed) const;
    Point flow_exact(const Point& x, double t) const;

    Point map_forward(const Point& x) const;
    Point map_inverse(const Point& x) const;

    /// Row-major matrix of the map acting on cover coordinates (before any
    /// wrap), when the map is linear; nullopt otherwise.
    std::optional<std::vector<double>> cover_matrix(bool forward) const;

  private:
    SystemSpec(SystemKind kind, Catalog catalog, std::vector<double> params, double h,
               bool closed_form, std::size_t dim);

    SystemKind kind_;
    Catalog catalog_;
    std::vector<double> params_;
    double h_;
    bool closed_form_;
    std::size_t dim_;
    std::vector<double> matrix_, inverse_;  // custom_linear only
};

}  // namespace whitlyap
