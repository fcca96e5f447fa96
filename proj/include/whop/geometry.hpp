#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace whop {

using Point = Eigen::Vector2d;

/// Volume or surface quadrature rule. Surface rules carry the unit outward
/// normal at every node; nodes of surface rules never sit on a corner.
struct QuadRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::vector<Point> normals;

  double total_weight() const;
};

/// Gauss-Legendre nodes/weights on [-1,1], computed once per order and cached.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

/// Composite Gauss-Legendre rule on [a,b] with `panels` equal panels,
/// appended to `nodes`/`weights`.
void composite_gauss(double a, double b, int panels, int order,
                     std::vector<double>& nodes, std::vector<double>& weights);

/// One smooth piece of a domain boundary. The parameterization is smooth on
/// the open parameter interval; `singular_endpoints` lists the parameter
/// values that touch corner points of the boundary. In d=1 a patch is a
/// single endpoint carrying counting measure.
struct BoundaryPatch {
  static constexpr int kSmoothInf = 1000;

  std::function<Point(double)> position;   // [0,1] -> R^d
  std::function<Point(double)> normal;     // unit outward normal
  std::function<double(double)> jacobian;  // surface measure density
  int smoothness = kSmoothInf;
  std::vector<double> singular_endpoints;

  bool is_point = false;  // d=1 endpoint patch
  Point point{0.0, 0.0};
  Point point_normal{0.0, 0.0};
};

enum class ShapeKind { Interval, Box, Ball, Polygon, Complement };

/// Bounded piecewise-smooth region of R^d, d = 1 or 2, from a closed shape
/// catalogue. All instances have exact volume, boundary parameterization and
/// outward normals. Immutable after construction.
class Domain {
 public:
  static Domain interval(double a, double b);
  static Domain box(const Point& lo, const Point& hi);
  static Domain ball(const Point& center, double radius);
  /// Simple polygon, vertices in counterclockwise order.
  static Domain polygon(std::vector<Point> vertices);
  /// Complement of `inner` with an explicit bounding box used by grids and
  /// truncated volume accounting. d follows the inner shape.
  static Domain complement_of(const Domain& inner, const Point& bbox_lo,
                              const Point& bbox_hi);

  int dim() const { return dim_; }
  ShapeKind kind() const { return kind_; }
  bool is_complement() const { return kind_ == ShapeKind::Complement; }

  /// Membership in the open region; boundary points may resolve either way.
  bool contains(const Point& x) const;

  /// Exact Lebesgue measure; complements are measured inside their bounding
  /// box.
  double volume() const;

  std::vector<BoundaryPatch> boundary_patches() const;

  struct LipschitzData {
    double M = 0.0;
    std::vector<Point> singular_points;
  };
  LipschitzData lipschitz_data() const;

  /// Tight bounding box of the shape (the bounding box itself for
  /// complements).
  void bounding_box(Point& lo, Point& hi) const;
  /// Per-axis sup of |x_j| over the domain, used for frequency-range guards.
  double sup_abs(int axis) const;
  double max_extent() const;

  const Domain& inner() const;
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<Point, 3>>& triangles() const { return triangles_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Domain() = default;

  ShapeKind kind_ = ShapeKind::Interval;
  int dim_ = 1;
  Point lo_{0.0, 0.0}, hi_{0.0, 0.0};  // interval/box extents; complement bbox
  Point center_{0.0, 0.0};
  double radius_ = 0.0;
  std::vector<Point> vertices_;
  std::vector<std::array<Point, 3>> triangles_;
  std::shared_ptr<const Domain> inner_;
};

/// Ear-clipping triangulation of a simple ccw polygon. Throws on failure.
std::vector<std::array<Point, 3>> triangulate_polygon(const std::vector<Point>& vertices);

/// Volume rule over the domain. Boxes/intervals use per-axis composite
/// Gauss-Legendre with `level` panels per axis; balls a polar rule; polygons
/// a triangulation rule. Not defined for complements.
QuadRule volume_quadrature(const Domain& domain, int level);

/// Surface rule on one boundary patch: composite Gauss nodes in parameter
/// space mapped through the parameterization, weights carrying the measure
/// density, outward normal attached per node. Nodes avoid singular endpoints.
QuadRule surface_quadrature(const BoundaryPatch& patch, int level);

}  // namespace whop
