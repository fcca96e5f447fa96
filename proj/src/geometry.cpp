#include "whop/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace whop {

namespace {

constexpr double kPi = std::numbers::pi;

double cross2(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const std::vector<Point>& v) {
  double s = 0.0;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) s += cross2(v[i], v[(i + 1) % n]);
  return 0.5 * s;
}

// Proper intersection test for open segments (shared endpoints excluded).
bool segments_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
  auto orient = [](const Point& p, const Point& q, const Point& r) {
    return cross2(q - p, r - p);
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 &&
         o3 != 0 && o4 != 0;
}

bool point_in_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
  const double d1 = cross2(b - a, p - a);
  const double d2 = cross2(c - b, p - b);
  const double d3 = cross2(a - c, p - c);
  const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
  const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
  return !(has_neg && has_pos);
}

}  // namespace

double QuadRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");

  // Newton iteration on P_n, Chebyshev initial guesses.
  std::vector<double> x(order), w(order);
  for (int i = 0; i < order; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = order * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = order * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());
  auto [pos, ok] = cache.emplace(order, std::make_pair(std::move(x), std::move(w)));
  (void)ok;
  return pos->second;
}

void composite_gauss(double a, double b, int panels, int order,
                     std::vector<double>& nodes, std::vector<double>& weights) {
  const auto& [gx, gw] = gauss_legendre(order);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < order; ++i) {
      nodes.push_back(lo + 0.5 * h * (gx[i] + 1.0));
      weights.push_back(0.5 * h * gw[i]);
    }
  }
}

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

Domain Domain::interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("interval: requires a < b");
  Domain d;
  d.kind_ = ShapeKind::Interval;
  d.dim_ = 1;
  d.lo_ = Point(a, 0.0);
  d.hi_ = Point(b, 0.0);
  return d;
}

Domain Domain::box(const Point& lo, const Point& hi) {
  if (!(lo.x() < hi.x() && lo.y() < hi.y()))
    throw std::invalid_argument("box: requires lo < hi componentwise");
  Domain d;
  d.kind_ = ShapeKind::Box;
  d.dim_ = 2;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

Domain Domain::ball(const Point& center, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("ball: requires radius > 0");
  Domain d;
  d.kind_ = ShapeKind::Ball;
  d.dim_ = 2;
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

Domain Domain::polygon(std::vector<Point> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon: needs >= 3 vertices");
  if (signed_area(vertices) <= 0)
    throw std::invalid_argument("polygon: vertices must be counterclockwise");
  const size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j],
                         vertices[(j + 1) % n]))
        throw std::invalid_argument("polygon: self-intersecting vertex list");
    }
  }
  Domain d;
  d.kind_ = ShapeKind::Polygon;
  d.dim_ = 2;
  d.triangles_ = triangulate_polygon(vertices);
  d.vertices_ = std::move(vertices);
  return d;
}

Domain Domain::complement_of(const Domain& inner, const Point& bbox_lo,
                             const Point& bbox_hi) {
  if (inner.is_complement())
    throw std::invalid_argument("complement_of: nested complements not supported");
  Domain d;
  d.kind_ = ShapeKind::Complement;
  d.dim_ = inner.dim();
  d.lo_ = bbox_lo;
  d.hi_ = bbox_hi;
  d.inner_ = std::make_shared<Domain>(inner);
  Point ilo, ihi;
  inner.bounding_box(ilo, ihi);
  for (int j = 0; j < inner.dim(); ++j) {
    if (!(bbox_lo[j] < ilo[j] && ihi[j] < bbox_hi[j]))
      throw std::invalid_argument("complement_of: bounding box must contain the inner shape");
  }
  return d;
}

const Domain& Domain::inner() const {
  if (!inner_) throw std::logic_error("inner: not a complement domain");
  return *inner_;
}

bool Domain::contains(const Point& x) const {
  switch (kind_) {
    case ShapeKind::Interval:
      return x.x() > lo_.x() && x.x() < hi_.x();
    case ShapeKind::Box:
      return x.x() > lo_.x() && x.x() < hi_.x() && x.y() > lo_.y() && x.y() < hi_.y();
    case ShapeKind::Ball:
      return (x - center_).squaredNorm() < radius_ * radius_;
    case ShapeKind::Polygon: {
      // Even-odd ray crossing; boundary points may resolve either way.
      bool in = false;
      const size_t n = vertices_.size();
      for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[j];
        if ((a.y() > x.y()) != (b.y() > x.y())) {
          const double t = (x.y() - a.y()) / (b.y() - a.y());
          if (x.x() < a.x() + t * (b.x() - a.x())) in = !in;
        }
      }
      return in;
    }
    case ShapeKind::Complement: {
      const Domain& in = *inner_;
      // Open complement of the closed inner region.
      switch (in.kind_) {
        case ShapeKind::Interval:
          return x.x() < in.lo_.x() || x.x() > in.hi_.x();
        case ShapeKind::Box:
          return x.x() < in.lo_.x() || x.x() > in.hi_.x() || x.y() < in.lo_.y() ||
                 x.y() > in.hi_.y();
        case ShapeKind::Ball:
          return (x - in.center_).squaredNorm() > in.radius_ * in.radius_;
        default:
          return !in.contains(x);
      }
    }
  }
  return false;
}

double Domain::volume() const {
  switch (kind_) {
    case ShapeKind::Interval:
      return hi_.x() - lo_.x();
    case ShapeKind::Box:
      return (hi_.x() - lo_.x()) * (hi_.y() - lo_.y());
    case ShapeKind::Ball:
      return kPi * radius_ * radius_;
    case ShapeKind::Polygon:
      return signed_area(vertices_);
    case ShapeKind::Complement: {
      double bbox = 1.0;
      for (int j = 0; j < dim_; ++j) bbox *= hi_[j] - lo_[j];
      return bbox - inner_->volume();
    }
  }
  return 0.0;
}

void Domain::bounding_box(Point& lo, Point& hi) const {
  switch (kind_) {
    case ShapeKind::Interval:
    case ShapeKind::Box:
    case ShapeKind::Complement:
      lo = lo_;
      hi = hi_;
      return;
    case ShapeKind::Ball:
      lo = center_ - Point(radius_, radius_);
      hi = center_ + Point(radius_, radius_);
      return;
    case ShapeKind::Polygon: {
      lo = vertices_[0];
      hi = vertices_[0];
      for (const auto& v : vertices_) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
      return;
    }
  }
}

double Domain::sup_abs(int axis) const {
  Point lo, hi;
  bounding_box(lo, hi);
  return std::max(std::abs(lo[axis]), std::abs(hi[axis]));
}

double Domain::max_extent() const {
  Point lo, hi;
  bounding_box(lo, hi);
  double m = 0.0;
  for (int j = 0; j < dim_; ++j) m = std::max(m, hi[j] - lo[j]);
  return m;
}

// ---------------------------------------------------------------------------
// Boundary decomposition
// ---------------------------------------------------------------------------

namespace {

BoundaryPatch point_patch(double x, double n) {
  BoundaryPatch p;
  p.is_point = true;
  p.point = Point(x, 0.0);
  p.point_normal = Point(n, 0.0);
  p.smoothness = BoundaryPatch::kSmoothInf;
  return p;
}

// Straight edge from a to b with constant outward normal.
BoundaryPatch edge_patch(const Point& a, const Point& b, const Point& outward,
                         bool corner_start, bool corner_end) {
  BoundaryPatch p;
  const Point d = b - a;
  p.position = [a, d](double t) { return Point(a + t * d); };
  p.normal = [outward](double) { return outward; };
  const double len = d.norm();
  p.jacobian = [len](double) { return len; };
  p.smoothness = BoundaryPatch::kSmoothInf;
  if (corner_start) p.singular_endpoints.push_back(0.0);
  if (corner_end) p.singular_endpoints.push_back(1.0);
  return p;
}

}  // namespace

std::vector<BoundaryPatch> Domain::boundary_patches() const {
  std::vector<BoundaryPatch> patches;
  switch (kind_) {
    case ShapeKind::Interval:
      patches.push_back(point_patch(lo_.x(), -1.0));
      patches.push_back(point_patch(hi_.x(), +1.0));
      return patches;
    case ShapeKind::Box: {
      const Point a = lo_, b = hi_;
      const Point v0(a.x(), a.y()), v1(b.x(), a.y()), v2(b.x(), b.y()), v3(a.x(), b.y());
      patches.push_back(edge_patch(v0, v1, Point(0, -1), true, true));
      patches.push_back(edge_patch(v1, v2, Point(1, 0), true, true));
      patches.push_back(edge_patch(v2, v3, Point(0, 1), true, true));
      patches.push_back(edge_patch(v3, v0, Point(-1, 0), true, true));
      return patches;
    }
    case ShapeKind::Ball: {
      BoundaryPatch p;
      const Point c = center_;
      const double R = radius_;
      p.position = [c, R](double t) {
        const double th = 2.0 * kPi * t;
        return Point(c + R * Point(std::cos(th), std::sin(th)));
      };
      p.normal = [](double t) {
        const double th = 2.0 * kPi * t;
        return Point(std::cos(th), std::sin(th));
      };
      p.jacobian = [R](double) { return 2.0 * kPi * R; };
      p.smoothness = BoundaryPatch::kSmoothInf;
      patches.push_back(std::move(p));
      return patches;
    }
    case ShapeKind::Polygon: {
      const size_t n = vertices_.size();
      for (size_t i = 0; i < n; ++i) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[(i + 1) % n];
        const Point t = (b - a).normalized();
        // ccw orientation: outward normal is the tangent rotated by -90 deg.
        const Point outward(t.y(), -t.x());
        patches.push_back(edge_patch(a, b, outward, true, true));
      }
      return patches;
    }
    case ShapeKind::Complement: {
      // The boundary of the complement is the inner boundary with normals
      // flipped; the bounding box is a truncation artifact, not boundary.
      patches = inner_->boundary_patches();
      for (auto& p : patches) {
        if (p.is_point) {
          p.point_normal = -p.point_normal;
        } else {
          auto base = p.normal;
          p.normal = [base](double t) { return Point(-base(t)); };
        }
      }
      return patches;
    }
  }
  return patches;
}

Domain::LipschitzData Domain::lipschitz_data() const {
  LipschitzData out;
  switch (kind_) {
    case ShapeKind::Interval:
      out.M = 0.0;
      return out;
    case ShapeKind::Box: {
      out.M = 0.0;  // each face is a flat graph
      out.singular_points = {Point(lo_.x(), lo_.y()), Point(hi_.x(), lo_.y()),
                             Point(hi_.x(), hi_.y()), Point(lo_.x(), hi_.y())};
      return out;
    }
    case ShapeKind::Ball:
      out.M = 1.0;  // quarter-arc graph charts have slope at most 1
      return out;
    case ShapeKind::Polygon: {
      const size_t n = vertices_.size();
      double m = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const Point& prev = vertices_[(i + n - 1) % n];
        const Point& cur = vertices_[i];
        const Point& next = vertices_[(i + 1) % n];
        const Point e0 = (cur - prev).normalized();
        const Point e1 = (next - cur).normalized();
        // Chart over the corner bisector: slope of both edges is
        // tan(half the turning angle).
        const double turn = std::acos(std::clamp(e0.dot(e1), -1.0, 1.0));
        m = std::max(m, std::tan(0.5 * turn));
        out.singular_points.push_back(cur);
      }
      out.M = m;
      return out;
    }
    case ShapeKind::Complement: {
      out = inner_->lipschitz_data();
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Triangulation (ear clipping)
// ---------------------------------------------------------------------------

std::vector<std::array<Point, 3>> triangulate_polygon(const std::vector<Point>& vertices) {
  std::vector<int> idx(vertices.size());
  for (size_t i = 0; i < vertices.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<Point, 3>> tris;
  size_t guard = 0;
  const size_t guard_max = vertices.size() * vertices.size() + 16;
  while (idx.size() > 3) {
    bool clipped = false;
    const size_t m = idx.size();
    for (size_t i = 0; i < m; ++i) {
      const Point& a = vertices[idx[(i + m - 1) % m]];
      const Point& b = vertices[idx[i]];
      const Point& c = vertices[idx[(i + 1) % m]];
      if (cross2(b - a, c - b) <= 0) continue;  // reflex or degenerate corner
      bool ear = true;
      for (size_t j = 0; j < m; ++j) {
        const int vj = idx[j];
        if (vj == idx[(i + m - 1) % m] || vj == idx[i] || vj == idx[(i + 1) % m]) continue;
        if (point_in_triangle(vertices[vj], a, b, c)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({a, b, c});
      idx.erase(idx.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped || ++guard > guard_max)
      throw std::runtime_error("triangulate_polygon: ear clipping failed (invalid polygon?)");
  }
  tris.push_back({vertices[idx[0]], vertices[idx[1]], vertices[idx[2]]});
  return tris;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

constexpr int kVolumeOrder = 12;
constexpr int kSurfaceOrder = 8;

QuadRule box_rule(const Point& lo, const Point& hi, int dim, int panels) {
  QuadRule rule;
  std::vector<double> nx, wx;
  composite_gauss(lo.x(), hi.x(), panels, kVolumeOrder, nx, wx);
  if (dim == 1) {
    for (size_t i = 0; i < nx.size(); ++i) {
      rule.nodes.emplace_back(nx[i], 0.0);
      rule.weights.push_back(wx[i]);
    }
    return rule;
  }
  std::vector<double> ny, wy;
  composite_gauss(lo.y(), hi.y(), panels, kVolumeOrder, ny, wy);
  for (size_t i = 0; i < nx.size(); ++i) {
    for (size_t j = 0; j < ny.size(); ++j) {
      rule.nodes.emplace_back(nx[i], ny[j]);
      rule.weights.push_back(wx[i] * wy[j]);
    }
  }
  return rule;
}

QuadRule ball_rule(const Point& center, double R, int level) {
  QuadRule rule;
  std::vector<double> nr, wr, nt, wt;
  composite_gauss(0.0, R, level, kVolumeOrder, nr, wr);
  composite_gauss(0.0, 2.0 * kPi, std::max(4, 2 * level), kVolumeOrder, nt, wt);
  for (size_t i = 0; i < nr.size(); ++i) {
    for (size_t j = 0; j < nt.size(); ++j) {
      const double r = nr[i], th = nt[j];
      rule.nodes.emplace_back(center.x() + r * std::cos(th), center.y() + r * std::sin(th));
      rule.weights.push_back(wr[i] * wt[j] * r);
    }
  }
  return rule;
}

void triangle_rule(const std::array<Point, 3>& tri, int order, QuadRule& rule) {
  // Duffy map of the tensor Gauss square onto the triangle.
  const auto& [gx, gw] = gauss_legendre(order);
  const Point& a = tri[0];
  const Point e1 = tri[1] - tri[0];
  const Point e2 = tri[2] - tri[0];
  const double area2 = cross2(e1, e2);
  for (int i = 0; i < order; ++i) {
    const double u = 0.5 * (gx[i] + 1.0);
    for (int j = 0; j < order; ++j) {
      const double v = 0.5 * (gx[j] + 1.0) * (1.0 - u);
      rule.nodes.emplace_back(a + u * e1 + v * e2);
      rule.weights.push_back(0.25 * gw[i] * gw[j] * (1.0 - u) * area2);
    }
  }
}

void subdivide(const std::array<Point, 3>& tri, int depth,
               std::vector<std::array<Point, 3>>& out) {
  if (depth == 0) {
    out.push_back(tri);
    return;
  }
  const Point m01 = 0.5 * (tri[0] + tri[1]);
  const Point m12 = 0.5 * (tri[1] + tri[2]);
  const Point m20 = 0.5 * (tri[2] + tri[0]);
  subdivide({tri[0], m01, m20}, depth - 1, out);
  subdivide({m01, tri[1], m12}, depth - 1, out);
  subdivide({m20, m12, tri[2]}, depth - 1, out);
  subdivide({m01, m12, m20}, depth - 1, out);
}

}  // namespace

QuadRule volume_quadrature(const Domain& domain, int level) {
  if (level < 1) throw std::invalid_argument("volume_quadrature: level must be >= 1");
  switch (domain.kind()) {
    case ShapeKind::Interval:
    case ShapeKind::Box:
      return box_rule(domain.lo(), domain.hi(), domain.dim(), level);
    case ShapeKind::Ball:
      return ball_rule(domain.center(), domain.radius(), level);
    case ShapeKind::Polygon: {
      QuadRule rule;
      std::vector<std::array<Point, 3>> tris;
      const int depth = level > 1 ? 1 : 0;
      for (const auto& t : domain.triangles()) subdivide(t, depth, tris);
      for (const auto& t : tris) triangle_rule(t, kVolumeOrder, rule);
      return rule;
    }
    case ShapeKind::Complement:
      throw std::invalid_argument(
          "volume_quadrature: complement domains are integrated as bbox minus inner");
  }
  throw std::logic_error("volume_quadrature: unreachable");
}

QuadRule surface_quadrature(const BoundaryPatch& patch, int level) {
  if (level < 1) throw std::invalid_argument("surface_quadrature: level must be >= 1");
  QuadRule rule;
  if (patch.is_point) {
    rule.nodes.push_back(patch.point);
    rule.weights.push_back(1.0);  // counting measure at d=1
    rule.normals.push_back(patch.point_normal);
    return rule;
  }
  const int panels = 1 << level;
  const auto& [gx, gw] = gauss_legendre(kSurfaceOrder);
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < kSurfaceOrder; ++i) {
      const double t = h * (p + 0.5 * (gx[i] + 1.0));
      rule.nodes.push_back(patch.position(t));
      rule.weights.push_back(0.5 * h * gw[i] * patch.jacobian(t));
      rule.normals.push_back(patch.normal(t));
    }
  }
  return rule;
}

}  // namespace whop
