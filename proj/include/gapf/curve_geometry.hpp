#pragma once
// Geometry of discrete closed plane curves: polar (radial samples on a
// uniform angle grid) and marker (closed polyline) representations.
//
// Conventions: counterclockwise traversal, N is T rotated by +90 degrees
// (inward for counterclockwise curves), kappa > 0 on convex curves, and the
// support function p = -<X, N> = det(X, T).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "spatial_ops.hpp"

namespace gapf {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

/// Star-shaped curve X(theta) = r(theta) (cos theta, sin theta) sampled at
/// theta_j = 2*pi*j/n. Immutable after construction.
class PolarCurve {
 public:
  explicit PolarCurve(std::vector<double> r) : r_(std::move(r)) {
    if (r_.size() < 16 || r_.size() % 2 != 0)
      throw std::invalid_argument("PolarCurve: n must be even and >= 16 (got " + std::to_string(r_.size()) + ")");
    for (std::size_t j = 0; j < r_.size(); ++j)
      if (!(std::isfinite(r_[j]) && r_[j] > 0.0))
        throw std::invalid_argument("PolarCurve: radius sample " + std::to_string(j) + " is not positive and finite");
  }

  std::size_t size() const { return r_.size(); }
  std::span<const double> radii() const { return r_; }
  double operator[](std::size_t j) const { return r_[j]; }
  double dtheta() const { return 2.0 * std::numbers::pi / static_cast<double>(r_.size()); }

  friend bool operator==(const PolarCurve&, const PolarCurve&) = default;

 private:
  std::vector<double> r_;
};

/// Closed polyline; the last point connects back to the first. Orientation
/// is normalized to counterclockwise (positive signed area) on construction.
class MarkerCurve {
 public:
  explicit MarkerCurve(std::vector<Vec2> pts) : pts_(std::move(pts)) {
    if (pts_.size() < 8)
      throw std::invalid_argument("MarkerCurve: needs at least 8 points (got " + std::to_string(pts_.size()) + ")");
    for (std::size_t j = 0; j < pts_.size(); ++j) {
      const Vec2 p = pts_[j];
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw std::invalid_argument("MarkerCurve: point " + std::to_string(j) + " is not finite");
      if (p == pts_[(j + 1) % pts_.size()])
        throw std::invalid_argument("MarkerCurve: consecutive points " + std::to_string(j) + " coincide");
    }
    if (shoelace(pts_) < 0.0) std::reverse(pts_.begin(), pts_.end());
  }

  std::size_t size() const { return pts_.size(); }
  std::span<const Vec2> points() const { return pts_; }
  Vec2 operator[](std::size_t j) const { return pts_[j]; }

  static double shoelace(std::span<const Vec2> p) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) s += cross(p[j], p[(j + 1) % p.size()]);
    return 0.5 * s;
  }

  friend bool operator==(const MarkerCurve&, const MarkerCurve&) = default;

 private:
  std::vector<Vec2> pts_;
};

/// Per-node geometric fields of a polar curve. p is filled by support().
struct GeometryFields {
  std::vector<double> r_theta;
  std::vector<double> r_thetatheta;
  std::vector<double> g;
  std::vector<double> kappa;
  std::vector<double> p;
};

/// Metric g = sqrt(r^2 + r_theta^2) and curvature
/// kappa = (-r r_thetatheta + 2 r_theta^2 + r^2) / g^3.
inline GeometryFields metric_and_curvature(const PolarCurve& c, Scheme scheme) {
  const auto r = c.radii();
  auto d = derivatives(r, scheme);
  const std::size_t n = c.size();
  GeometryFields f;
  f.g.resize(n);
  f.kappa.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double rt = d.d1[j], rtt = d.d2[j];
    const double g = std::sqrt(r[j] * r[j] + rt * rt);
    f.g[j] = g;
    f.kappa[j] = (-r[j] * rtt + 2.0 * rt * rt + r[j] * r[j]) / (g * g * g);
    if (!std::isfinite(f.kappa[j]))
      throw BlowUp("metric_and_curvature: non-finite curvature at node " + std::to_string(j), f.kappa[j]);
  }
  f.r_theta = std::move(d.d1);
  f.r_thetatheta = std::move(d.d2);
  return f;
}

/// Full geometry including the support function p = r^2 / g.
inline GeometryFields polar_geometry(const PolarCurve& c, Scheme scheme) {
  auto f = metric_and_curvature(c, scheme);
  f.p.resize(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) f.p[j] = c[j] * c[j] / f.g[j];
  return f;
}

inline std::vector<double> support(const PolarCurve& c, Scheme scheme) {
  return polar_geometry(c, scheme).p;
}

struct LengthArea {
  double length = 0.0;
  double area = 0.0;
};

/// L = int g dtheta and A = 1/2 int r^2 dtheta by the periodic trapezoid rule.
/// The metric needs r_theta, so the derivative scheme is a parameter.
inline LengthArea length_area(const PolarCurve& c, Scheme scheme = Scheme::spectral) {
  const auto r = c.radii();
  const auto rt = diff_periodic(r, 1, scheme);
  std::vector<double> g(c.size()), half_r2(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    g[j] = std::sqrt(r[j] * r[j] + rt[j] * rt[j]);
    half_r2[j] = 0.5 * r[j] * r[j];
  }
  return {quadrature_periodic(g), quadrature_periodic(half_r2)};
}

/// max_j |r_{j+n/2} - r_j|: zero exactly for centrosymmetric sample sets.
inline double symmetry_defect(const PolarCurve& c) {
  const std::size_t n = c.size(), h = n / 2;
  double d = 0.0;
  for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(c[(j + h) % n] - c[j]));
  return d;
}

inline MarkerCurve to_marker(const PolarCurve& c) {
  std::vector<Vec2> pts(c.size());
  const auto th = grid_angles(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) pts[j] = {c[j] * std::cos(th[j]), c[j] * std::sin(th[j])};
  return MarkerCurve(std::move(pts));
}

struct MarkerGeometry {
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;  // inward for counterclockwise traversal
  std::vector<double> kappa;
  std::vector<double> weight;       // arclength weight (h_minus + h_plus) / 2
  std::vector<double> edge;         // |X_{j+1} - X_j|
  std::vector<double> star_det;     // det(X_j - O, T_j), O = origin
  double length = 0.0;
  double signed_area = 0.0;
  double min_star_det = 0.0;
};

/// Discrete differential geometry of a marker curve. Tangent and curvature use
/// three-point derivatives in the polygon's arclength (second order on
/// uniform spacing).
inline MarkerGeometry marker_geometry(const MarkerCurve& c) {
  const auto x = c.points();
  const std::size_t m = x.size();
  MarkerGeometry g;
  g.edge.resize(m);
  double xmin = x[0].x, xmax = x[0].x, ymin = x[0].y, ymax = x[0].y;
  for (std::size_t j = 0; j < m; ++j) {
    g.edge[j] = norm(x[(j + 1) % m] - x[j]);
    g.length += g.edge[j];
    xmin = std::min(xmin, x[j].x), xmax = std::max(xmax, x[j].x);
    ymin = std::min(ymin, x[j].y), ymax = std::max(ymax, x[j].y);
  }
  const double diameter = std::hypot(xmax - xmin, ymax - ymin);
  for (std::size_t j = 0; j < m; ++j)
    if (g.edge[j] < 1e-12 * diameter)
      throw std::invalid_argument("marker_geometry: degenerate edge at vertex " + std::to_string(j));

  g.tangent.resize(m);
  g.normal.resize(m);
  g.kappa.resize(m);
  g.weight.resize(m);
  g.star_det.resize(m);
  g.min_star_det = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    const Vec2 xm = x[(j + m - 1) % m], x0 = x[j], xp = x[(j + 1) % m];
    const double hm = g.edge[(j + m - 1) % m], hp = g.edge[j];
    const double denom = hm * hp * (hm + hp);
    const Vec2 xs = (1.0 / denom) * (hm * hm * (xp - x0) + hp * hp * (x0 - xm));
    const Vec2 xss = (2.0 / denom) * (hm * (xp - x0) - hp * (x0 - xm));
    const double speed = norm(xs);
    g.tangent[j] = (1.0 / speed) * xs;
    g.normal[j] = rot90(g.tangent[j]);
    g.kappa[j] = cross(xs, xss) / (speed * speed * speed);
    g.weight[j] = 0.5 * (hm + hp);
    g.star_det[j] = cross(x0, g.tangent[j]);
    g.min_star_det = std::min(g.min_star_det, g.star_det[j]);
  }
  g.signed_area = MarkerCurve::shoelace(x);
  return g;
}

}  // namespace gapf
