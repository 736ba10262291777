#pragma once
// Builtin initial curves.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "curve_geometry.hpp"
#include "spatial_ops.hpp"

namespace gapf {

enum class CurveKind { circle, ellipse, cos_star, offset_star, immersed_loops };

inline std::string_view to_string(CurveKind k) {
  switch (k) {
    case CurveKind::circle: return "circle";
    case CurveKind::ellipse: return "ellipse";
    case CurveKind::cos_star: return "cos_star";
    case CurveKind::offset_star: return "offset_star";
    case CurveKind::immersed_loops: return "immersed_loops";
  }
  return "?";
}

inline CurveKind parse_curve_kind(std::string_view s) {
  for (auto k : {CurveKind::circle, CurveKind::ellipse, CurveKind::cos_star, CurveKind::offset_star, CurveKind::immersed_loops})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown builtin curve '" + std::string(s) + "'");
}

/// Parameters in the order of the curve family:
///   circle(R), ellipse(a, b), cos_star(a, eps, k), offset_star(a, eps, k, shift),
///   immersed_loops(base, amp).
/// offset_star adds shift * cos((k+1) theta) to a (1 + eps cos k theta).
/// immersed_loops is r = base + amp cos(2 theta / 3) traced over three turns
/// (theta in [0, 6 pi)): turning number 3, positive curvature, star-shaped
/// about O, with two small loops that overlap around O.
struct BuiltinCurve {
  CurveKind kind = CurveKind::circle;
  std::vector<double> params;

  bool is_marker() const { return kind == CurveKind::immersed_loops; }
};

using AnyCurve = std::variant<PolarCurve, MarkerCurve>;

namespace detail {

inline double param(const BuiltinCurve& id, std::size_t i, const char* name) {
  if (id.params.size() <= i)
    throw std::invalid_argument(std::string(to_string(id.kind)) + ": missing parameter " + name);
  const double v = id.params[i];
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(to_string(id.kind)) + ": parameter " + name + " is not finite");
  return v;
}

inline void require(bool cond, const BuiltinCurve& id, const std::string& what) {
  if (!cond) throw std::invalid_argument(std::string(to_string(id.kind)) + ": " + what);
}

inline PolarCurve checked_star(std::vector<double> r, const BuiltinCurve& id) {
  for (double v : r) require(v > 0.0, id, "radius must stay positive (support function p_min > 0)");
  PolarCurve c(std::move(r));
  const auto p = support(c, Scheme::spectral);
  for (double v : p) require(v > 0.0, id, "support function p_min > 0 violated");
  return c;
}

inline MarkerCurve immersed_loops(double base, double amp, std::size_t m, const BuiltinCurve& id) {
  auto radius = [&](double th) { return base + amp * std::cos(2.0 * th / 3.0); };
  auto point = [&](double th) { return Vec2{radius(th) * std::cos(th), radius(th) * std::sin(th)}; };
  const double period = 6.0 * std::numbers::pi;

  // equal-arclength placement from a fine polyline
  const std::size_t fine = 64 * m;
  std::vector<double> s(fine + 1, 0.0);
  Vec2 prev = point(0.0);
  for (std::size_t i = 1; i <= fine; ++i) {
    const Vec2 q = point(period * static_cast<double>(i) / static_cast<double>(fine));
    s[i] = s[i - 1] + norm(q - prev);
    prev = q;
  }
  std::vector<Vec2> pts(m);
  std::size_t i = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double target = s[fine] * static_cast<double>(j) / static_cast<double>(m);
    while (i + 1 < fine && s[i + 1] < target) ++i;
    const double w = (target - s[i]) / (s[i + 1] - s[i]);
    pts[j] = point(period * (static_cast<double>(i) + w) / static_cast<double>(fine));
  }
  MarkerCurve c(std::move(pts));
  const auto geo = marker_geometry(c);
  require(geo.min_star_det > 0.0, id, "min det(X, T) > 0 violated");
  for (double k : geo.kappa) require(k > 0.0, id, "curvature must be positive everywhere");
  return c;
}

}  // namespace detail

/// Samples a builtin curve on grid size n (polar) or m (marker).
inline AnyCurve build_initial(const BuiltinCurve& id, std::size_t size) {
  using detail::param;
  using detail::require;
  const auto th = grid_angles(size);
  std::vector<double> r(size);
  switch (id.kind) {
    case CurveKind::circle: {
      const double R = param(id, 0, "R");
      require(R > 0.0, id, "R must be positive");
      r.assign(size, R);
      return PolarCurve(std::move(r));
    }
    case CurveKind::ellipse: {
      const double a = param(id, 0, "a"), b = param(id, 1, "b");
      require(a > 0.0 && b > 0.0, id, "semi-axes must be positive");
      for (std::size_t j = 0; j < size; ++j) {
        const double c = std::cos(th[j]), s = std::sin(th[j]);
        r[j] = a * b / std::sqrt(b * b * c * c + a * a * s * s);
      }
      return PolarCurve(std::move(r));
    }
    case CurveKind::cos_star:
    case CurveKind::offset_star: {
      const double a = param(id, 0, "a"), eps = param(id, 1, "eps"), k = param(id, 2, "k");
      require(a > 0.0, id, "a must be positive");
      require(k >= 1.0 && k == std::floor(k), id, "k must be a positive integer");
      const double shift = id.kind == CurveKind::offset_star ? param(id, 3, "shift") : 0.0;
      for (std::size_t j = 0; j < size; ++j)
        r[j] = a * (1.0 + eps * std::cos(k * th[j])) + shift * std::cos((k + 1.0) * th[j]);
      return detail::checked_star(std::move(r), id);
    }
    case CurveKind::immersed_loops: {
      const double base = id.params.size() > 0 ? param(id, 0, "base") : 1.0;
      const double amp = id.params.size() > 1 ? param(id, 1, "amp") : 0.5;
      require(base > 0.0 && amp >= 0.0 && amp < base, id, "need 0 <= amp < base");
      return detail::immersed_loops(base, amp, size, id);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace gapf
