#pragma once
// Right-hand sides of the area-preserving flow (normal speed kappa - 2*pi/L)
// and curve shortening flow (normal speed kappa), in polar and marker form,
// plus the curvature / support-function evolution identities used as
// consistency residuals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "curve_geometry.hpp"
#include "errors.hpp"
#include "spatial_ops.hpp"

namespace gapf {

enum class FlowLaw { gapf, csf };

inline std::string_view to_string(FlowLaw l) { return l == FlowLaw::gapf ? "gapf" : "csf"; }

inline FlowLaw parse_flow_law(std::string_view name) {
  if (name == "gapf" || name == "GAPF") return FlowLaw::gapf;
  if (name == "csf" || name == "CSF") return FlowLaw::csf;
  throw std::invalid_argument("unknown flow law '" + std::string(name) + "'");
}

/// Constant part of the normal speed: beta = kappa - forcing(L).
inline double forcing(FlowLaw law, double length) {
  return law == FlowLaw::gapf ? 2.0 * std::numbers::pi / length : 0.0;
}

/// dr/dt at fixed polar angle. The tangential gauge alpha = -(beta/r) r_theta
/// that freezes theta is already folded in:
///   r_t = r_tt/g^2 - 2 r_t^2/(r g^2) - r/g^2 + [gapf] 2 pi g/(r L).
/// L is recomputed from c on every call.
inline std::vector<double> polar_rhs(const PolarCurve& c, FlowLaw law, Scheme scheme, double r_floor = 0.0) {
  const auto r = c.radii();
  const std::size_t n = c.size();
  for (std::size_t j = 0; j < n; ++j)
    if (r[j] <= r_floor)
      throw StarShapeLost("radius " + std::to_string(r[j]) + " at node " + std::to_string(j) + " reached the floor", r[j]);

  const auto d = derivatives(r, scheme);
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = std::sqrt(r[j] * r[j] + d.d1[j] * d.d1[j]);
  const double f = forcing(law, quadrature_periodic(g));

  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double g2 = g[j] * g[j];
    out[j] = d.d2[j] / g2 - 2.0 * d.d1[j] * d.d1[j] / (r[j] * g2) - r[j] / g2 + f * g[j] / r[j];
    if (!std::isfinite(out[j])) throw BlowUp("non-finite polar rhs at node " + std::to_string(j), out[j]);
  }
  return out;
}

/// Per-vertex plane velocity beta N + tau T. The tangential part
/// tau_j = (h_+ - h_-)/(h_+ h_-) drives the edge lengths toward equal
/// spacing without changing the shape to leading order.
inline std::vector<Vec2> marker_rhs(const MarkerCurve& c, FlowLaw law) {
  const auto geo = marker_geometry(c);
  const std::size_t m = c.size();
  const double f = forcing(law, geo.length);
  std::vector<Vec2> v(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double hm = geo.edge[(j + m - 1) % m], hp = geo.edge[j];
    const double tau = (hp - hm) / (hp * hm);
    v[j] = (geo.kappa[j] - f) * geo.normal[j] + tau * geo.tangent[j];
    if (!std::isfinite(v[j].x) || !std::isfinite(v[j].y))
      throw BlowUp("non-finite marker velocity at vertex " + std::to_string(j), geo.kappa[j]);
  }
  return v;
}

struct ConsistencyResiduals {
  double kappa = 0.0;    // max |dkappa/dt - (kappa_ss + kappa^2 beta + alpha kappa_s)|
  double support = 0.0;  // max |dp/dt - (-beta + <X,T> kappa_s + alpha p_s)|
};

namespace detail {

/// Arclength calculus on a polar curve: d/ds = (1/g) d/dtheta.
struct PolarCalculus {
  GeometryFields geo;
  std::vector<double> kappa_s, kappa_ss, p_s, p_ss, x_dot_t;
  double length = 0.0;

  PolarCalculus(const PolarCurve& c, Scheme scheme) : geo(polar_geometry(c, scheme)) {
    const std::size_t n = c.size();
    const auto dk = derivatives(geo.kappa, scheme);
    const auto dp = derivatives(geo.p, scheme);
    kappa_s.resize(n), kappa_ss.resize(n), p_s.resize(n), p_ss.resize(n), x_dot_t.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double g = geo.g[j], r = c[j], rt = geo.r_theta[j];
      const double g_theta = (r * rt + rt * geo.r_thetatheta[j]) / g;
      kappa_s[j] = dk.d1[j] / g;
      kappa_ss[j] = dk.d2[j] / (g * g) - dk.d1[j] * g_theta / (g * g * g);
      p_s[j] = dp.d1[j] / g;
      p_ss[j] = dp.d2[j] / (g * g) - dp.d1[j] * g_theta / (g * g * g);
      x_dot_t[j] = r * rt / g;
    }
    length = quadrature_periodic(geo.g);
  }
};

inline void require_same_grid(const PolarCurve& a, const PolarCurve& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("grid mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

}  // namespace detail

/// Finite-difference-in-time check of the curvature and support evolution
/// laws between two states dt apart, with the right-hand sides evaluated at
/// the averaged state. The polar-angle gauge contributes the transport term
/// alpha d/ds with alpha = -beta r_theta / r.
inline ConsistencyResiduals consistency_residuals(const PolarCurve& prev, const PolarCurve& next, double dt,
                                                  FlowLaw law, Scheme scheme) {
  detail::require_same_grid(prev, next);
  if (!(dt > 0.0)) throw std::invalid_argument("consistency_residuals: dt must be positive");
  const std::size_t n = prev.size();
  std::vector<double> mid_r(n);
  for (std::size_t j = 0; j < n; ++j) mid_r[j] = 0.5 * (prev[j] + next[j]);
  const PolarCurve mid(std::move(mid_r));

  const auto g0 = polar_geometry(prev, scheme);
  const auto g1 = polar_geometry(next, scheme);
  const detail::PolarCalculus m(mid, scheme);
  const double f = forcing(law, m.length);

  ConsistencyResiduals res;
  for (std::size_t j = 0; j < n; ++j) {
    const double kappa = m.geo.kappa[j];
    const double beta = kappa - f;
    const double alpha = -beta * m.geo.r_theta[j] / mid[j];
    const double kappa_rhs = m.kappa_ss[j] + kappa * kappa * beta + alpha * m.kappa_s[j];
    const double p_rhs = -beta + m.x_dot_t[j] * m.kappa_s[j] + alpha * m.p_s[j];
    res.kappa = std::max(res.kappa, std::abs((g1.kappa[j] - g0.kappa[j]) / dt - kappa_rhs));
    res.support = std::max(res.support, std::abs((g1.p[j] - g0.p[j]) / dt - p_rhs));
  }
  return res;
}

struct SupportIdentityResiduals {
  double first = 0.0;   // max |p_s - kappa <X,T>|
  double second = 0.0;  // max |p_ss - (kappa_s <X,T> + kappa - kappa^2 p)|
};

/// Static identities linking the support function to curvature along any curve.
inline SupportIdentityResiduals support_identities(const PolarCurve& c, Scheme scheme) {
  const detail::PolarCalculus m(c, scheme);
  SupportIdentityResiduals res;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double k = m.geo.kappa[j];
    res.first = std::max(res.first, std::abs(m.p_s[j] - k * m.x_dot_t[j]));
    res.second = std::max(res.second, std::abs(m.p_ss[j] - (m.kappa_s[j] * m.x_dot_t[j] + k - k * k * m.geo.p[j])));
  }
  return res;
}

}  // namespace gapf
