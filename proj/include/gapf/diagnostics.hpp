#pragma once
// Per-record scalar diagnostics, a-priori bound checks, exponential decay
// fits, and the area-preserving vs curve-shortening comparison experiment.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "curve_geometry.hpp"
#include "flow_laws.hpp"
#include "spatial_ops.hpp"
#include "time_integration.hpp"

namespace gapf {

/// One time sample of every tracked scalar. For marker runs r_min/r_max are
/// vertex distances from O, p_min is min det(X, T), grad_max is max |<X, T>|,
/// and sym is NaN (not defined).
struct DiagRecord {
  double t = 0.0;
  double L = 0.0;
  double A = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double p_min = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double grad_max = 0.0;
  double deficit = 0.0;  // L^2 - 4 pi A
  double q2 = 0.0;       // int (kappa - 2 pi / L)^2 ds
  double qs2 = 0.0;      // int kappa_s^2 ds
  double sym = 0.0;

  friend bool operator==(const DiagRecord&, const DiagRecord&) = default;
};

inline DiagRecord record(const PolarState& s, Scheme scheme) {
  const auto& c = s.curve;
  const std::size_t n = c.size();
  const auto geo = polar_geometry(c, scheme);
  const auto dk = diff_periodic(geo.kappa, 1, scheme);

  DiagRecord d;
  d.t = s.t;
  d.L = quadrature_periodic(geo.g);
  std::vector<double> half_r2(n), dev(n), ks(n);
  const double mean_k = 2.0 * std::numbers::pi / d.L;
  for (std::size_t j = 0; j < n; ++j) {
    half_r2[j] = 0.5 * c[j] * c[j];
    dev[j] = (geo.kappa[j] - mean_k) * (geo.kappa[j] - mean_k) * geo.g[j];
    ks[j] = dk[j] * dk[j] / geo.g[j];  // kappa_s^2 g with kappa_s = kappa_theta / g
  }
  d.A = quadrature_periodic(half_r2);
  d.q2 = quadrature_periodic(dev);
  d.qs2 = quadrature_periodic(ks);
  d.deficit = d.L * d.L - 4.0 * std::numbers::pi * d.A;
  d.kappa_min = *std::min_element(geo.kappa.begin(), geo.kappa.end());
  d.kappa_max = *std::max_element(geo.kappa.begin(), geo.kappa.end());
  d.p_min = *std::min_element(geo.p.begin(), geo.p.end());
  const auto r = c.radii();
  d.r_min = *std::min_element(r.begin(), r.end());
  d.r_max = *std::max_element(r.begin(), r.end());
  d.grad_max = 0.0;
  for (double v : geo.r_theta) d.grad_max = std::max(d.grad_max, std::abs(v));
  d.sym = symmetry_defect(c);
  return d;
}

inline DiagRecord record(const MarkerState& s, Scheme = Scheme::spectral) {
  const auto x = s.curve.points();
  const std::size_t m = x.size();
  const auto geo = marker_geometry(s.curve);
  DiagRecord d;
  d.t = s.t;
  d.L = geo.length;
  d.A = geo.signed_area;
  d.deficit = d.L * d.L - 4.0 * std::numbers::pi * d.A;
  d.kappa_min = *std::min_element(geo.kappa.begin(), geo.kappa.end());
  d.kappa_max = *std::max_element(geo.kappa.begin(), geo.kappa.end());
  d.p_min = geo.min_star_det;
  d.r_min = std::numeric_limits<double>::infinity();
  d.r_max = 0.0;
  const double mean_k = 2.0 * std::numbers::pi / d.L;
  for (std::size_t j = 0; j < m; ++j) {
    const double rad = norm(x[j]);
    d.r_min = std::min(d.r_min, rad);
    d.r_max = std::max(d.r_max, rad);
    d.grad_max = std::max(d.grad_max, std::abs(dot(x[j], geo.tangent[j])));
    const double dev = geo.kappa[j] - mean_k;
    d.q2 += dev * dev * geo.weight[j];
    const double hm = geo.edge[(j + m - 1) % m], hp = geo.edge[j];
    const double ks = (geo.kappa[(j + 1) % m] - geo.kappa[(j + m - 1) % m]) / (hm + hp);
    d.qs2 += ks * ks * geo.weight[j];
  }
  d.sym = std::numeric_limits<double>::quiet_NaN();
  return d;
}

struct BoundTolerances {
  double area_rel = 1e-6;     // times A0
  double length_rel = 1e-8;   // times L0, for length / radius / gradient bounds
  double monotone_rel = 1e-10;  // times L0, per-record length increase
};

struct BoundCheck {
  std::string name;
  double worst_margin = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  std::optional<double> first_violation;

  bool ok() const { return !first_violation.has_value(); }
};

/// Signed margins (bound minus value); violation iff margin < -tolerance.
struct BoundReport {
  std::vector<BoundCheck> checks;
  double C1 = 0.0;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& b) { return b.ok(); });
  }
  std::size_t violations() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const BoundCheck& b) { return !b.ok(); }));
  }
  const BoundCheck& at(std::string_view name) const {
    for (const auto& b : checks)
      if (b.name == name) return b;
    throw std::out_of_range("no bound named " + std::string(name));
  }
};

/// Area constancy, sqrt(4 pi A0) <= L <= L0 with L nonincreasing,
/// r <= L0/2, |r_theta| <= C1 = max(max |r_theta(., 0)|, 3 L0 / pi), p > 0.
inline BoundReport check_bounds(std::span<const DiagRecord> history, const DiagRecord& initial,
                                const BoundTolerances& tol = {}) {
  const double A0 = initial.A, L0 = initial.L;
  BoundReport rep;
  rep.C1 = std::max(initial.grad_max, 3.0 * L0 / std::numbers::pi);
  const double iso = std::sqrt(4.0 * std::numbers::pi * A0);
  rep.checks = {
      {"area", std::numeric_limits<double>::infinity(), tol.area_rel * A0, {}},
      {"length_upper", std::numeric_limits<double>::infinity(), tol.length_rel * L0, {}},
      {"length_isoperimetric", std::numeric_limits<double>::infinity(), tol.length_rel * L0, {}},
      {"length_monotone", std::numeric_limits<double>::infinity(), tol.monotone_rel * L0, {}},
      {"radius", std::numeric_limits<double>::infinity(), tol.length_rel * L0, {}},
      {"gradient", std::numeric_limits<double>::infinity(), tol.length_rel * L0, {}},
      {"support", std::numeric_limits<double>::infinity(), 0.0, {}},
  };
  auto apply = [](BoundCheck& b, double margin, double t) {
    b.worst_margin = std::min(b.worst_margin, margin);
    if (margin < -b.tolerance && !b.first_violation) b.first_violation = t;
  };
  double prev_L = L0;
  for (const auto& d : history) {
    apply(rep.checks[0], -std::abs(d.A - A0), d.t);
    apply(rep.checks[1], L0 - d.L, d.t);
    apply(rep.checks[2], d.L - iso, d.t);
    apply(rep.checks[3], prev_L - d.L, d.t);
    apply(rep.checks[4], L0 / 2.0 - d.r_max, d.t);
    apply(rep.checks[5], rep.C1 - d.grad_max, d.t);
    apply(rep.checks[6], d.p_min, d.t);
    prev_L = d.L;
  }
  return rep;
}

enum class DecayField { q2, qs2 };

inline std::string_view to_string(DecayField f) { return f == DecayField::q2 ? "q2" : "qs2"; }

struct DecayFit {
  double rate = 0.0;      // slope of log(field) against t
  double residual = 0.0;  // RMS misfit of log(field)
  std::size_t samples = 0;
};

/// Values at or below this are treated as the numerical noise floor.
inline constexpr double decay_noise_floor = 1e-12;

/// Least-squares fit of log(field) = a + rate * t over records in [t0, t1].
/// Throws std::domain_error when the field touches the noise floor in the
/// window or fewer than three records fall inside it.
inline DecayFit decay_fit(std::span<const DiagRecord> history, DecayField field, double t0, double t1) {
  std::vector<double> ts, ys;
  for (const auto& d : history) {
    if (d.t < t0 || d.t > t1) continue;
    const double v = field == DecayField::q2 ? d.q2 : d.qs2;
    if (!(v > decay_noise_floor))
      throw std::domain_error("decay_fit: " + std::string(to_string(field)) + " at the noise floor at t = " + std::to_string(d.t));
    ts.push_back(d.t);
    ys.push_back(std::log(v));
  }
  if (ts.size() < 3) throw std::domain_error("decay_fit: fewer than three records in the window");
  const double nn = static_cast<double>(ts.size());
  double st = 0, sy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) st += ts[i], sy += ys[i];
  const double mt = st / nn, my = sy / nn;
  double stt = 0, sty = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) stt += (ts[i] - mt) * (ts[i] - mt), sty += (ts[i] - mt) * (ys[i] - my);
  DecayFit fit;
  fit.rate = sty / stt;
  fit.samples = ts.size();
  double ss = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double e = ys[i] - (my + fit.rate * (ts[i] - mt));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / nn);
  return fit;
}

struct ComparisonResult {
  double min_margin = std::numeric_limits<double>::infinity();  // min over (theta, t) of r_gapf - rho_csf
  std::vector<double> t_grid;                                    // shared record times
  std::vector<double> margins;                                   // min over theta per shared time
  double gapf_p_min = std::numeric_limits<double>::infinity();   // min support over the area-preserving run
  Event csf_terminal{EventKind::time_limit};
  Event gapf_terminal{EventKind::time_limit};
};

/// Runs the curve shortening flow to termination, then the area-preserving
/// flow over the same record grid (no early stop), and measures
/// r_gapf - rho_csf at every shared record time.
inline ComparisonResult compare_gapf_csf(const PolarCurve& initial, const StepperConfig& cfg, Scheme scheme) {
  if (symmetry_defect(initial) >= 1e-10)
    throw std::invalid_argument("compare_gapf_csf: initial curve must be centrosymmetric");
  StepperConfig shared = resolve(cfg, initial, scheme);

  std::map<double, std::vector<double>> csf_radii;
  const auto csf = evolve<PolarCurve>({initial, 0.0, 0}, FlowLaw::csf, shared, scheme, [&](const PolarState& s) {
    csf_radii[s.t] = {s.curve.radii().begin(), s.curve.radii().end()};
  });

  // last time that lies on the shared grid
  const double interval = *shared.record_interval;
  double t_last = 0.0;
  for (const auto& [t, r] : csf_radii) {
    const double k = std::round(t / interval);
    if (t == std::min(k * interval, shared.t_end)) t_last = std::max(t_last, t);
  }

  ComparisonResult out;
  out.csf_terminal = csf.terminal();
  StepperConfig gcfg = shared;
  gcfg.stop_on_converged = false;
  gcfg.t_end = std::max(t_last, interval);
  const auto gapf = evolve<PolarCurve>({initial, 0.0, 0}, FlowLaw::gapf, gcfg, scheme, [&](const PolarState& s) {
    const auto p = support(s.curve, scheme);
    out.gapf_p_min = std::min(out.gapf_p_min, *std::min_element(p.begin(), p.end()));
    const auto it = csf_radii.find(s.t);
    if (it == csf_radii.end() || s.t > t_last) return;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.curve.size(); ++j) m = std::min(m, s.curve[j] - it->second[j]);
    out.t_grid.push_back(s.t);
    out.margins.push_back(m);
    out.min_margin = std::min(out.min_margin, m);
  });
  out.gapf_terminal = gapf.terminal();
  if (out.gapf_terminal.kind == EventKind::star_shape_lost || out.gapf_terminal.kind == EventKind::blow_up)
    throw std::runtime_error("compare_gapf_csf: area-preserving run terminated with " +
                             std::string(to_string(out.gapf_terminal.kind)) + " at t = " + std::to_string(out.gapf_terminal.t));
  return out;
}

}  // namespace gapf
