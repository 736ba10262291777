#pragma once
// Explicit Runge-Kutta time stepping for polar and marker flow states, with
// record-time alignment and terminal event detection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "curve_geometry.hpp"
#include "errors.hpp"
#include "flow_laws.hpp"
#include "spatial_ops.hpp"

namespace gapf {

template <class Curve>
struct FlowState {
  Curve curve;
  double t = 0.0;
  std::size_t step_index = 0;
};

using PolarState = FlowState<PolarCurve>;
using MarkerState = FlowState<MarkerCurve>;

enum class EventKind { convexity_reached, converged, star_shape_lost, blow_up, time_limit };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::convexity_reached: return "ConvexityReached";
    case EventKind::converged: return "Converged";
    case EventKind::star_shape_lost: return "StarShapeLost";
    case EventKind::blow_up: return "BlowUp";
    case EventKind::time_limit: return "TimeLimit";
  }
  return "?";
}

struct Event {
  EventKind kind;
  double t = 0.0;
  double detail = 0.0;

  bool terminal() const { return kind != EventKind::convexity_reached; }
};

enum class Stepper { rk4, ssprk3 };

inline std::string_view to_string(Stepper s) { return s == Stepper::rk4 ? "rk4" : "ssprk3"; }

inline Stepper parse_stepper(std::string_view name) {
  if (name == "rk4") return Stepper::rk4;
  if (name == "ssprk3") return Stepper::ssprk3;
  throw std::invalid_argument("unknown stepper '" + std::string(name) + "'");
}

/// Unset optional fields are derived from the initial curve by resolve().
struct StepperConfig {
  Stepper stepper = Stepper::rk4;
  double cfl = 0.4;
  double dt_max = 1e-2;
  double t_end = 10.0;
  std::optional<double> tol_convex;       // default 1e-3 * 2*pi/L0
  double tol_circle = 1e-3;
  std::optional<double> r_floor;          // default 1e-6 * mean initial radius
  std::optional<double> kappa_ceiling;    // default 1e6 * 2*pi/L0
  std::optional<double> record_interval;  // default t_end / record_count
  std::size_t record_count = 200;
  std::size_t max_steps = 50'000'000;
  bool stop_on_converged = true;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("StepperConfig: ") + name + " must be positive");
    };
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("StepperConfig: cfl must lie in (0, 1]");
    positive(dt_max, "dt_max");
    positive(t_end, "t_end");
    positive(tol_circle, "tol_circle");
    if (tol_convex) positive(*tol_convex, "tol_convex");
    if (r_floor) positive(*r_floor, "r_floor");
    if (kappa_ceiling) positive(*kappa_ceiling, "kappa_ceiling");
    if (record_interval) positive(*record_interval, "record_interval");
    if (record_count == 0) throw std::invalid_argument("StepperConfig: record_count must be positive");
  }
};

namespace detail {

struct Reference {
  double length = 0.0;
  double area = 0.0;
  double mean_radius = 0.0;
};

inline Reference reference_of(const PolarCurve& c, Scheme scheme) {
  const auto la = length_area(c, scheme);
  double sum = 0.0;
  for (double r : c.radii()) sum += r;
  return {la.length, la.area, sum / static_cast<double>(c.size())};
}

inline Reference reference_of(const MarkerCurve& c, Scheme) {
  const auto geo = marker_geometry(c);
  double sum = 0.0;
  for (Vec2 p : c.points()) sum += norm(p);
  return {geo.length, geo.signed_area, sum / static_cast<double>(c.size())};
}

// Flat views for Runge-Kutta combinations.
inline std::vector<double> flatten(const PolarCurve& c) { return {c.radii().begin(), c.radii().end()}; }
inline std::vector<double> flatten(const MarkerCurve& c) {
  std::vector<double> v(2 * c.size());
  for (std::size_t j = 0; j < c.size(); ++j) v[2 * j] = c[j].x, v[2 * j + 1] = c[j].y;
  return v;
}

inline PolarCurve unflatten(const PolarCurve&, std::vector<double> v, double r_floor) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!std::isfinite(v[j])) throw BlowUp("non-finite radius at node " + std::to_string(j), v[j]);
    if (v[j] <= r_floor)
      throw StarShapeLost("radius " + std::to_string(v[j]) + " at node " + std::to_string(j) + " reached the floor", v[j]);
  }
  return PolarCurve(std::move(v));
}

inline MarkerCurve unflatten(const MarkerCurve&, const std::vector<double>& v, double) {
  std::vector<Vec2> pts(v.size() / 2);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    pts[j] = {v[2 * j], v[2 * j + 1]};
    if (!std::isfinite(pts[j].x) || !std::isfinite(pts[j].y)) throw BlowUp("non-finite marker position", v[2 * j]);
  }
  if (MarkerCurve::shoelace(pts) <= 0.0) throw BlowUp("marker curve lost its orientation", 0.0);
  try {
    return MarkerCurve(std::move(pts));
  } catch (const std::invalid_argument& e) {
    throw BlowUp(e.what(), 0.0);
  }
}

inline std::vector<double> rhs_flat(const PolarCurve& c, FlowLaw law, Scheme scheme, double r_floor) {
  return polar_rhs(c, law, scheme, r_floor);
}

inline std::vector<double> rhs_flat(const MarkerCurve& c, FlowLaw law, Scheme, double) {
  std::vector<Vec2> v;
  try {
    v = marker_rhs(c, law);
  } catch (const std::invalid_argument& e) {
    throw BlowUp(e.what(), 0.0);
  }
  std::vector<double> out(2 * v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[2 * j] = v[j].x, out[2 * j + 1] = v[j].y;
  return out;
}

inline std::vector<double> curvature_of(const PolarCurve& c, Scheme scheme) {
  return metric_and_curvature(c, scheme).kappa;
}
inline std::vector<double> curvature_of(const MarkerCurve& c, Scheme) { return marker_geometry(c).kappa; }

inline void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t j = 0; j < y.size(); ++j) y[j] += a * x[j];
}

}  // namespace detail

/// Fills every unset StepperConfig field from the initial curve.
template <class Curve>
StepperConfig resolve(StepperConfig cfg, const Curve& initial, Scheme scheme = Scheme::spectral) {
  cfg.validate();
  const auto ref = detail::reference_of(initial, scheme);
  const double mean_kappa = 2.0 * std::numbers::pi / ref.length;
  if (!cfg.tol_convex) cfg.tol_convex = 1e-3 * mean_kappa;
  if (!cfg.r_floor) cfg.r_floor = 1e-6 * ref.mean_radius;
  if (!cfg.kappa_ceiling) cfg.kappa_ceiling = 1e6 * mean_kappa;
  if (!cfg.record_interval) cfg.record_interval = cfg.t_end / static_cast<double>(cfg.record_count);
  return cfg;
}

/// Explicit-parabolic step limit: cfl * dtheta^2 * min g^2 / 2 in polar form
/// (the diffusion coefficient is 1/g^2), cfl * min edge^2 / 2 for markers.
inline double stable_dt(const PolarState& s, const StepperConfig& cfg, Scheme scheme) {
  const auto rt = diff_periodic(s.curve.radii(), 1, scheme);
  double g2min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.curve.size(); ++j) g2min = std::min(g2min, s.curve[j] * s.curve[j] + rt[j] * rt[j]);
  const double h = s.curve.dtheta();
  return std::min(cfg.dt_max, cfg.cfl * h * h * g2min / 2.0);
}

inline double stable_dt(const MarkerState& s, const StepperConfig& cfg, Scheme = Scheme::spectral) {
  const auto x = s.curve.points();
  double emin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x.size(); ++j) emin = std::min(emin, norm(x[(j + 1) % x.size()] - x[j]));
  return std::min(cfg.dt_max, cfg.cfl * emin * emin / 2.0);
}

/// One explicit step. Every stage recomputes the nonlocal length. Throws
/// StarShapeLost below r_floor and BlowUp above kappa_ceiling or on
/// non-finite state. cfg must have been resolved.
template <class Curve>
FlowState<Curve> step(const FlowState<Curve>& s, FlowLaw law, double dt, const StepperConfig& cfg, Scheme scheme) {
  const double r_floor = cfg.r_floor.value_or(0.0);
  const auto& proto = s.curve;
  auto eval = [&](const std::vector<double>& y) {
    return detail::rhs_flat(detail::unflatten(proto, y, r_floor), law, scheme, r_floor);
  };
  const std::vector<double> y0 = detail::flatten(s.curve);
  std::vector<double> y;

  if (cfg.stepper == Stepper::rk4) {
    const auto k1 = detail::rhs_flat(s.curve, law, scheme, r_floor);
    auto tmp = y0;
    detail::axpy(tmp, 0.5 * dt, k1);
    const auto k2 = eval(tmp);
    tmp = y0;
    detail::axpy(tmp, 0.5 * dt, k2);
    const auto k3 = eval(tmp);
    tmp = y0;
    detail::axpy(tmp, dt, k3);
    const auto k4 = eval(tmp);
    y = y0;
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  } else {
    auto u1 = y0;
    detail::axpy(u1, dt, detail::rhs_flat(s.curve, law, scheme, r_floor));
    auto u2 = u1;
    detail::axpy(u2, dt, eval(u1));
    for (std::size_t j = 0; j < u2.size(); ++j) u2[j] = 0.75 * y0[j] + 0.25 * u2[j];
    auto u3 = u2;
    detail::axpy(u3, dt, eval(u2));
    y.resize(y0.size());
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = y0[j] / 3.0 + 2.0 / 3.0 * u3[j];
  }

  FlowState<Curve> out{detail::unflatten(proto, std::move(y), r_floor), s.t + dt, s.step_index + 1};
  if (cfg.kappa_ceiling) {
    const auto kappa = detail::curvature_of(out.curve, scheme);
    double kmax = 0.0;
    for (double k : kappa) {
      if (!std::isfinite(k)) throw BlowUp("non-finite curvature", k);
      kmax = std::max(kmax, std::abs(k));
    }
    if (kmax > *cfg.kappa_ceiling) throw BlowUp("curvature " + std::to_string(kmax) + " above the ceiling", kmax);
  }
  return out;
}

template <class Curve>
struct EvolveResult {
  FlowState<Curve> final_state;
  std::vector<Event> events;
  StepperConfig config;  // as resolved

  const Event& terminal() const {
    for (const auto& e : events)
      if (e.terminal()) return e;
    throw std::logic_error("run has no terminal event");
  }
  std::optional<Event> find(EventKind k) const {
    for (const auto& e : events)
      if (e.kind == k) return e;
    return std::nullopt;
  }
};

/// max_j |kappa_j sqrt(A0/pi) - 1|, the distance from the limit circle.
inline double circle_flatness(const std::vector<double>& kappa, double area0) {
  const double scale = std::sqrt(area0 / std::numbers::pi);
  double d = 0.0;
  for (double k : kappa) d = std::max(d, std::abs(k * scale - 1.0));
  return d;
}

/// Runs until a terminal event. Steps are clipped to land exactly on the
/// record times k * record_interval and on t_end; the recorder sees the
/// initial state, every record time, and the final state.
///
/// ConvexityReached fires at the first record with kappa_min >= tol_convex.
/// Converged fires (area-preserving law only, and only when the initial curve
/// is not already within tol_circle of the limit circle) at the first record
/// with circle_flatness < tol_circle. StarShapeLost and BlowUp raised by a
/// step end the run with the last accepted state as final.
template <class Curve>
EvolveResult<Curve> evolve(const FlowState<Curve>& initial, FlowLaw law, const StepperConfig& config, Scheme scheme,
                           const std::function<void(const FlowState<Curve>&)>& recorder = {}) {
  const StepperConfig cfg = resolve(config, initial.curve, scheme);
  const double area0 = detail::reference_of(initial.curve, scheme).area;
  const double interval = *cfg.record_interval;

  EvolveResult<Curve> res{initial, {}, cfg};
  auto& state = res.final_state;
  bool convex_seen = false;
  const bool may_converge =
      law == FlowLaw::gapf && cfg.stop_on_converged &&
      circle_flatness(detail::curvature_of(initial.curve, scheme), area0) >= cfg.tol_circle;

  auto emit = [&](const FlowState<Curve>& s) {
    if (recorder) recorder(s);
  };
  // Returns true when the run should stop.
  auto at_record = [&](const FlowState<Curve>& s) {
    emit(s);
    const auto kappa = detail::curvature_of(s.curve, scheme);
    const double kmin = *std::min_element(kappa.begin(), kappa.end());
    if (!convex_seen && kmin >= *cfg.tol_convex) {
      convex_seen = true;
      res.events.push_back({EventKind::convexity_reached, s.t, kmin});
    }
    if (may_converge) {
      const double flat = circle_flatness(kappa, area0);
      if (flat < cfg.tol_circle) {
        res.events.push_back({EventKind::converged, s.t, flat});
        return true;
      }
    }
    return false;
  };

  if (at_record(state)) return res;
  std::size_t k = 1;
  const double t0 = initial.t;
  auto record_time = [&](std::size_t idx) { return std::min(t0 + static_cast<double>(idx) * interval, cfg.t_end); };
  double next = record_time(k);
  bool last_was_record = true;

  while (true) {
    if (state.step_index - initial.step_index >= cfg.max_steps) {
      if (!last_was_record) emit(state);
      res.events.push_back({EventKind::time_limit, state.t, static_cast<double>(cfg.max_steps)});
      return res;
    }
    double dt = stable_dt(state, cfg, scheme);
    bool landing = false;
    if (state.t + dt >= next * (1.0 - 1e-14)) {
      dt = next - state.t;
      landing = true;
    }
    try {
      state = step(state, law, dt, cfg, scheme);
    } catch (const StarShapeLost& e) {
      if (!last_was_record) emit(state);
      res.events.push_back({EventKind::star_shape_lost, state.t, e.detail()});
      return res;
    } catch (const BlowUp& e) {
      if (!last_was_record) emit(state);
      res.events.push_back({EventKind::blow_up, state.t, e.detail()});
      return res;
    }
    last_was_record = false;
    if (!landing) continue;

    state.t = next;
    last_was_record = true;
    if (at_record(state)) return res;
    if (state.t >= cfg.t_end) {
      res.events.push_back({EventKind::time_limit, state.t, state.t});
      return res;
    }
    next = record_time(++k);
  }
}

}  // namespace gapf
