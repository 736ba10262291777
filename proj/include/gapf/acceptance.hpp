#pragma once
// Acceptance experiments: fixed scenarios, pinned tolerances, one verdict per
// criterion. Shared by `gapf verify` and the acceptance test binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "builtin_curves.hpp"
#include "diagnostics.hpp"
#include "flow_laws.hpp"
#include "io.hpp"
#include "time_integration.hpp"

namespace gapf::acceptance {

struct Thresholds {
  double area_rel = 1e-6;             // |A - A0| / A0 at every record
  double length_monotone_rel = 1e-10;  // per-record L increase, times L0
  double length_final_slack = 1e-4;   // L_final >= sqrt(4 pi A0) - slack
  double circle_rel = 1e-3;           // max |kappa - sqrt(pi/A0)| / sqrt(pi/A0)
  double apriori_rel = 1e-8;          // r <= L0/2, |r_theta| <= C1, times L0
  double symmetry_rel = 1e-8;         // sym < this * r_max
  double compare_margin = 1e-4;       // r_gapf - rho_csf >= -this
  double csf_radius_abs = 1e-6;       // |rho(0.375) - 0.5|
  double csf_extinction_rel = 1e-2;   // |t_terminal - 0.5| / 0.5
  double q2_final = 1e-4;
  double decay_rate_factor = 0.5;     // |rate| >= factor * (2 pi / L0)^2
  double convergence_ratio = 4.0;     // e(128) / e(256) against the 512 reference
  double runtime_main_s = 30.0;
  double runtime_immersed_s = 60.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Run {
  std::string label;
  std::vector<DiagRecord> history;
  EvolveResult<PolarCurve> result;
  PolarCurve final_curve;
  double seconds = 0.0;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline Run run_polar(std::string label, const BuiltinCurve& id, std::size_t n, FlowLaw law, const StepperConfig& cfg,
                     Scheme scheme = Scheme::spectral) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = std::get<PolarCurve>(build_initial(id, n));
  std::vector<DiagRecord> h;
  auto res = evolve<PolarCurve>({c, 0.0, 0}, law, cfg, scheme, [&](const PolarState& s) { h.push_back(record(s, scheme)); });
  auto fin = res.final_state.curve;
  return {std::move(label), std::move(h), std::move(res), std::move(fin), seconds_since(t0)};
}

/// Area-preserving runs to convergence at n = 256, spectral.
inline StepperConfig gapf_config() {
  StepperConfig cfg;
  cfg.t_end = 40.0;
  cfg.record_interval = 0.05;
  cfg.tol_circle = 1e-3;
  return cfg;
}

/// Curve shortening runs to extinction.
inline StepperConfig csf_config() {
  StepperConfig cfg;
  cfg.t_end = 2.0;
  cfg.record_interval = 0.0125;
  return cfg;
}

struct Experiments {
  std::vector<Run> gapf;  // ellipse(2,1), cos_star(1,0.25,2), cos_star(1,0.15,6)
  std::optional<Run> csf_circle;
  std::vector<ComparisonResult> comparisons;  // ellipse, cos_star(1,0.25,2)
  std::vector<std::string> comparison_labels;
  double comparison_seconds = 0.0;
  std::vector<DiagRecord> immersed;
  Event immersed_terminal{EventKind::time_limit};
  double immersed_seconds = 0.0;
  // terminal max-norm errors at n = 128 and 256 against n = 512, per scheme
  struct Convergence {
    Scheme scheme;
    double err128 = 0.0;
    double err256 = 0.0;
  };
  std::vector<Convergence> convergence;
};

/// Max-norm difference on the nodes shared with the coarse grid.
inline double coarse_node_error(const PolarCurve& coarse, const PolarCurve& fine) {
  const std::size_t stride = fine.size() / coarse.size();
  double e = 0.0;
  for (std::size_t j = 0; j < coarse.size(); ++j) e = std::max(e, std::abs(coarse[j] - fine[j * stride]));
  return e;
}

inline Experiments run_experiments(const std::function<void(const std::string&)>& progress = {}) {
  auto note = [&](const std::string& s) {
    if (progress) progress(s);
  };
  Experiments ex;
  const BuiltinCurve ellipse{CurveKind::ellipse, {2.0, 1.0}};
  const BuiltinCurve star2{CurveKind::cos_star, {1.0, 0.25, 2.0}};
  const BuiltinCurve star6{CurveKind::cos_star, {1.0, 0.15, 6.0}};

  note("gapf ellipse(2,1)");
  ex.gapf.push_back(run_polar("ellipse(2,1)", ellipse, 256, FlowLaw::gapf, gapf_config()));
  note("gapf cos_star(1,0.25,2)");
  ex.gapf.push_back(run_polar("cos_star(1,0.25,2)", star2, 256, FlowLaw::gapf, gapf_config()));
  note("gapf cos_star(1,0.15,6)");
  ex.gapf.push_back(run_polar("cos_star(1,0.15,6)", star6, 256, FlowLaw::gapf, gapf_config()));

  note("csf circle(1)");
  {
    StepperConfig cfg = csf_config();
    cfg.record_interval = 0.125;  // lands on t = 0.375
    ex.csf_circle = run_polar("circle(1)", {CurveKind::circle, {1.0}}, 128, FlowLaw::csf, cfg);
  }

  note("comparison runs");
  {
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& [label, id] : {std::pair{"ellipse(2,1)", ellipse}, std::pair{"cos_star(1,0.25,2)", star2}}) {
      ex.comparisons.push_back(compare_gapf_csf(std::get<PolarCurve>(build_initial(id, 256)), csf_config(), Scheme::spectral));
      ex.comparison_labels.emplace_back(label);
    }
    ex.comparison_seconds = seconds_since(t0);
  }

  note("csf immersed_loops (marker)");
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = std::get<MarkerCurve>(build_initial({CurveKind::immersed_loops, {1.0, 0.5}}, 256));
    StepperConfig cfg = csf_config();
    auto res = evolve<MarkerCurve>({c, 0.0, 0}, FlowLaw::csf, cfg, Scheme::spectral,
                                   [&](const MarkerState& s) { ex.immersed.push_back(record(s)); });
    ex.immersed_terminal = res.terminal();
    ex.immersed_seconds = seconds_since(t0);
  }

  note("grid convergence");
  for (Scheme scheme : {Scheme::fd2, Scheme::fd4, Scheme::spectral}) {
    StepperConfig cfg;
    cfg.t_end = 1.0;
    cfg.record_interval = 0.5;
    cfg.stop_on_converged = false;
    const auto r128 = run_polar("128", ellipse, 128, FlowLaw::gapf, cfg, scheme);
    const auto r256 = run_polar("256", ellipse, 256, FlowLaw::gapf, cfg, scheme);
    const auto r512 = run_polar("512", ellipse, 512, FlowLaw::gapf, cfg, scheme);
    ex.convergence.push_back(
        {scheme, coarse_node_error(r128.final_curve, r512.final_curve), coarse_node_error(r256.final_curve, r512.final_curve)});
  }
  return ex;
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << std::scientific << v;
  return os.str();
}

}  // namespace detail

inline std::vector<CriterionResult> evaluate(const Experiments& ex, const Thresholds& th = {}) {
  using detail::fmt;
  std::vector<CriterionResult> out;
  const Run& ell = ex.gapf.front();
  const double L0 = ell.history.front().L;

  {  // 1 area conservation
    double worst = 0.0;
    for (const auto& d : ell.history) worst = std::max(worst, std::abs(d.A - 2.0 * std::numbers::pi) / (2.0 * std::numbers::pi));
    const bool conv = ell.result.terminal().kind == EventKind::converged;
    const bool ok = conv && worst < th.area_rel && ell.seconds < th.runtime_main_s;
    out.push_back({1, "area conservation", ok,
                   "max |A-2pi|/2pi = " + fmt(worst) + " (< " + fmt(th.area_rel) + "), terminal " +
                       std::string(to_string(ell.result.terminal().kind)) + ", " + fmt(ell.seconds) + " s"});
  }
  {  // 2 length bounds
    double worst_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < ell.history.size(); ++i)
      worst_increase = std::max(worst_increase, ell.history[i].L - ell.history[i - 1].L);
    const double Lf = ell.history.back().L;
    const double floor = std::sqrt(8.0 * std::numbers::pi * std::numbers::pi) - th.length_final_slack;
    const bool ok = worst_increase <= th.length_monotone_rel * L0 && Lf >= floor;
    out.push_back({2, "length bounds", ok,
                   "max dL per record = " + fmt(worst_increase) + " (<= " + fmt(th.length_monotone_rel * L0) +
                       "), L_final = " + fmt(Lf) + " (>= " + fmt(floor) + ")"});
  }
  {  // 3 convergence to a circle
    bool ok = true;
    std::string detail;
    for (const auto& run : ex.gapf) {
      const auto conv = run.result.find(EventKind::converged);
      const auto cvx = run.result.find(EventKind::convexity_reached);
      const double A = run.history.front().A;
      const double limit = std::sqrt(std::numbers::pi / A);
      const auto kappa = metric_and_curvature(run.final_curve, Scheme::spectral).kappa;
      double dev = 0.0;
      for (double k : kappa) dev = std::max(dev, std::abs(k - limit));
      const bool this_ok = conv && cvx && cvx->t <= conv->t && dev < th.circle_rel * limit;
      ok = ok && this_ok;
      detail += run.label + ": " + (conv ? "Converged t=" + fmt(conv->t) : std::string("not converged")) +
                (cvx ? ", convex t=" + fmt(cvx->t) : std::string(", never convex")) + ", max|k-k*|/k* = " + fmt(dev / limit) +
                "; ";
    }
    out.push_back({3, "convergence to a circle", ok, detail + "(< " + fmt(th.circle_rel) + ")"});
  }
  {  // 4 a-priori bounds
    bool ok = true;
    std::string detail;
    BoundTolerances tol;
    tol.length_rel = th.apriori_rel;
    for (const auto& run : ex.gapf) {
      const auto rep = check_bounds(run.history, run.history.front(), tol);
      const bool this_ok = rep.at("radius").ok() && rep.at("gradient").ok();
      ok = ok && this_ok;
      detail += run.label + ": r margin " + fmt(rep.at("radius").worst_margin) + ", grad margin " +
                fmt(rep.at("gradient").worst_margin) + "; ";
    }
    out.push_back({4, "a-priori bounds r <= L0/2, |r_theta| <= C1", ok, detail});
  }
  {  // 5 symmetry preservation
    bool ok = true;
    double worst = 0.0;
    auto scan = [&](const Run& run) {
      for (const auto& d : run.history) {
        worst = std::max(worst, d.sym / d.r_max);
        if (!(d.sym < th.symmetry_rel * d.r_max)) ok = false;
      }
    };
    for (const auto& run : ex.gapf) scan(run);
    scan(*ex.csf_circle);
    out.push_back({5, "centrosymmetry preserved", ok, "max sym/r_max = " + fmt(worst) + " (< " + fmt(th.symmetry_rel) + ")"});
  }
  {  // 6 comparison principle
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < ex.comparisons.size(); ++i) {
      const auto& c = ex.comparisons[i];
      const bool this_ok = c.min_margin >= -th.compare_margin && c.gapf_p_min > 0.0 && !c.t_grid.empty();
      ok = ok && this_ok;
      detail += ex.comparison_labels[i] + ": min(r-rho) = " + fmt(c.min_margin) + " over " + std::to_string(c.t_grid.size()) +
                " records to t=" + fmt(c.t_grid.empty() ? 0.0 : c.t_grid.back()) + ", p_min = " + fmt(c.gapf_p_min) + "; ";
    }
    out.push_back({6, "comparison r_gapf >= rho_csf", ok, detail});
  }
  {  // 7 exact CSF solution
    const auto& run = *ex.csf_circle;
    double err = std::numeric_limits<double>::infinity();
    for (const auto& d : run.history)
      if (d.t == 0.375) err = std::max(std::abs(d.r_min - 0.5), std::abs(d.r_max - 0.5));
    const auto term = run.result.terminal();
    const bool ext = term.kind == EventKind::star_shape_lost || term.kind == EventKind::blow_up;
    const double rel = std::abs(term.t - 0.5) / 0.5;
    const bool ok = err < th.csf_radius_abs && ext && rel < th.csf_extinction_rel;
    out.push_back({7, "CSF circle exact solution", ok,
                   "|rho(0.375)-0.5| = " + fmt(err) + ", terminal " + std::string(to_string(term.kind)) + " at t=" + fmt(term.t)});
  }
  {  // 8 decay quantities
    const auto cvx = ell.result.find(EventKind::convexity_reached);
    const double q2f = ell.history.back().q2;
    const double ref = std::pow(2.0 * std::numbers::pi / L0, 2);
    bool ok = q2f < th.q2_final && cvx.has_value();
    std::string fit_detail;
    if (cvx) {
      try {
        const auto fit = decay_fit(ell.history, DecayField::qs2, cvx->t, ell.history.back().t);
        ok = ok && fit.rate < 0.0 && -fit.rate >= th.decay_rate_factor * ref;
        fit_detail = "qs2 rate = " + fmt(fit.rate) + " (<= " + fmt(-th.decay_rate_factor * ref) + ")";
      } catch (const std::domain_error& e) {
        ok = false;
        fit_detail = std::string("fit refused: ") + e.what();
      }
    }
    out.push_back({8, "decay of q2 and qs2", ok, "q2_final = " + fmt(q2f) + " (< " + fmt(th.q2_final) + "), " + fit_detail});
  }
  {  // 9 immersed counterexample
    const auto& h = ex.immersed;
    const bool positive0 = !h.empty() && h.front().p_min > 0.0;
    double t_flip = -1.0;
    for (const auto& d : h)
      if (d.t > 0.0 && d.p_min <= 0.0) {
        t_flip = d.t;
        break;
      }
    const bool ok = positive0 && t_flip > 0.0 && ex.immersed_seconds < th.runtime_immersed_s;
    out.push_back({9, "immersed curve loses star-shapedness", ok,
                   "min det(X,T) at t=0: " + fmt(h.empty() ? 0.0 : h.front().p_min) +
                       (t_flip > 0 ? ", first non-positive at t=" + fmt(t_flip) : std::string(", never changes sign")) +
                       ", terminal " + std::string(to_string(ex.immersed_terminal.kind)) + ", " + fmt(ex.immersed_seconds) + " s"});
  }
  {  // 10 numerical convergence; the fd2 scheme is the gate
    bool ok = false;
    std::string detail;
    for (const auto& c : ex.convergence) {
      const double ratio = c.err128 / c.err256;
      if (c.scheme == Scheme::fd2) ok = ratio >= th.convergence_ratio;
      detail += std::string(to_string(c.scheme)) + ": e128 = " + fmt(c.err128) + ", e256 = " + fmt(c.err256) +
                ", ratio = " + fmt(ratio) + "; ";
    }
    out.push_back({10, "grid convergence (fd2 ratio >= " + fmt(th.convergence_ratio) + ")", ok, detail});
  }
  return out;
}

inline void print_table(std::ostream& os, const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    os << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " :: " << r.detail << '\n';
}

inline bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

}  // namespace gapf::acceptance
