#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <gapf/builtin_curves.hpp>
#include <gapf/diagnostics.hpp>
#include <gapf/time_integration.hpp>

#include "test_helpers.hpp"

using namespace gapf;

namespace {

constexpr double pi = std::numbers::pi;

PolarCurve ellipse(std::size_t n) { return std::get<PolarCurve>(build_initial({CurveKind::ellipse, {2, 1}}, n)); }

double max_diff(const PolarCurve& a, const PolarCurve& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

StepperConfig resolved_for(const PolarCurve& c, StepperConfig cfg = {}) { return resolve(cfg, c); }

}  // namespace

TEST(StableDt, FormulaValue) {
  StepperConfig cfg;
  cfg.cfl = 0.5;
  cfg.dt_max = 1.0;
  const PolarState s{PolarCurve(std::vector<double>(64, 1.0)), 0.0, 0};
  const double h = 2 * pi / 64;
  EXPECT_DOUBLE_EQ(stable_dt(s, cfg, Scheme::spectral), 0.5 * h * h / 2.0);
  EXPECT_NEAR(stable_dt(s, cfg, Scheme::spectral), 2.40957e-3, 1e-8);
}

TEST(StableDt, GridScalingAndCap) {
  StepperConfig cfg;
  cfg.dt_max = 1.0;
  const auto c = ellipse(64), f = ellipse(128);
  EXPECT_NEAR(stable_dt(PolarState{c}, cfg, Scheme::spectral) / stable_dt(PolarState{f}, cfg, Scheme::spectral), 4.0, 1e-9);
  cfg.dt_max = 1e-6;
  EXPECT_EQ(stable_dt(PolarState{c}, cfg, Scheme::spectral), 1e-6);

  StepperConfig mcfg;
  mcfg.cfl = 0.5;
  mcfg.dt_max = 1.0;
  const auto m = to_marker(PolarCurve(std::vector<double>(64, 1.0)));
  const double e = 2 * std::sin(pi / 64);
  EXPECT_NEAR(stable_dt(MarkerState{m}, mcfg), 0.5 * e * e / 2, 1e-15);
}

TEST(Step, GapfCircleIsEquilibrium) {
  const PolarCurve c(std::vector<double>(64, 1.3));
  const auto cfg = resolved_for(c);
  for (Stepper st : {Stepper::rk4, Stepper::ssprk3}) {
    auto k = cfg;
    k.stepper = st;
    const auto s1 = step(PolarState{c}, FlowLaw::gapf, stable_dt(PolarState{c}, k, Scheme::spectral), k, Scheme::spectral);
    EXPECT_LT(max_diff(s1.curve, c) / 1.3, 1e-14);
    EXPECT_EQ(s1.step_index, 1u);
  }
}

TEST(Step, RungeKuttaLocalOrder) {
  // one step vs two half steps: the difference scales like dt^(p+1)
  const auto c = ellipse(16);
  for (auto [st, order] : {std::pair{Stepper::rk4, 4}, std::pair{Stepper::ssprk3, 3}}) {
    auto cfg = resolved_for(c);
    cfg.stepper = st;
    auto diff_at = [&](double dt) {
      const auto one = step(PolarState{c}, FlowLaw::gapf, dt, cfg, Scheme::spectral);
      const auto half = step(step(PolarState{c}, FlowLaw::gapf, dt / 2, cfg, Scheme::spectral), FlowLaw::gapf, dt / 2, cfg,
                             Scheme::spectral);
      return max_diff(one.curve, half.curve);
    };
    const double dt = 0.02;
    const double slope = std::log2(diff_at(dt) / diff_at(dt / 2));
    EXPECT_NEAR(slope, order + 1, 0.35) << to_string(st);
  }
}

TEST(Step, ErrorsAtFloorAndCeiling) {
  std::vector<double> r(32, 1.0);
  r[0] = 1e-3;
  const PolarCurve c(r);
  StepperConfig cfg;
  cfg.r_floor = 2e-3;
  EXPECT_THROW(step(PolarState{c}, FlowLaw::csf, 1e-6, cfg, Scheme::fd2), StarShapeLost);
  StepperConfig ceiling;
  ceiling.r_floor = 1e-9;
  ceiling.kappa_ceiling = 10.0;
  EXPECT_THROW(step(PolarState{c}, FlowLaw::csf, 1e-9, ceiling, Scheme::fd2), BlowUp);
}

TEST(Evolve, CsfCircleMatchesExactRadius) {
  StepperConfig cfg;
  cfg.t_end = 1.0;
  cfg.record_interval = 0.125;
  double r_at = -1.0;
  std::vector<double> times;
  const auto res = evolve<PolarCurve>({PolarCurve(std::vector<double>(128, 1.0))}, FlowLaw::csf, cfg, Scheme::spectral,
                                      [&](const PolarState& s) {
                                        times.push_back(s.t);
                                        if (s.t == 0.375) r_at = s.curve[17];
                                      });
  EXPECT_NEAR(r_at, std::sqrt(1 - 2 * 0.375), 1e-6);
  const auto term = res.terminal();
  EXPECT_TRUE(term.kind == EventKind::star_shape_lost || term.kind == EventKind::blow_up);
  EXPECT_NEAR(term.t, 0.5, 0.005);
  EXPECT_FALSE(res.find(EventKind::converged).has_value());
  for (std::size_t i = 1; i < times.size(); ++i) EXPECT_GE(times[i], times[i - 1]);
}

TEST(Evolve, GapfCircleHitsTimeLimitUnchanged) {
  const PolarCurve c(std::vector<double>(64, 1.0));
  StepperConfig cfg;
  cfg.t_end = 0.5;
  const auto res = evolve<PolarCurve>({c}, FlowLaw::gapf, cfg, Scheme::spectral);
  EXPECT_EQ(res.terminal().kind, EventKind::time_limit);
  EXPECT_EQ(res.final_state.t, 0.5);
  EXPECT_LT(max_diff(res.final_state.curve, c), 1e-12);
  // a circle is convex from the start
  ASSERT_TRUE(res.find(EventKind::convexity_reached));
  EXPECT_EQ(res.find(EventKind::convexity_reached)->t, 0.0);
}

TEST(Evolve, RecordsLandOnGrid) {
  StepperConfig cfg;
  cfg.t_end = 0.3;
  cfg.record_interval = 0.07;
  std::vector<double> times;
  evolve<PolarCurve>({ellipse(32)}, FlowLaw::gapf, cfg, Scheme::spectral, [&](const PolarState& s) { times.push_back(s.t); });
  const std::vector<double> expect = {0.0, 0.07, 2 * 0.07, 3 * 0.07, 4 * 0.07, 0.3};
  EXPECT_EQ(times, expect);
}

class GapfEllipseRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    StepperConfig cfg;
    cfg.t_end = 40.0;
    cfg.record_interval = 0.05;
    history_ = new std::vector<DiagRecord>;
    result_ = new EvolveResult<PolarCurve>(evolve<PolarCurve>(
        {ellipse(256)}, FlowLaw::gapf, cfg, Scheme::spectral, [](const PolarState& s) { history_->push_back(record(s, Scheme::spectral)); }));
  }
  static void TearDownTestSuite() {
    delete history_;
    delete result_;
  }
  static std::vector<DiagRecord>* history_;
  static EvolveResult<PolarCurve>* result_;
};
std::vector<DiagRecord>* GapfEllipseRun::history_ = nullptr;
EvolveResult<PolarCurve>* GapfEllipseRun::result_ = nullptr;

TEST_F(GapfEllipseRun, ConvergesToLimitCurvature) {
  ASSERT_EQ(result_->terminal().kind, EventKind::converged);
  const auto kappa = metric_and_curvature(result_->final_state.curve, Scheme::spectral).kappa;
  for (double k : kappa) EXPECT_NEAR(k, std::sqrt(0.5), 1e-3 * std::sqrt(0.5));
}

TEST_F(GapfEllipseRun, EventsAreWellFormed) {
  int terminals = 0, convex = 0;
  for (const auto& e : result_->events) {
    terminals += e.terminal();
    convex += e.kind == EventKind::convexity_reached;
  }
  EXPECT_EQ(terminals, 1);
  EXPECT_EQ(convex, 1);
  EXPECT_TRUE(result_->events.back().terminal());
}

TEST_F(GapfEllipseRun, AreaAndLengthInvariants) {
  const double A0 = history_->front().A, L0 = history_->front().L;
  for (std::size_t i = 0; i < history_->size(); ++i) {
    const auto& d = (*history_)[i];
    EXPECT_LT(std::abs(d.A - A0) / A0, 1e-6);
    EXPECT_GE(d.L, std::sqrt(4 * pi * A0) - 1e-6);
    if (i > 0) {
      EXPECT_LE(d.L, (*history_)[i - 1].L + 1e-10 * L0);
    }
  }
}

TEST(Evolve, DeterministicTrajectories) {
  StepperConfig cfg;
  cfg.t_end = 0.2;
  const auto c = std::get<PolarCurve>(build_initial({CurveKind::offset_star, {1, 0.2, 2, 0.1}}, 64));
  std::vector<PolarCurve> a, b;
  evolve<PolarCurve>({c}, FlowLaw::gapf, cfg, Scheme::spectral, [&](const PolarState& s) { a.push_back(s.curve); });
  evolve<PolarCurve>({c}, FlowLaw::gapf, cfg, Scheme::spectral, [&](const PolarState& s) { b.push_back(s.curve); });
  EXPECT_EQ(a, b);
}

TEST(Evolve, SpatialConvergenceFd4) {
  StepperConfig cfg;
  cfg.t_end = 0.25;
  cfg.stop_on_converged = false;
  auto final_at = [&](std::size_t n) {
    return evolve<PolarCurve>({ellipse(n)}, FlowLaw::gapf, cfg, Scheme::fd4).final_state.curve;
  };
  const auto c64 = final_at(64), c128 = final_at(128), ref = final_at(512);
  auto err = [&](const PolarCurve& c) {
    double e = 0.0;
    const std::size_t stride = ref.size() / c.size();
    for (std::size_t j = 0; j < c.size(); ++j) e = std::max(e, std::abs(c[j] - ref[j * stride]));
    return e;
  };
  EXPECT_GT(err(c64) / err(c128), 12.0);
}

TEST(Evolve, MarkerCsfCircleShrinks) {
  StepperConfig cfg;
  cfg.t_end = 0.25;
  const auto res = evolve<MarkerCurve>({to_marker(PolarCurve(std::vector<double>(128, 1.0)))}, FlowLaw::csf, cfg, Scheme::spectral);
  EXPECT_EQ(res.terminal().kind, EventKind::time_limit);
  for (Vec2 p : res.final_state.curve.points()) EXPECT_NEAR(norm(p), std::sqrt(1 - 2 * 0.25), 1e-3);
}

TEST(StepperConfig, Validation) {
  StepperConfig cfg;
  cfg.cfl = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.cfl = 0.4;
  cfg.t_end = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.t_end = 1;
  cfg.tol_convex = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
