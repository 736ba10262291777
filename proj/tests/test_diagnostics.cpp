#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <gapf/builtin_curves.hpp>
#include <gapf/diagnostics.hpp>

#include "test_helpers.hpp"

using namespace gapf;

namespace {

constexpr double pi = std::numbers::pi;

PolarCurve polar(CurveKind k, std::vector<double> params, std::size_t n) {
  return std::get<PolarCurve>(build_initial({k, std::move(params)}, n));
}

std::vector<DiagRecord> run_history(const PolarCurve& c, FlowLaw law, double t_end, double interval) {
  StepperConfig cfg;
  cfg.t_end = t_end;
  cfg.record_interval = interval;
  std::vector<DiagRecord> h;
  evolve<PolarCurve>({c}, law, cfg, Scheme::spectral, [&](const PolarState& s) { h.push_back(record(s, Scheme::spectral)); });
  return h;
}

}  // namespace

TEST(Record, CircleHasZeroDeviation) {
  const auto d = record(PolarState{PolarCurve(std::vector<double>(64, 2.0)), 0.5, 0}, Scheme::spectral);
  EXPECT_EQ(d.t, 0.5);
  EXPECT_NEAR(d.L, 4 * pi, 1e-12);
  EXPECT_NEAR(d.A, 4 * pi, 1e-12);
  EXPECT_NEAR(d.deficit, 0.0, 1e-10);
  EXPECT_NEAR(d.q2, 0.0, 1e-20);
  EXPECT_NEAR(d.qs2, 0.0, 1e-20);
  EXPECT_NEAR(d.kappa_min, 0.5, 1e-13);
  EXPECT_NEAR(d.kappa_max, 0.5, 1e-13);
  EXPECT_NEAR(d.p_min, 2.0, 1e-13);
  EXPECT_EQ(d.r_min, 2.0);
  EXPECT_EQ(d.r_max, 2.0);
  EXPECT_LT(d.grad_max, 1e-12);
  EXPECT_EQ(d.sym, 0.0);
}

TEST(Record, EllipseDeficitMatchesPerimeterOracle) {
  // perimeter of the (2, 1) ellipse from the complete elliptic integral
  const double L = 4 * 2 * std::comp_ellint_2(std::sqrt(1 - 0.25));
  const auto d = record(PolarState{polar(CurveKind::ellipse, {2, 1}, 256)}, Scheme::spectral);
  EXPECT_NEAR(d.L, L, 1e-10);
  EXPECT_NEAR(d.A, 2 * pi, 1e-10);
  EXPECT_NEAR(d.deficit, L * L - 8 * pi * pi, 1e-8);
  EXPECT_NEAR(d.deficit, 14.909, 1e-3);
  EXPECT_NEAR(d.kappa_min, 0.25, 1e-9);
  EXPECT_NEAR(d.kappa_max, 2.0, 1e-9);
  EXPECT_NEAR(d.r_min, 1.0, 1e-12);
  EXPECT_NEAR(d.r_max, 2.0, 1e-12);
}

TEST(Record, CurvatureDeviationConvergesUnderRefinement) {
  const auto coarse = record(PolarState{polar(CurveKind::cos_star, {1, 0.2, 3}, 128)}, Scheme::spectral);
  const auto fine = record(PolarState{polar(CurveKind::cos_star, {1, 0.2, 3}, 1280)}, Scheme::spectral);
  EXPECT_GT(coarse.q2, 0.01);
  EXPECT_NEAR(coarse.q2, fine.q2, 1e-8);
  EXPECT_NEAR(coarse.qs2, fine.qs2, 1e-8 * fine.qs2);
}

TEST(Record, MarkerFieldsOnCircle) {
  const auto d = record(MarkerState{to_marker(PolarCurve(std::vector<double>(128, 1.0)))});
  EXPECT_NEAR(d.L, 2 * pi, 1e-3);
  EXPECT_NEAR(d.A, pi, 1e-2);
  EXPECT_GT(d.p_min, 0.0);
  EXPECT_NEAR(d.r_min, 1.0, 1e-12);
  EXPECT_TRUE(std::isnan(d.sym));
}

TEST(Bounds, CircleAndEllipseSatisfyAllBounds) {
  for (auto c : {PolarCurve(std::vector<double>(64, 1.0)), polar(CurveKind::ellipse, {2, 1}, 128)}) {
    const auto h = run_history(c, FlowLaw::gapf, 2.0, 0.05);
    const auto rep = check_bounds(h, h.front());
    EXPECT_TRUE(rep.ok());
    EXPECT_EQ(rep.checks.size(), 7u);
    EXPECT_GE(rep.C1, 3 * h.front().L / pi);
  }
}

TEST(Bounds, CorruptedAreaIsFlaggedAtItsTime) {
  auto h = run_history(polar(CurveKind::ellipse, {2, 1}, 128), FlowLaw::gapf, 1.0, 0.05);
  h[7].A *= 1.01;
  const auto rep = check_bounds(h, h.front());
  EXPECT_EQ(rep.violations(), 1u);
  ASSERT_TRUE(rep.at("area").first_violation);
  EXPECT_EQ(*rep.at("area").first_violation, h[7].t);
  EXPECT_THROW(rep.at("nonexistent"), std::out_of_range);
}

TEST(Bounds, LengthGrowthIsFlagged) {
  auto h = run_history(polar(CurveKind::ellipse, {2, 1}, 128), FlowLaw::gapf, 1.0, 0.05);
  h[4].L = h[3].L * (1 + 1e-6);
  const auto rep = check_bounds(h, h.front());
  EXPECT_FALSE(rep.at("length_monotone").ok());
  EXPECT_EQ(*rep.at("length_monotone").first_violation, h[4].t);
}

TEST(Bounds, CsfViolatesAreaConstancy) {
  const auto h = run_history(polar(CurveKind::ellipse, {2, 1}, 64), FlowLaw::csf, 0.5, 0.05);
  EXPECT_FALSE(check_bounds(h, h.front()).at("area").ok());
}

TEST(Deficit, NonincreasingAlongFlow) {
  const auto h = run_history(polar(CurveKind::cos_star, {1, 0.25, 2}, 128), FlowLaw::gapf, 3.0, 0.05);
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i].deficit, h[i - 1].deficit + 1e-9);
}

TEST(DecayFit, RecoversSyntheticRate) {
  std::vector<DiagRecord> h;
  for (int i = 0; i <= 40; ++i) {
    DiagRecord d;
    d.t = 0.1 * i;
    d.q2 = 2.5 * std::exp(-3.0 * d.t);
    d.qs2 = 1.0;
    h.push_back(d);
  }
  const auto fit = decay_fit(h, DecayField::q2, 0.0, 4.0);
  EXPECT_NEAR(fit.rate, -3.0, 1e-6);
  EXPECT_LT(fit.residual, 1e-10);
  EXPECT_EQ(fit.samples, 41u);
  EXPECT_NEAR(decay_fit(h, DecayField::qs2, 1.0, 2.0).rate, 0.0, 1e-12);
  EXPECT_THROW(decay_fit(h, DecayField::q2, 5.0, 6.0), std::domain_error);
}

TEST(DecayFit, RefusesNoiseFloor) {
  const auto h = run_history(PolarCurve(std::vector<double>(64, 1.0)), FlowLaw::gapf, 1.0, 0.1);
  EXPECT_THROW(decay_fit(h, DecayField::q2, 0.0, 1.0), std::domain_error);
}

TEST(Compare, CircleMarginIsExact) {
  StepperConfig cfg;
  cfg.t_end = 1.0;
  cfg.record_interval = 0.0625;
  const auto res = compare_gapf_csf(PolarCurve(std::vector<double>(128, 1.0)), cfg, Scheme::spectral);
  ASSERT_FALSE(res.t_grid.empty());
  const double t_last = res.t_grid.back();
  EXPECT_GE(t_last, 0.375);
  EXPECT_LT(t_last, 0.5);
  EXPECT_NEAR(res.min_margin, 0.0, 1e-12);  // at t = 0
  EXPECT_NEAR(res.margins.back(), 1 - std::sqrt(1 - 2 * t_last), 1e-6);
  for (double m : res.margins) EXPECT_GE(m, -1e-12);
  EXPECT_GT(res.gapf_p_min, 0.99);
}

TEST(Compare, RejectsAsymmetricInitialCurve) {
  StepperConfig cfg;
  EXPECT_THROW(compare_gapf_csf(polar(CurveKind::cos_star, {1, 0.2, 3}, 64), cfg, Scheme::spectral), std::invalid_argument);
}
