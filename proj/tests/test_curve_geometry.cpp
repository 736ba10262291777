#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <gapf/builtin_curves.hpp>
#include <gapf/curve_geometry.hpp>

#include "test_helpers.hpp"

using namespace gapf;
using gapf::testing::sample;

namespace {

constexpr double pi = std::numbers::pi;

PolarCurve polar(std::size_t n, const std::function<double(double)>& f) { return PolarCurve(sample(n, f)); }

double ellipse_r(double a, double b, double t) {
  return a * b / std::sqrt(b * b * std::cos(t) * std::cos(t) + a * a * std::sin(t) * std::sin(t));
}

// Adaptive Simpson quadrature, used as an independent perimeter oracle.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40) {
  auto simpson = [&](double lo, double hi) { return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi)); };
  std::function<double(double, double, double, double, int)> rec = [&](double lo, double hi, double whole, double eps, int d) {
    const double mid = 0.5 * (lo + hi);
    const double left = simpson(lo, mid), right = simpson(mid, hi);
    if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, left, eps / 2, d - 1) + rec(mid, hi, right, eps / 2, d - 1);
  };
  return rec(a, b, simpson(a, b), tol, depth);
}

}  // namespace

TEST(PolarCurve, EnforcesInvariants) {
  EXPECT_THROW(PolarCurve(std::vector<double>(15, 1.0)), std::invalid_argument);
  EXPECT_THROW(PolarCurve(std::vector<double>(8, 1.0)), std::invalid_argument);
  std::vector<double> r(16, 1.0);
  r[3] = 0.0;
  EXPECT_THROW(PolarCurve{r}, std::invalid_argument);
  r[3] = std::nan("");
  EXPECT_THROW(PolarCurve{r}, std::invalid_argument);
  EXPECT_NO_THROW(PolarCurve(std::vector<double>(16, 1.0)));
}

TEST(MetricAndCurvature, Circle) {
  const auto f = metric_and_curvature(PolarCurve(std::vector<double>(64, 2.0)), Scheme::spectral);
  for (std::size_t j = 0; j < 64; ++j) {
    EXPECT_NEAR(f.g[j], 2.0, 1e-14);
    EXPECT_NEAR(f.kappa[j], 0.5, 1e-14);
  }
}

TEST(MetricAndCurvature, CircleRadiiAllSchemes) {
  for (double R : {0.5, 1.0, 2.0, 5.0})
    for (Scheme s : {Scheme::spectral, Scheme::fd2, Scheme::fd4}) {
      const auto f = metric_and_curvature(PolarCurve(std::vector<double>(64, R)), s);
      for (double k : f.kappa) EXPECT_NEAR(k, 1.0 / R, 1e-10) << to_string(s) << " R=" << R;
    }
}

TEST(MetricAndCurvature, CosineStarAtZero) {
  const auto f = metric_and_curvature(polar(64, [](double t) { return 1 + 0.1 * std::cos(2 * t); }), Scheme::spectral);
  // r = 1.1, r_theta = 0, r_thetatheta = -0.4
  EXPECT_NEAR(f.kappa[0], (0.44 + 1.21) / 1.331, 1e-12);
  EXPECT_NEAR(f.kappa[0], 1.23967, 1e-5);
}

TEST(MetricAndCurvature, EllipseVertex) {
  const auto f = metric_and_curvature(polar(256, [](double t) { return ellipse_r(2, 1, t); }), Scheme::spectral);
  EXPECT_NEAR(f.kappa[0], 2.0, 1e-10);             // a / b^2 at the major-axis vertex
  EXPECT_NEAR(f.kappa[64], 1.0 / 4.0, 1e-10);      // b / a^2 at the minor-axis vertex
}

TEST(MetricAndCurvature, SpectralVsFd4ConvergesAtFourthOrder) {
  auto r = [](double t) { return 1 + 0.2 * std::cos(2 * t) + 0.05 * std::sin(3 * t); };
  std::vector<double> diffs;
  for (std::size_t n : {64u, 128u, 256u}) {
    const auto a = metric_and_curvature(polar(n, r), Scheme::spectral).kappa;
    const auto b = metric_and_curvature(polar(n, r), Scheme::fd4).kappa;
    diffs.push_back(gapf::testing::max_abs_diff(a, b));
  }
  EXPECT_NEAR(std::log2(diffs[0] / diffs[1]), 4.0, 0.3);
  EXPECT_NEAR(std::log2(diffs[1] / diffs[2]), 4.0, 0.3);
}

TEST(Support, Examples) {
  for (double p : support(PolarCurve(std::vector<double>(32, 1.7)), Scheme::spectral)) EXPECT_NEAR(p, 1.7, 1e-14);
  const auto p = support(polar(64, [](double t) { return 1 + 0.1 * std::cos(2 * t); }), Scheme::spectral);
  EXPECT_NEAR(p[0], 1.21 / 1.1, 1e-12);
}

TEST(LengthArea, Circle) {
  const auto la = length_area(PolarCurve(std::vector<double>(64, 1.0)));
  EXPECT_NEAR(la.length, 2 * pi, 1e-13);
  EXPECT_NEAR(la.area, pi, 1e-13);
}

TEST(LengthArea, EllipseAgainstIndependentPerimeter) {
  const auto la = length_area(polar(256, [](double t) { return ellipse_r(2, 1, t); }));
  const double oracle = adaptive_simpson([](double t) { return std::hypot(2 * std::sin(t), std::cos(t)); }, 0, 2 * pi, 1e-13);
  EXPECT_NEAR(oracle, 9.6884482, 1e-7);
  EXPECT_NEAR(la.length, oracle, 1e-10);
  EXPECT_NEAR(la.area, 2 * pi, 1e-12);
}

TEST(LengthArea, CosineStarArea) {
  const auto la = length_area(polar(256, [](double t) { return 1 + 0.3 * std::cos(4 * t); }));
  EXPECT_NEAR(la.area, 1.045 * pi, 1e-12);
}

TEST(SymmetryDefect, Examples) {
  EXPECT_LT(symmetry_defect(polar(64, [](double t) { return 1 + 0.1 * std::cos(2 * t); })), 1e-15);
  EXPECT_NEAR(symmetry_defect(polar(64, [](double t) { return 1 + 0.1 * std::cos(3 * t); })), 0.2, 1e-14);
  EXPECT_EQ(symmetry_defect(PolarCurve(std::vector<double>(64, 3.0))), 0.0);
}

TEST(ToMarker, UnitCirclePoints) {
  // smallest grid allowed is 16; nodes 0, 4, 8, 12 are the quarter points
  const auto m = to_marker(PolarCurve(std::vector<double>(16, 1.0)));
  ASSERT_EQ(m.size(), 16u);
  const Vec2 expect[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int q = 0; q < 4; ++q) {
    EXPECT_NEAR(m[4 * q].x, expect[q].x, 1e-15);
    EXPECT_NEAR(m[4 * q].y, expect[q].y, 1e-15);
  }
  EXPECT_GT(MarkerCurve::shoelace(m.points()), 0.0);
}

TEST(ToMarker, ShoelaceAreaConverges) {
  const std::size_t n = 256;
  const auto m = to_marker(PolarCurve(std::vector<double>(n, 1.0)));
  const double err = pi - MarkerCurve::shoelace(m.points());
  // inscribed polygon: pi - (n/2) sin(2 pi / n) ~ 2 pi^3 / (3 n^2)
  EXPECT_GT(err, 0.0);
  EXPECT_LT(err, 2 * pi * pi * pi / (3.0 * n * n) * 1.01);
}

TEST(ToMarker, KeepsCentrosymmetry) {
  const auto m = to_marker(polar(64, [](double t) { return 1 + 0.2 * std::cos(2 * t); }));
  for (std::size_t j = 0; j < 32; ++j) {
    EXPECT_NEAR(m[j + 32].x, -m[j].x, 1e-15);
    EXPECT_NEAR(m[j + 32].y, -m[j].y, 1e-15);
  }
}

TEST(MarkerCurve, NormalizesOrientationAndRejectsDegenerateInput) {
  std::vector<Vec2> cw;
  for (int j = 0; j < 12; ++j) cw.push_back({std::cos(-2 * pi * j / 12), std::sin(-2 * pi * j / 12)});
  const MarkerCurve c(cw);
  EXPECT_GT(MarkerCurve::shoelace(c.points()), 0.0);
  EXPECT_THROW(MarkerCurve(std::vector<Vec2>(cw.begin(), cw.begin() + 7)), std::invalid_argument);
  auto dup = cw;
  dup[4] = dup[3];
  EXPECT_THROW(MarkerCurve{dup}, std::invalid_argument);

  auto nearly = cw;
  nearly[4] = nearly[3] + Vec2{1e-14, 0.0};
  EXPECT_THROW(marker_geometry(MarkerCurve(nearly)), std::invalid_argument);
}

TEST(MarkerGeometry, RegularPolygon) {
  const std::size_t m = 256;
  std::vector<Vec2> pts;
  for (std::size_t j = 0; j < m; ++j) pts.push_back({std::cos(2 * pi * j / m), std::sin(2 * pi * j / m)});
  const auto g = marker_geometry(MarkerCurve(pts));
  for (std::size_t j = 0; j < m; ++j) {
    EXPECT_NEAR(g.kappa[j], 1.0, 1e-3);
    EXPECT_NEAR(g.star_det[j], 1.0, 1e-3);
    // inward normal points at the center
    EXPECT_NEAR(dot(g.normal[j], -1.0 * pts[j]), 1.0, 1e-12);
  }
  EXPECT_GT(g.min_star_det, 0.0);
}

TEST(MarkerGeometry, EllipseSignedArea) {
  std::vector<Vec2> pts;
  for (std::size_t j = 0; j < 512; ++j) pts.push_back({2 * std::cos(2 * pi * j / 512), std::sin(2 * pi * j / 512)});
  const auto g = marker_geometry(MarkerCurve(pts));
  EXPECT_NEAR(g.signed_area, 2 * pi, 1e-3);
  EXPECT_GT(g.min_star_det, 0.0);
  // curvature sign convention matches the polar backend: positive on convex curves
  for (double k : g.kappa) EXPECT_GT(k, 0.0);
}

TEST(GeometryProperties, RandomStarCurves) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = gapf::testing::random_trig_poly(rng, 1, 12, 0.4);
    const PolarCurve c = polar(128, [&](double t) { return 1.0 + p(t); });
    const auto f = polar_geometry(c, Scheme::spectral);
    const auto la = length_area(c);
    for (std::size_t j = 0; j < c.size(); ++j) {
      EXPECT_GE(f.g[j], c[j]);
      EXPECT_LE(f.p[j], c[j] * (1 + 1e-15));
      EXPECT_LE(c[j], la.length / 2 + 1e-12);
    }
    EXPECT_GE(la.length * la.length - 4 * pi * la.area, -1e-10);
  }
}

TEST(GeometryProperties, MarkerLengthAreaConvergeToPolar) {
  auto r = [](double t) { return 1 + 0.25 * std::cos(2 * t) + 0.05 * std::cos(5 * t); };
  std::vector<double> eL, eA;
  for (std::size_t n : {64u, 128u, 256u}) {
    const PolarCurve c = polar(n, r);
    const auto la = length_area(c);
    const auto g = marker_geometry(to_marker(c));
    eL.push_back(std::abs(g.length - la.length));
    eA.push_back(std::abs(g.signed_area - la.area));
  }
  for (std::size_t i = 0; i + 1 < eL.size(); ++i) {
    EXPECT_NEAR(eL[i] / eL[i + 1], 4.0, 0.2);
    EXPECT_NEAR(eA[i] / eA[i + 1], 4.0, 0.2);
  }
}

TEST(GeometryProperties, QueriesAreSideEffectFree) {
  const PolarCurve c = polar(64, [](double t) { return 1 + 0.2 * std::cos(2 * t); });
  const PolarCurve copy = c;
  (void)polar_geometry(c, Scheme::spectral);
  (void)length_area(c, Scheme::fd4);
  (void)to_marker(c);
  (void)support(c, Scheme::fd2);
  EXPECT_EQ(c, copy);
}
