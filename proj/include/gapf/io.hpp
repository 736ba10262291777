#pragma once
// Plain-text curve samples, CSV time series and SVG frames.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "curve_geometry.hpp"
#include "diagnostics.hpp"

namespace gapf {

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return {buf.data(), end};
}

inline double parse_double(const std::string& tok) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || end != tok.data() + tok.size()) throw std::invalid_argument("not a number: '" + tok + "'");
  return v;
}

// Sample format: first line n, then n lines of r_j (polar) or "x y" (marker).

inline void write_samples(std::ostream& os, const PolarCurve& c) {
  os << c.size() << '\n';
  for (double r : c.radii()) os << format_double(r) << '\n';
}

inline void write_samples(std::ostream& os, const MarkerCurve& c) {
  os << c.size() << '\n';
  for (Vec2 p : c.points()) os << format_double(p.x) << ' ' << format_double(p.y) << '\n';
}

namespace detail {

inline std::size_t read_count(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw std::invalid_argument("sample file: missing point count");
  std::size_t n = 0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
  if (ec != std::errc{} || end != tok.data() + tok.size() || n == 0)
    throw std::invalid_argument("sample file: bad point count '" + tok + "'");
  return n;
}

inline double read_value(std::istream& is, std::size_t line) {
  std::string tok;
  if (!(is >> tok)) throw std::invalid_argument("sample file: truncated at sample " + std::to_string(line));
  return parse_double(tok);
}

}  // namespace detail

inline PolarCurve read_polar_samples(std::istream& is) {
  const std::size_t n = detail::read_count(is);
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = detail::read_value(is, j);
  return PolarCurve(std::move(r));
}

inline MarkerCurve read_marker_samples(std::istream& is) {
  const std::size_t m = detail::read_count(is);
  std::vector<Vec2> pts(m);
  for (std::size_t j = 0; j < m; ++j) pts[j] = {detail::read_value(is, j), detail::read_value(is, j)};
  return MarkerCurve(std::move(pts));
}

inline constexpr std::array<const char*, 13> csv_columns = {"t",        "L",       "A",     "kappa_min", "kappa_max",
                                                            "p_min",    "r_min",   "r_max", "grad_max",  "deficit",
                                                            "q2",       "qs2",     "sym"};

/// Omitted (NaN) fields are written as empty cells.
inline void write_csv(std::ostream& os, const std::vector<DiagRecord>& history) {
  for (std::size_t i = 0; i < csv_columns.size(); ++i) os << (i ? "," : "") << csv_columns[i];
  os << '\n';
  auto cell = [](double v) { return std::isnan(v) ? std::string{} : format_double(v); };
  for (const auto& d : history) {
    const std::array<double, 13> v = {d.t,     d.L,     d.A,        d.kappa_min, d.kappa_max, d.p_min, d.r_min,
                                      d.r_max, d.grad_max, d.deficit, d.q2,        d.qs2,       d.sym};
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << cell(v[i]);
    os << '\n';
  }
}

struct ViewBox {
  double x = 0, y = 0, w = 1, h = 1;
};

/// Bounding box of the curve, scaled by 1.5 about its center.
inline ViewBox frame_view_box(std::span<const Vec2> pts) {
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (Vec2 p : pts) xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x), ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  const double w = 1.5 * (xmax - xmin), h = 1.5 * (ymax - ymin);
  return {cx - 0.5 * w, cy - 0.5 * h, w, h};
}

inline void write_svg_frame(std::ostream& os, std::span<const Vec2> pts, const ViewBox& vb, double t) {
  // y is flipped so the picture has the usual orientation
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(vb.x) << ' '
     << format_double(-(vb.y + vb.h)) << ' ' << format_double(vb.w) << ' ' << format_double(vb.h) << "\">\n";
  os << "<title>t = " << format_double(t) << "</title>\n";
  os << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"" << format_double(vb.w / 400.0) << "\" points=\"";
  for (std::size_t j = 0; j < pts.size(); ++j) os << (j ? " " : "") << format_double(pts[j].x) << ',' << format_double(-pts[j].y);
  os << "\"/>\n<circle cx=\"0\" cy=\"0\" r=\"" << format_double(vb.w / 200.0) << "\" fill=\"red\"/>\n</svg>\n";
}

}  // namespace gapf
