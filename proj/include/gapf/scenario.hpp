#pragma once
// Scenario configuration (INI-style) and single-run orchestration.
//
//   [scenario]  name
//   [curve]     backend = polar|marker, type, params = "a, b, ...", n, file
//   [solver]    law, scheme, stepper, cfl, dt_max, t_end, tol_convex,
//               tol_circle, r_floor, kappa_ceiling, record_interval, record_count
//   [analysis]  decay_fit = q2|qs2, decay_window = "t0, t1", compare = bool,
//               area_tol, length_tol
//   [outputs]   csv, frames, report (paths; relative to the output directory)

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "builtin_curves.hpp"
#include "curve_geometry.hpp"
#include "diagnostics.hpp"
#include "flow_laws.hpp"
#include "io.hpp"
#include "spatial_ops.hpp"
#include "time_integration.hpp"

namespace gapf {

/// Invalid scenario content (exit status 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Output location that cannot be written (exit status 1).
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Backend { polar, marker };

struct OutputSpec {
  std::optional<std::string> csv;
  std::optional<std::string> frames;  // directory
  std::optional<std::string> report;
};

struct ScenarioConfig {
  std::string name = "scenario";
  FlowLaw law = FlowLaw::gapf;
  Backend backend = Backend::polar;
  std::variant<BuiltinCurve, std::string> initial = BuiltinCurve{};
  std::size_t grid_size = 256;
  Scheme scheme = Scheme::spectral;
  StepperConfig stepper;
  std::optional<DecayField> decay_field;
  std::optional<std::pair<double, double>> decay_window;
  bool compare = false;
  BoundTolerances tolerances;
  OutputSpec outputs;
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& scenario_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"name"}},
      {"curve", {"backend", "type", "params", "n", "file"}},
      {"solver",
       {"law", "scheme", "stepper", "cfl", "dt_max", "t_end", "tol_convex", "tol_circle", "r_floor", "kappa_ceiling",
        "record_interval", "record_count", "max_steps"}},
      {"analysis", {"decay_fit", "decay_window", "compare", "area_tol", "length_tol"}},
      {"outputs", {"csv", "frames", "report"}},
  };
  return keys;
}

inline double to_number(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + s + "'");
  }
}

inline std::size_t to_count(const std::string& key, const std::string& s) {
  const double v = to_number(key, s);
  if (v < 0 || v != std::floor(v)) throw ConfigError("config key '" + key + "': expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(to_number(key, item.substr(b, e - b + 1)));
  }
  return out;
}

inline bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + s + "'");
}

}  // namespace detail

using ScenarioTree = boost::property_tree::ptree;

inline ScenarioTree read_scenario_tree(std::istream& is) {
  ScenarioTree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("scenario file: ") + e.what());
  }
  return tree;
}

inline ScenarioTree read_scenario_tree(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open scenario file '" + path + "'");
  return read_scenario_tree(is);
}

/// Overrides "section.key" in the tree (used by parameter sweeps).
inline void set_override(ScenarioTree& tree, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw ConfigError("override key '" + dotted_key + "' must be section.key");
  const auto& keys = detail::scenario_keys();
  const auto sec = keys.find(dotted_key.substr(0, dot));
  if (sec == keys.end() || !sec->second.count(dotted_key.substr(dot + 1)))
    throw ConfigError("unknown config key '" + dotted_key + "'");
  tree.put(dotted_key, value);
}

/// Converts a parsed tree into a validated ScenarioConfig. Unknown sections or
/// keys are rejected.
inline ScenarioConfig scenario_from_tree(const ScenarioTree& tree) {
  const auto& keys = detail::scenario_keys();
  for (const auto& [section, body] : tree) {
    const auto sec = keys.find(section);
    if (sec == keys.end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body)
      if (!sec->second.count(key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
  }
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(k)) return *v;
    return std::nullopt;
  };

  ScenarioConfig cfg;
  try {
    if (auto v = get("scenario.name")) cfg.name = *v;
    if (auto v = get("curve.backend")) {
      if (*v == "polar") cfg.backend = Backend::polar;
      else if (*v == "marker") cfg.backend = Backend::marker;
      else throw ConfigError("curve.backend must be polar or marker");
    }
    const auto type = get("curve.type");
    const auto file = get("curve.file");
    if (type && file) throw ConfigError("curve.type and curve.file are mutually exclusive");
    if (file) {
      cfg.initial = *file;
    } else {
      if (!type) throw ConfigError("curve.type or curve.file is required");
      BuiltinCurve id{parse_curve_kind(*type), {}};
      if (auto p = get("curve.params")) id.params = detail::to_list("curve.params", *p);
      if (id.is_marker() && !get("curve.backend")) cfg.backend = Backend::marker;
      if (id.is_marker() != (cfg.backend == Backend::marker))
        throw ConfigError("curve.type " + *type + " does not match curve.backend");
      cfg.initial = id;
    }
    if (auto v = get("curve.n")) cfg.grid_size = detail::to_count("curve.n", *v);

    auto& st = cfg.stepper;
    if (auto v = get("solver.law")) cfg.law = parse_flow_law(*v);
    if (auto v = get("solver.scheme")) cfg.scheme = parse_scheme(*v);
    if (auto v = get("solver.stepper")) st.stepper = parse_stepper(*v);
    if (auto v = get("solver.cfl")) st.cfl = detail::to_number("solver.cfl", *v);
    if (auto v = get("solver.dt_max")) st.dt_max = detail::to_number("solver.dt_max", *v);
    if (auto v = get("solver.t_end")) st.t_end = detail::to_number("solver.t_end", *v);
    if (auto v = get("solver.tol_convex")) st.tol_convex = detail::to_number("solver.tol_convex", *v);
    if (auto v = get("solver.tol_circle")) st.tol_circle = detail::to_number("solver.tol_circle", *v);
    if (auto v = get("solver.r_floor")) st.r_floor = detail::to_number("solver.r_floor", *v);
    if (auto v = get("solver.kappa_ceiling")) st.kappa_ceiling = detail::to_number("solver.kappa_ceiling", *v);
    if (auto v = get("solver.record_interval")) st.record_interval = detail::to_number("solver.record_interval", *v);
    if (auto v = get("solver.record_count")) st.record_count = detail::to_count("solver.record_count", *v);
    if (auto v = get("solver.max_steps")) st.max_steps = detail::to_count("solver.max_steps", *v);
    st.validate();

    if (auto v = get("analysis.decay_fit")) {
      if (*v == "q2") cfg.decay_field = DecayField::q2;
      else if (*v == "qs2") cfg.decay_field = DecayField::qs2;
      else if (*v != "none") throw ConfigError("analysis.decay_fit must be q2, qs2 or none");
    }
    if (auto v = get("analysis.decay_window")) {
      const auto w = detail::to_list("analysis.decay_window", *v);
      if (w.size() != 2 || !(w[0] < w[1])) throw ConfigError("analysis.decay_window must be 't0, t1' with t0 < t1");
      cfg.decay_window = std::pair{w[0], w[1]};
    }
    if (auto v = get("analysis.compare")) cfg.compare = detail::to_bool("analysis.compare", *v);
    if (auto v = get("analysis.area_tol")) cfg.tolerances.area_rel = detail::to_number("analysis.area_tol", *v);
    if (auto v = get("analysis.length_tol")) cfg.tolerances.length_rel = detail::to_number("analysis.length_tol", *v);

    if (auto v = get("outputs.csv")) cfg.outputs.csv = *v;
    if (auto v = get("outputs.frames")) cfg.outputs.frames = *v;
    if (auto v = get("outputs.report")) cfg.outputs.report = *v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.compare && cfg.backend != Backend::polar) throw ConfigError("analysis.compare needs the polar backend");
  return cfg;
}

inline ScenarioConfig parse_scenario(std::istream& is) { return scenario_from_tree(read_scenario_tree(is)); }
inline ScenarioConfig load_scenario(const std::string& path) { return scenario_from_tree(read_scenario_tree(path)); }

/// Builds the initial curve; the size from the sample file wins over curve.n.
inline AnyCurve make_initial(const ScenarioConfig& cfg) {
  try {
    if (const auto* path = std::get_if<std::string>(&cfg.initial)) {
      std::ifstream is(*path);
      if (!is) throw ConfigError("cannot open sample file '" + *path + "'");
      if (cfg.backend == Backend::marker) return read_marker_samples(is);
      return read_polar_samples(is);
    }
    return build_initial(std::get<BuiltinCurve>(cfg.initial), cfg.grid_size);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("initial curve: ") + e.what());
  }
}

namespace detail {

inline nlohmann::json to_json(const Event& e) {
  return {{"kind", std::string(to_string(e.kind))}, {"t", e.t}, {"detail", e.detail}};
}

inline nlohmann::json to_json(const DiagRecord& d) {
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  return {{"t", d.t},         {"L", d.L},         {"A", d.A},
          {"kappa_min", d.kappa_min}, {"kappa_max", d.kappa_max}, {"p_min", d.p_min},
          {"r_min", d.r_min}, {"r_max", d.r_max}, {"grad_max", d.grad_max},
          {"deficit", d.deficit}, {"q2", d.q2}, {"qs2", d.qs2}, {"sym", num(d.sym)}};
}

inline nlohmann::json to_json(const BoundReport& rep) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& b : rep.checks)
    checks.push_back({{"name", b.name},
                      {"worst_margin", b.worst_margin},
                      {"tolerance", b.tolerance},
                      {"first_violation_t", b.first_violation ? nlohmann::json(*b.first_violation) : nlohmann::json(nullptr)}});
  return {{"C1", rep.C1}, {"violations", rep.violations()}, {"checks", checks}};
}

struct OutputPaths {
  std::optional<std::filesystem::path> csv, frames, report;
};

inline OutputPaths resolve_outputs(const OutputSpec& spec, const std::filesystem::path& out_dir) {
  auto place = [&](const std::optional<std::string>& p) -> std::optional<std::filesystem::path> {
    if (!p) return std::nullopt;
    std::filesystem::path path(*p);
    return path.is_absolute() || out_dir.empty() ? path : out_dir / path;
  };
  return {place(spec.csv), place(spec.frames), place(spec.report)};
}

/// Verifies every output location before the run so that a bad path fails
/// fast without leaving partial files behind.
inline void probe_outputs(const OutputPaths& paths) {
  namespace fs = std::filesystem;
  auto probe_file = [](const fs::path& p) {
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    if (ec) throw OutputError("cannot create directory for '" + p.string() + "': " + ec.message());
    const bool existed = fs::exists(p, ec);
    {
      std::ofstream os(p, std::ios::app);
      if (!os) throw OutputError("cannot write '" + p.string() + "'");
    }
    if (!existed) fs::remove(p, ec);
  };
  if (paths.csv) probe_file(*paths.csv);
  if (paths.report) probe_file(*paths.report);
  if (paths.frames) {
    std::error_code ec;
    fs::create_directories(*paths.frames, ec);
    if (ec) throw OutputError("cannot create frames directory '" + paths.frames->string() + "': " + ec.message());
    probe_file(*paths.frames / ".probe");
  }
}

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::trunc);
  os << content;
  os.flush();
  if (!os) throw OutputError("failed writing '" + p.string() + "'");
}

}  // namespace detail

struct ScenarioResult {
  std::vector<DiagRecord> history;
  std::vector<Event> events;
  Event terminal{EventKind::time_limit};
  std::optional<BoundReport> bounds;
  nlohmann::json report;
};

/// Executes one scenario and writes its configured outputs. Solver terminal
/// signals are results (recorded as the terminal event); invalid content
/// raises ConfigError and unwritable outputs raise OutputError.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir = {}) {
  const auto paths = detail::resolve_outputs(cfg.outputs, out_dir);
  detail::probe_outputs(paths);
  const AnyCurve initial = make_initial(cfg);

  ScenarioResult res;
  std::vector<std::vector<Vec2>> frames;
  const bool want_frames = paths.frames.has_value();
  nlohmann::json rep;
  rep["name"] = cfg.name;
  rep["law"] = std::string(to_string(cfg.law));
  rep["backend"] = cfg.backend == Backend::polar ? "polar" : "marker";
  rep["scheme"] = std::string(to_string(cfg.scheme));
  rep["stepper"] = std::string(to_string(cfg.stepper.stepper));
  rep["csv_schema"] = "gapf-series/1";

  StepperConfig resolved;
  std::visit(
      [&](const auto& curve) {
        using Curve = std::decay_t<decltype(curve)>;
        rep["grid_size"] = curve.size();
        auto run = evolve<Curve>({curve, 0.0, 0}, cfg.law, cfg.stepper, cfg.scheme, [&](const FlowState<Curve>& s) {
          res.history.push_back(record(s, cfg.scheme));
          if (want_frames) {
            if constexpr (std::is_same_v<Curve, PolarCurve>) {
              const auto m = to_marker(s.curve);
              frames.emplace_back(m.points().begin(), m.points().end());
            } else {
              frames.emplace_back(s.curve.points().begin(), s.curve.points().end());
            }
          }
        });
        res.events = run.events;
        res.terminal = run.terminal();
        resolved = run.config;
        rep["steps"] = run.final_state.step_index;
      },
      initial);

  rep["terminal"] = detail::to_json(res.terminal);
  rep["events"] = nlohmann::json::array();
  for (const auto& e : res.events) rep["events"].push_back(detail::to_json(e));
  rep["resolved"] = {{"tol_convex", *resolved.tol_convex},
                     {"tol_circle", resolved.tol_circle},
                     {"r_floor", *resolved.r_floor},
                     {"kappa_ceiling", *resolved.kappa_ceiling},
                     {"record_interval", *resolved.record_interval}};
  rep["initial"] = detail::to_json(res.history.front());
  rep["final"] = detail::to_json(res.history.back());
  rep["records"] = res.history.size();
  const double A0 = res.history.front().A;
  rep["area_drift_rel"] = std::abs(res.history.back().A - A0) / A0;

  if (cfg.law == FlowLaw::gapf) {
    res.bounds = check_bounds(res.history, res.history.front(), cfg.tolerances);
    rep["bounds"] = detail::to_json(*res.bounds);
  } else {
    rep["bounds"] = nullptr;
  }

  rep["star_loss_t"] = nullptr;
  for (const auto& d : res.history)
    if (d.p_min <= 0.0) {
      rep["star_loss_t"] = d.t;
      break;
    }

  if (cfg.decay_field) {
    double t0 = res.history.front().t, t1 = res.history.back().t;
    if (cfg.decay_window) {
      std::tie(t0, t1) = *cfg.decay_window;
    } else {
      for (const auto& e : res.events)
        if (e.kind == EventKind::convexity_reached) t0 = e.t;
    }
    nlohmann::json fit = {{"field", std::string(to_string(*cfg.decay_field))}, {"window", {t0, t1}}};
    try {
      const auto f = decay_fit(res.history, *cfg.decay_field, t0, t1);
      fit["rate"] = f.rate;
      fit["residual"] = f.residual;
      fit["samples"] = f.samples;
      fit["reference_rate"] = -std::pow(2.0 * std::numbers::pi / res.history.front().L, 2);
    } catch (const std::domain_error& e) {
      fit["refused"] = e.what();
    }
    rep["decay_fit"] = fit;
  }

  if (cfg.compare) {
    const auto& polar = std::get<PolarCurve>(initial);
    try {
      const auto cmp = compare_gapf_csf(polar, cfg.stepper, cfg.scheme);
      rep["comparison"] = {{"min_margin", cmp.min_margin},
                           {"shared_records", cmp.t_grid.size()},
                           {"gapf_p_min", cmp.gapf_p_min},
                           {"csf_terminal", detail::to_json(cmp.csf_terminal)}};
    } catch (const std::exception& e) {
      rep["comparison"] = {{"error", e.what()}};
    }
  }

  if (paths.csv) {
    std::ostringstream os;
    write_csv(os, res.history);
    detail::write_text(*paths.csv, os.str());
  }
  if (paths.frames) {
    const auto vb = frame_view_box(frames.front());
    for (std::size_t i = 0; i < frames.size(); ++i) {
      std::ostringstream name, os;
      name << "frame_" << std::setw(5) << std::setfill('0') << i << ".svg";
      write_svg_frame(os, frames[i], vb, res.history[i].t);
      detail::write_text(*paths.frames / name.str(), os.str());
    }
  }
  if (paths.report) detail::write_text(*paths.report, rep.dump(2) + "\n");
  res.report = std::move(rep);
  return res;
}

}  // namespace gapf
