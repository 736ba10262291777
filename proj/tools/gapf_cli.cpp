// gapf: run flow scenarios, parameter sweeps, and the acceptance suite.
//
// Exit codes: 0 success (observed blow-ups included), 1 invalid config or IO
// failure, 2 acceptance failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <gapf/acceptance.hpp>
#include <gapf/scenario.hpp>

namespace {

void summarize(const gapf::ScenarioConfig& cfg, const gapf::ScenarioResult& res) {
  const auto& t = res.terminal;
  std::cout << cfg.name << ": " << gapf::to_string(t.kind) << " at t = " << t.t << " after "
            << res.report.value("steps", std::size_t{0}) << " steps, " << res.history.size() << " records";
  if (res.bounds) std::cout << ", bound violations " << res.bounds->violations();
  std::cout << '\n';
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Area-preserving and curve-shortening flow of closed plane curves"};
  app.require_subcommand(1);
  std::string out_dir;
  bool quiet = false;
  app.add_option("--out-dir", out_dir, "Directory that relative output paths resolve against");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  auto* run = app.add_subcommand("run", "Run one scenario file");
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "Scenario file")->required();

  auto* sweep = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  std::string sweep_path, param;
  sweep->add_option("scenario", sweep_path, "Scenario file")->required();
  sweep->add_option("--param", param, "section.key=v1,v2,...")->required();

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = gapf::load_scenario(scenario_path);
      const auto res = gapf::run_scenario(cfg, out_dir);
      if (!quiet) summarize(cfg, res);
      return 0;
    }

    if (sweep->parsed()) {
      const auto eq = param.find('=');
      if (eq == std::string::npos) throw gapf::ConfigError("--param must be section.key=v1,v2,...");
      const std::string key = param.substr(0, eq);
      const auto values = split_values(param.substr(eq + 1));
      if (values.empty()) throw gapf::ConfigError("--param lists no values");
      const auto base = gapf::read_scenario_tree(sweep_path);
      // validate every variant before running any
      std::vector<gapf::ScenarioConfig> variants;
      for (const auto& v : values) {
        auto tree = base;
        gapf::set_override(tree, key, v);
        auto cfg = gapf::scenario_from_tree(tree);
        cfg.name += "__" + key + "=" + v;
        variants.push_back(std::move(cfg));
      }
      const std::filesystem::path root = out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(out_dir);
      std::ostringstream summary;
      summary << "value,terminal,t_terminal,steps,A_drift_rel,L_final\n";
      for (std::size_t i = 0; i < variants.size(); ++i) {
        const auto res = gapf::run_scenario(variants[i], root / variants[i].name);
        if (!quiet) summarize(variants[i], res);
        summary << values[i] << ',' << gapf::to_string(res.terminal.kind) << ',' << gapf::format_double(res.terminal.t) << ','
                << res.report.value("steps", std::size_t{0}) << ','
                << gapf::format_double(res.report["area_drift_rel"].get<double>()) << ','
                << gapf::format_double(res.history.back().L) << '\n';
      }
      std::filesystem::create_directories(root);
      std::ofstream os(root / "sweep_summary.csv");
      os << summary.str();
      if (!os) throw gapf::OutputError("cannot write sweep_summary.csv");
      return 0;
    }

    if (verify->parsed()) {
      const auto ex = gapf::acceptance::run_experiments([&](const std::string& s) {
        if (!quiet) std::cerr << "  running " << s << '\n';
      });
      const auto results = gapf::acceptance::evaluate(ex);
      gapf::acceptance::print_table(std::cout, results);
      return gapf::acceptance::all_passed(results) ? 0 : 2;
    }
  } catch (const gapf::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 1;
  } catch (const gapf::OutputError& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
