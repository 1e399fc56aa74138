// Command-line front end: validate scenario files, run them to CSV, or run
// the standalone four-case discrimination experiment.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmsn/config.hpp"
#include "qmsn/rng.hpp"
#include "qmsn/scenario.hpp"

namespace {

int cmd_validate(const std::string& config_path) {
  const auto specs = qmsn::load_config(config_path);
  std::cout << "OK: " << specs.size() << " scenario"
            << (specs.size() == 1 ? "" : "s") << " validated\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& only_scenario,
            bool have_seed, std::uint64_t seed_override,
            const std::string& out_override) {
  auto specs = qmsn::load_config(config_path);

  if (!only_scenario.empty()) {
    std::vector<qmsn::ScenarioSpec> filtered;
    for (auto& s : specs)
      if (s.name == only_scenario) filtered.push_back(std::move(s));
    if (filtered.empty()) {
      std::cerr << "error: no scenario named '" << only_scenario << "' in "
                << config_path << "\n";
      return 1;
    }
    specs = std::move(filtered);
  }

  for (auto& s : specs) {
    if (have_seed) s.seed = seed_override;
    if (!out_override.empty()) s.output_path = out_override;
  }

  // One sink per output file; rows append in scenario order.
  std::map<std::string, std::vector<qmsn::MetricsRow>> by_file;
  std::vector<qmsn::MetricsRow> all_rows;
  for (const auto& spec : specs) {
    auto rows = qmsn::run_scenario(spec);
    auto& sink = by_file[spec.output_path];
    for (auto& row : rows) {
      sink.push_back(row);
      all_rows.push_back(std::move(row));
    }
  }

  for (const auto& [path, rows] : by_file) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    qmsn::write_csv(out, rows);
    if (!out) throw std::runtime_error("write failed: " + path);
    std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
  }

  qmsn::print_summary(std::cout, all_rows);
  return 0;
}

int cmd_figure2(double mu, double eta, double pd, std::uint64_t gates,
                std::uint64_t seed, const std::string& out_path) {
  qmsn::DetectorParams det{eta, pd};
  qmsn::MonitorConfig monitor;
  qmsn::Rng rng(seed);
  auto rows = qmsn::run_figure2(mu, det, gates, monitor, rng);
  for (auto& row : rows) {
    row.scenario = "figure2";
    row.seed = seed;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    qmsn::write_csv(out, rows);
  }
  qmsn::print_summary(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Monte Carlo simulator of a dual-rail quantum-optical network with "
      "thermal-decoy protection"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario_name;
  std::string out_path;
  std::uint64_t seed = 0;
  bool have_seed = false;

  auto* run = app.add_subcommand("run", "run scenarios from a config file");
  run->add_option("config", config_path, "scenario file")->required();
  run->add_option("--scenario", scenario_name, "run only this scenario");
  run->add_option("--seed", seed, "override every scenario seed")
      ->each([&have_seed](const std::string&) { have_seed = true; });
  run->add_option("--out", out_path, "override the output CSV path");

  auto* validate =
      app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("config", config_path, "scenario file")->required();

  double mu = 0.1;
  double eta = 0.1;
  double pd = 1e-5;
  std::uint64_t gates = 1000000;
  std::uint64_t f2_seed = 1;
  std::string f2_out;
  auto* fig2 = app.add_subcommand(
      "figure2", "four-case thermal-output discrimination experiment");
  fig2->add_option("--mu", mu, "mean photon number");
  fig2->add_option("--eta", eta, "detector efficiency");
  fig2->add_option("--pd", pd, "dark-count probability per gate");
  fig2->add_option("--gates", gates, "gates per case");
  fig2->add_option("--seed", f2_seed, "rng seed");
  fig2->add_option("--out", f2_out, "also write the rows to this CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, scenario_name, have_seed, seed, out_path);
    if (validate->parsed()) return cmd_validate(config_path);
    if (fig2->parsed())
      return cmd_figure2(mu, eta, pd, gates, f2_seed, f2_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
