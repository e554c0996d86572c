// jdsv: run bundled or user-supplied short-maturity implied-volatility experiments.
//
// Exit codes: 0 success, 1 usage error, 2 invalid configuration,
// 3 numerical failure. JDSV_THREADS sets the worker count.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jdsv/jdsv.hpp"

namespace {

int run_command(const std::string& target, std::optional<std::uint64_t> paths, std::optional<std::uint64_t> seed,
                const std::string& out_dir) {
  jdsv::ExperimentConfig cfg = jdsv::resolve_experiment(target);
  if (paths) cfg.model.n_paths = *paths;
  if (seed) cfg.model.seed = *seed;
  cfg.validate();

  const jdsv::ExperimentResult result = jdsv::run_experiment(cfg);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path file = std::filesystem::path(out_dir) / (cfg.name + ".csv");
  std::ofstream csv(file, std::ios::binary);
  if (!csv) throw jdsv::ConfigError("--out", "cannot write '" + file.string() + "'");
  jdsv::write_csv(csv, result);
  csv.close();

  std::printf("%s (%s): %zu paths, seed %llu, %zu repetition(s), axis %s\n", cfg.name.c_str(), cfg.anchor.c_str(),
              cfg.model.n_paths, static_cast<unsigned long long>(cfg.model.seed), cfg.repetitions,
              jdsv::to_string(cfg.axis));
  std::printf("%12s %12s %10s %12s %10s %12s\n", "value", "level", "level_se", "skew", "skew_se", "theory");
  for (const auto& r : result.rows) {
    std::printf("%12.6g %12.6g %10.3g %12.6g %10.3g %12.6g%s%s\n", r.sweep_value, r.mc.level.mean,
                r.mc.level.std_error, r.mc.skew.mean, r.mc.skew.std_error, r.theory.skew_or_scaled_skew,
                r.error.empty() ? "" : "  ! ", r.error.c_str());
  }
  std::printf("wrote %s\n", file.string().c_str());
  // Points that failed numerically are kept in the CSV as nan; the run as a
  // whole still reports the failure.
  for (const auto& r : result.rows)
    if (!r.error_module.empty()) {
      std::fprintf(stderr, "jdsv: numerical failure in %s: %s (sweep value %g)\n", r.error_module.c_str(),
                   r.error.c_str(), r.sweep_value);
      return 3;
    }
  return 0;
}

int list_command(const std::string& filter) {
  for (const auto& s : jdsv::list_scenarios(filter)) std::printf("%-34s %s\n", s.name.c_str(), s.anchor.c_str());
  return 0;
}

int theory_command(const std::string& target) {
  const jdsv::ExperimentConfig cfg = jdsv::resolve_experiment(target);
  std::cout << jdsv::kTheoryHeader << '\n';
  jdsv::write_theory_row(std::cout, cfg.name, jdsv::theory_for(cfg.model));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo short-maturity ATM implied volatility for jump-diffusion stochastic-volatility "
               "Bachelier models.\nWorker threads: JDSV_THREADS (default: hardware concurrency)."};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write <out>/<name>.csv");
  std::string target;
  std::optional<std::uint64_t> paths, seed;
  std::string out_dir = ".";
  run->add_option("scenario", target, "Bundled scenario name or path to a scenario file")->required();
  run->add_option("--paths", paths, "Override the number of paths");
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* list = app.add_subcommand("list", "List bundled scenarios");
  std::string filter;
  list->add_option("filter", filter, "Substring of the scenario name");

  auto* theory = app.add_subcommand("theory", "Print the theoretical short-maturity limits as a CSV row");
  theory->add_option("scenario", target, "Bundled scenario name or path to a scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(target, paths, seed, out_dir);
    if (list->parsed()) return list_command(filter);
    if (theory->parsed()) return theory_command(target);
  } catch (const jdsv::ConfigError& e) {
    std::fprintf(stderr, "jdsv: invalid configuration: %s\n", e.what());
    return 2;
  } catch (const jdsv::NumericalError& e) {
    std::fprintf(stderr, "jdsv: numerical failure in %s: %s\n", e.module().c_str(), e.what());
    return 3;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "jdsv: invalid configuration: %s\n", e.what());
    return 2;
  }
  return 1;
}
