#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "harness.hpp"

namespace hs = shellstab::harness;

int main(int argc, char** argv) {
  CLI::App app{"Robin-Neumann shell stability experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;

  using Runner = hs::Report (*)(const hs::ExperimentConfig&);
  const std::map<std::string, std::pair<std::string, Runner>> commands{
      {"shell-eig", {"Shell eigenvalue over a beta grid", hs::run_shell_eig}},
      {"verify-isoperimetric", {"FEM check that the shell maximizes lambda1", hs::run_verify_isoperimetric}},
      {"stability-sweep", {"Empirical stability constants against the hybrid asymmetry", hs::run_stability_sweep}},
      {"steklov-gap", {"Steklov quotient gaps with a FEM cross-check", hs::run_steklov_gap}},
      {"asymmetry", {"Hybrid asymmetry report for one domain", hs::run_asymmetry}},
      {"lemma-checks", {"Profile inequalities and constraint expansions", hs::run_lemma_checks}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override family.seed");
    sub->add_option("--workers", workers, "Concurrent sweep items")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "Output directory");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    hs::ExperimentConfig config = hs::load_config(config_path);
    if (seed) {
      config.family.seed = *seed;
    }
    if (workers) {
      config.workers = *workers;
    }
    if (out) {
      config.output = *out;
    }
    const hs::Report report = commands.at(name).second(config);
    hs::write_report(report, config, config.output);
    if (name == "asymmetry") {
      std::cout << report.log.front();
    }
    for (const auto& a : report.assertions) {
      std::cout << (a.passed ? "ok   " : "FAIL ") << a.name << " = " << a.value;
      if (!a.tolerance.empty()) {
        std::cout << " [" << a.tolerance << " = " << config.tolerance(a.tolerance) << "]";
      }
      std::cout << "\n";
    }
    for (const auto& line : report.log) {
      if (name != "asymmetry") {
        std::cerr << line << "\n";
      }
    }
    std::cout << name << ": " << report.rows.size() << " rows, config " << config.hash() << ", "
              << (report.passed() ? "passed" : "FAILED") << "\n";
    return report.passed() ? 0 : 1;
  } catch (const hs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return 3;
  }
}
