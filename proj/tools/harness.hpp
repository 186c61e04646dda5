#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "shellstab/domains.hpp"
#include "shellstab/shell.hpp"

namespace shellstab::harness {

// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

struct FamilySpec {
  // random: both boundaries perturbed; outer: round hole; inner: round outer
  // with a translated, perturbed hole; ray: single modes along amplitudes.
  std::string kind = "random";
  std::vector<int> modes{2, 3, 4, 5, 6};
  int max_mode = 6;
  double amplitude = 0.05;        // W^{1,inf} size of the outer profile
  double inner_amplitude = -1.0;  // negative: same as amplitude
  double max_translation = 0.1;   // hole shift as a fraction of R2 - R1 (inner family)
  std::vector<double> amplitudes{0.04, 0.02, 0.01};
  int samples = 10;
  std::uint64_t seed = 1;
  int max_attempts = 50;
  bool include_shell = false;
};

struct SolverSpec {
  double h_target = 0.02;  // finest mesh of the refinement sequence
  int levels = 3;
};

struct DomainSpec {
  std::vector<double> outer;  // packed Fourier or spherical-harmonic coefficients
  std::vector<double> inner;
  bool project = true;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ShellGeometry geom;
  FamilySpec family;
  SolverSpec solver;
  std::map<std::string, double> tolerances;
  std::vector<double> betas;
  DomainSpec domain;
  int fem_subsample = 10;
  int workers = 1;
  std::string output = "out";

  double tolerance(const std::string& name) const;
  nlohmann::json to_json() const;
  // FNV-1a of the canonical JSON dump, as 16 hex digits.
  std::string hash() const;
};

// Defaults for every named tolerance; configs may only override these names.
const std::map<std::string, double>& default_tolerances();

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

struct Sample {
  int id = 0;
  HoledDomain domain;
  int mode = 0;
  double amplitude = 0.0;
};

struct FamilyDraw {
  std::vector<Sample> samples;
  int attempts = 0;
  double acceptance_rate() const { return attempts > 0 ? double(samples.size()) / attempts : 0.0; }
};

// Deterministic in the config: sample i uses its own generator seeded from
// (seed, i), so the draw does not depend on the worker count.
FamilyDraw draw_family(const ExperimentConfig& config);

struct Assertion {
  std::string name;
  std::string tolerance;  // named tolerance it was checked against
  double value = 0.0;
  bool passed = false;
};

struct Report {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // sorted by id
  std::vector<Assertion> assertions;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> log;

  bool passed() const;
};

Report run_shell_eig(const ExperimentConfig& config);
Report run_verify_isoperimetric(const ExperimentConfig& config);
Report run_stability_sweep(const ExperimentConfig& config);
Report run_steklov_gap(const ExperimentConfig& config);
Report run_asymmetry(const ExperimentConfig& config);
Report run_lemma_checks(const ExperimentConfig& config);

std::string to_csv(const Report& report);
nlohmann::json summary_json(const Report& report, const ExperimentConfig& config);
// Writes <dir>/<command>.csv and <dir>/<command>_summary.json.
void write_report(const Report& report, const ExperimentConfig& config, const std::string& dir);

}  // namespace shellstab::harness
