#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "shellstab/asymmetry.hpp"
#include "shellstab/errors.hpp"
#include "shellstab/fem.hpp"
#include "shellstab/steklov_quotient.hpp"
#include "shellstab/steklov_radial.hpp"

namespace shellstab::harness {

using nlohmann::json;

namespace {

// Reads one JSON object, tracking consumed keys so leftovers are rejected.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ConfigError(where("") + ": expected an object");
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!obj_.contains(key)) {
      return;
    }
    seen_.insert(key);
    const json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("expected a string");
      } else {
        if (!v.is_array()) throw ConfigError("expected an array");
      }
      out = v.get<T>();
    } catch (const ConfigError& e) {
      throw ConfigError(where(key) + ": " + e.what());
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  std::string where(const std::string& key) const {
    if (key.empty()) {
      return path_.empty() ? "<root>" : path_;
    }
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) {
        throw ConfigError(where(key) + ": unknown key");
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) {
    throw ConfigError(field + ": " + message);
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }

std::mt19937_64 sample_rng(std::uint64_t seed, int id, int attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(attempt)};
  return std::mt19937_64(seq);
}

// Random band-limited profile with mode weights k^-2 (k >= 2), scaled to the
// given W^{1,inf} size.
BoundaryProfile random_profile(std::mt19937_64& rng, int n, int max_mode, double size) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if (size == 0.0) {
    return BoundaryProfile::zero(n);
  }
  BoundaryProfile u = BoundaryProfile::zero(n);
  if (n == 2) {
    std::vector<double> packed(2 * max_mode + 1, 0.0);
    for (int k = 2; k <= max_mode; ++k) {
      packed[2 * k - 1] = normal(rng) / (k * k);
      packed[2 * k] = normal(rng) / (k * k);
    }
    u = BoundaryProfile::fourier(packed);
  } else {
    std::vector<double> packed((max_mode + 1) * (max_mode + 1), 0.0);
    for (int l = 2; l <= max_mode; ++l) {
      for (int m = -l; m <= l; ++m) {
        packed[l * l + l + m] = normal(rng) / (l * l);
      }
    }
    u = BoundaryProfile::spherical_harmonics(packed);
  }
  return u.scaled(size / u.w1inf_norm());
}

BoundaryProfile mode_profile(int n, int k, double eps) {
  return n == 2 ? BoundaryProfile::fourier_mode(k, eps) : BoundaryProfile::spherical_mode(k, 0, eps);
}

BoundaryProfile packed_profile(int n, const std::vector<double>& packed) {
  if (packed.empty()) {
    return BoundaryProfile::zero(n);
  }
  return n == 2 ? BoundaryProfile::fourier(packed) : BoundaryProfile::spherical_harmonics(packed);
}

// Disc of the given radius centred at (delta cos a, delta sin a) as a radial
// profile about the origin.
BoundaryProfile shifted_disc(double radius, double delta, double angle) {
  return BoundaryProfile::fit_fourier(
      [=](double t) {
        const double c = std::cos(t - angle);
        return delta * c + std::sqrt(radius * radius - delta * delta * (1.0 - c * c)) - radius;
      },
      96);
}

std::optional<HoledDomain> try_draw(const ExperimentConfig& config, int id, int attempt) {
  const FamilySpec& f = config.family;
  const ShellGeometry& g = config.geom;
  auto rng = sample_rng(f.seed, id, attempt);
  const double inner_size = f.inner_amplitude < 0.0 ? f.amplitude : f.inner_amplitude;
  BoundaryProfile outer = BoundaryProfile::zero(g.n);
  BoundaryProfile inner = BoundaryProfile::zero(g.n);
  if (f.kind == "random") {
    outer = random_profile(rng, g.n, f.max_mode, f.amplitude);
    inner = random_profile(rng, g.n, f.max_mode, inner_size);
  } else if (f.kind == "outer") {
    outer = random_profile(rng, g.n, f.max_mode, f.amplitude);
  } else if (f.kind == "inner") {
    if (g.n != 2) {
      throw PreconditionError("inner family: planar only");
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double delta = f.max_translation * (g.r2 - g.r1) * unit(rng);
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    inner = shifted_disc(g.r1, delta, angle).plus(random_profile(rng, g.n, f.max_mode, inner_size));
  }
  try {
    HoledDomain d = project_constraints(HoledDomain(g, outer, inner));
    if (!class_membership(d).member()) {
      return std::nullopt;
    }
    return d;
  } catch (const PreconditionError&) {
    return std::nullopt;
  } catch (const GeometryError&) {
    return std::nullopt;
  }
}

// Runs fn(i) for i in [0, count) on up to `workers` threads. Exceptions are
// captured per item.
template <class Result>
std::vector<std::optional<Result>> parallel_map(int count, int workers,
                                                const std::function<Result(int)>& fn,
                                                std::vector<std::string>& errors) {
  std::vector<std::optional<Result>> out(static_cast<std::size_t>(count));
  std::vector<std::string> messages(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (const std::exception& e) {
        messages[static_cast<std::size_t>(i)] = e.what();
      }
    }
  };
  const int threads = std::clamp(workers, 1, std::max(1, count));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) {
    pool.emplace_back(work);
  }
  work();
  for (auto& t : pool) {
    t.join();
  }
  for (int i = 0; i < count; ++i) {
    if (!messages[static_cast<std::size_t>(i)].empty()) {
      errors.push_back("item " + std::to_string(i) + ": " + messages[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

void require_planar(const ExperimentConfig& config, const std::string& command) {
  if (config.geom.n != 2) {
    throw ConfigError("geometry.n: " + command + " needs n = 2");
  }
}

double finest_to_coarsest(const SolverSpec& s) { return s.h_target * std::pow(2.0, s.levels - 1); }

void add_assertion(Report& r, const std::string& name, const std::string& tolerance, double value, bool passed) {
  r.assertions.push_back({name, tolerance, value, passed});
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void record_draw(Report& r, const FamilyDraw& draw, const ExperimentConfig& config) {
  r.summary["samples"] = draw.samples.size();
  r.summary["attempts"] = draw.attempts;
  r.summary["acceptance_rate"] = draw.acceptance_rate();
  r.log.push_back("family " + config.family.kind + ": accepted " + std::to_string(draw.samples.size()) + " of " +
                  std::to_string(draw.attempts) + " draws");
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> defaults{
      {"alpha_floor", 1e-10},     // samples with smaller asymmetry are skipped
      {"constraint", 1e-10},      // projected perimeter/volume residuals
      {"eigen_slack", 1e-8},      // added to FEM error bars in eigenvalue comparisons
      {"exponent_band", 0.1},     // half-width around 2 for the eps^2 fit
      {"gap_slack", 1e-12},       // Steklov gaps must exceed -gap_slack
      {"inner_slack", 1e-8},      // added to the inner-stability comparison
      {"monotone", 1e-12},        // shell eigenvalue monotonicity and concavity
      {"quotient_slack", 1e-6},   // FEM sigma <= N/D + error + quotient_slack
      {"ratio_floor", 0.0},       // empirical constants must exceed this
      {"slope_band", 0.15},       // half-width around 1 for the linear expansion residual fit
  };
  return defaults;
}

double ExperimentConfig::tolerance(const std::string& name) const {
  const auto it = tolerances.find(name);
  if (it != tolerances.end()) {
    return it->second;
  }
  const auto& d = default_tolerances();
  const auto jt = d.find(name);
  if (jt == d.end()) {
    throw ConfigError("tolerances." + name + ": no such tolerance");
  }
  return jt->second;
}

json ExperimentConfig::to_json() const {
  json tol = json::object();
  for (const auto& [k, v] : default_tolerances()) {
    tol[k] = tolerance(k);
  }
  return json{
      {"schema_version", schema_version},
      {"geometry", {{"n", geom.n}, {"beta", geom.beta}, {"r1", geom.r1}, {"r2", geom.r2}}},
      {"family",
       {{"kind", family.kind},
        {"modes", family.modes},
        {"max_mode", family.max_mode},
        {"amplitude", family.amplitude},
        {"inner_amplitude", family.inner_amplitude},
        {"max_translation", family.max_translation},
        {"amplitudes", family.amplitudes},
        {"samples", family.samples},
        {"seed", family.seed},
        {"max_attempts", family.max_attempts},
        {"include_shell", family.include_shell}}},
      {"solver", {{"h_target", solver.h_target}, {"levels", solver.levels}}},
      {"tolerances", tol},
      {"betas", betas},
      {"domain", {{"outer", domain.outer}, {"inner", domain.inner}, {"project", domain.project}}},
      {"fem_subsample", fem_subsample},
      {"workers", workers},
      {"output", output},
  };
}

std::string ExperimentConfig::hash() const {
  // Worker count and output directory do not change results.
  json j = to_json();
  j.erase("workers");
  j.erase("output");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  ObjectReader root(doc, "");
  require(root.has("schema_version"), "schema_version", "missing");
  root.read("schema_version", c.schema_version);
  require(c.schema_version == kSchemaVersion, "schema_version",
          "unsupported version " + std::to_string(c.schema_version));
  if (root.has("geometry")) {
    ObjectReader g(root.raw("geometry"), "geometry");
    g.read("n", c.geom.n);
    g.read("beta", c.geom.beta);
    g.read("r1", c.geom.r1);
    g.read("r2", c.geom.r2);
    g.finish();
    require(c.geom.n >= 2 && c.geom.n <= 3, "geometry.n", "must be 2 or 3");
    require(c.geom.beta < 0.0, "geometry.beta", "must be negative");
    require(c.geom.r1 > 0.0 && c.geom.r2 > c.geom.r1, "geometry.r2", "need 0 < r1 < r2");
  }
  if (root.has("family")) {
    ObjectReader f(root.raw("family"), "family");
    f.read("kind", c.family.kind);
    f.read("modes", c.family.modes);
    f.read("max_mode", c.family.max_mode);
    f.read("amplitude", c.family.amplitude);
    f.read("inner_amplitude", c.family.inner_amplitude);
    f.read("max_translation", c.family.max_translation);
    f.read("amplitudes", c.family.amplitudes);
    f.read("samples", c.family.samples);
    f.read("seed", c.family.seed);
    f.read("max_attempts", c.family.max_attempts);
    f.read("include_shell", c.family.include_shell);
    f.finish();
  }
  const FamilySpec& f = c.family;
  require(f.kind == "random" || f.kind == "outer" || f.kind == "inner" || f.kind == "ray", "family.kind",
          "expected random, outer, inner or ray");
  require(f.max_mode >= 2, "family.max_mode", "must be at least 2");
  require(f.amplitude >= 0.0 && f.amplitude < 0.5 * c.geom.r2, "family.amplitude", "need 0 <= amplitude < r2/2");
  require(f.inner_amplitude < 0.5 * c.geom.r1, "family.inner_amplitude", "need inner_amplitude < r1/2");
  require(f.max_translation >= 0.0 && f.max_translation < 1.0, "family.max_translation", "need 0 <= value < 1");
  require(f.samples >= 0, "family.samples", "must be non-negative");
  require(f.max_attempts >= 1, "family.max_attempts", "must be positive");
  for (int k : f.modes) {
    require(k >= 1, "family.modes", "modes must be positive");
  }
  for (double e : f.amplitudes) {
    require(e > 0.0 && e < 0.5 * c.geom.r2, "family.amplitudes", "need 0 < amplitude < r2/2");
  }
  if (root.has("solver")) {
    ObjectReader s(root.raw("solver"), "solver");
    s.read("h_target", c.solver.h_target);
    s.read("levels", c.solver.levels);
    s.finish();
  }
  require(c.solver.h_target > 0.0, "solver.h_target", "must be positive");
  require(c.solver.levels >= 3, "solver.levels", "need at least 3 levels");
  if (root.has("tolerances")) {
    const json& t = root.raw("tolerances");
    require(t.is_object(), "tolerances", "expected an object");
    for (const auto& [key, value] : t.items()) {
      require(default_tolerances().count(key) > 0, "tolerances." + key, "unknown tolerance");
      require(value.is_number(), "tolerances." + key, "expected a number");
      c.tolerances[key] = value.get<double>();
    }
  }
  root.read("betas", c.betas);
  for (double b : c.betas) {
    require(b < 0.0, "betas", "entries must be negative");
  }
  if (root.has("domain")) {
    ObjectReader d(root.raw("domain"), "domain");
    d.read("outer", c.domain.outer);
    d.read("inner", c.domain.inner);
    d.read("project", c.domain.project);
    d.finish();
  }
  root.read("fem_subsample", c.fem_subsample);
  require(c.fem_subsample >= 0, "fem_subsample", "must be non-negative");
  root.read("workers", c.workers);
  require(c.workers >= 1, "workers", "must be positive");
  root.read("output", c.output);
  root.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path + ": cannot open");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

FamilyDraw draw_family(const ExperimentConfig& config) {
  FamilyDraw draw;
  const FamilySpec& f = config.family;
  const ShellGeometry& g = config.geom;
  int id = 0;
  if (f.include_shell) {
    draw.samples.push_back({id++, HoledDomain::shell(g), 0, 0.0});
    ++draw.attempts;
  }
  if (f.kind == "ray") {
    for (int k : f.modes) {
      for (double eps : f.amplitudes) {
        ++draw.attempts;
        const BoundaryProfile outer = project_perimeter(mode_profile(g.n, k, eps), g);
        draw.samples.push_back({id++, HoledDomain(g, outer, BoundaryProfile::zero(g.n)), k, eps});
      }
    }
    return draw;
  }
  for (int i = 0; i < f.samples; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt < f.max_attempts && !accepted; ++attempt) {
      ++draw.attempts;
      if (auto d = try_draw(config, i, attempt)) {
        draw.samples.push_back({id++, *d, 0, f.amplitude});
        accepted = true;
      }
    }
  }
  return draw;
}

bool Report::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

Report run_shell_eig(const ExperimentConfig& config) {
  Report r;
  r.command = "shell-eig";
  r.columns = {"beta", "lambda1", "z_m", "z_M", "sigma1", "config_hash", "seed"};
  std::vector<double> betas = config.betas.empty() ? std::vector<double>{config.geom.beta} : config.betas;
  std::sort(betas.begin(), betas.end());
  const std::string hash = config.hash();
  const double sigma = sigma1_shell(config.geom.n, config.geom.r1, config.geom.r2);
  std::vector<std::string> errors;
  const auto pairs = parallel_map<RadialEigenpair>(
      static_cast<int>(betas.size()), config.workers,
      [&](int i) {
        ShellGeometry g = config.geom;
        g.beta = betas[static_cast<std::size_t>(i)];
        return shell_eigenfunction(g);
      },
      errors);
  std::vector<double> lambdas;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!pairs[i]) {
      continue;
    }
    const auto& p = *pairs[i];
    lambdas.push_back(p.lambda1());
    r.rows.push_back({fmt(betas[i]), fmt(p.lambda1()), fmt(p.z_m()), fmt(p.z_M()), fmt(sigma), hash,
                      std::to_string(config.family.seed)});
  }
  r.log.insert(r.log.end(), errors.begin(), errors.end());
  add_assertion(r, "all_solves_succeeded", "", static_cast<double>(errors.size()), errors.empty());
  const double tol = config.tolerance("monotone");
  double worst_drop = 0.0;
  double worst_bend = 0.0;
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    worst_drop = std::max(worst_drop, lambdas[i - 1] - lambdas[i]);
    if (i + 1 < lambdas.size()) {
      const double s0 = (lambdas[i] - lambdas[i - 1]) / (betas[i] - betas[i - 1]);
      const double s1 = (lambdas[i + 1] - lambdas[i]) / (betas[i + 1] - betas[i]);
      worst_bend = std::max(worst_bend, s1 - s0);
    }
  }
  add_assertion(r, "lambda_nondecreasing_in_beta", "monotone", worst_drop, worst_drop <= tol);
  add_assertion(r, "lambda_concave_in_beta", "monotone", worst_bend, worst_bend <= tol);
  r.summary["sigma1_shell"] = sigma;
  return r;
}

Report run_verify_isoperimetric(const ExperimentConfig& config) {
  require_planar(config, "verify-isoperimetric");
  Report r;
  r.command = "verify-isoperimetric";
  r.columns = {"id",      "mode",          "amplitude",      "lambda_omega", "error_bar",   "lambda_shell", "gap",
               "violation", "perimeter_residual", "volume_residual", "monotone_refinement", "config_hash", "seed"};
  const FamilyDraw draw = draw_family(config);
  record_draw(r, draw, config);
  const double lambda_shell = shell_eigenvalue(config.geom);
  const double h0 = finest_to_coarsest(config.solver);
  const double slack = config.tolerance("eigen_slack");
  std::vector<std::string> errors;
  const auto results = parallel_map<Extrapolation>(
      static_cast<int>(draw.samples.size()), config.workers,
      [&](int i) {
        return refine_and_extrapolate(draw.samples[static_cast<std::size_t>(i)].domain, config.geom.beta,
                                      config.solver.levels, h0);
      },
      errors);
  r.log.insert(r.log.end(), errors.begin(), errors.end());
  const std::string hash = config.hash();
  int violations = 0;
  double worst_constraint = 0.0;
  double shell_gap_excess = 0.0;
  std::map<int, std::vector<std::pair<double, double>>> rays;
  for (std::size_t i = 0; i < draw.samples.size(); ++i) {
    if (!results[i]) {
      continue;
    }
    const Sample& s = draw.samples[i];
    const Extrapolation& ex = *results[i];
    const auto res = constraint_residuals(s.domain);
    const double gap = lambda_shell - ex.value;
    const bool violation = ex.value > lambda_shell + ex.error_estimate + slack;
    violations += violation ? 1 : 0;
    worst_constraint = std::max({worst_constraint, std::abs(res.perimeter), std::abs(res.volume)});
    if (config.family.include_shell && s.id == 0) {
      shell_gap_excess = std::abs(gap) - ex.error_estimate - slack;
    }
    if (s.mode > 0) {
      rays[s.mode].emplace_back(s.amplitude, gap);
    }
    r.rows.push_back({fmt(s.id), fmt(s.mode), fmt(s.amplitude), fmt(ex.value), fmt(ex.error_estimate),
                      fmt(lambda_shell), fmt(gap), violation ? "1" : "0", fmt(res.perimeter), fmt(res.volume),
                      ex.monotone ? "1" : "0", hash, std::to_string(config.family.seed)});
  }
  add_assertion(r, "all_solves_succeeded", "", static_cast<double>(errors.size()), errors.empty());
  add_assertion(r, "violations", "eigen_slack", violations, violations == 0);
  add_assertion(r, "constraint_residuals", "constraint", worst_constraint,
                worst_constraint <= config.tolerance("constraint"));
  if (config.family.include_shell) {
    add_assertion(r, "shell_gap_within_error_bar", "eigen_slack", shell_gap_excess, shell_gap_excess <= 0.0);
  }
  json growth = json::object();
  for (auto& [mode, pts] : rays) {
    std::sort(pts.begin(), pts.end());
    bool monotone = true;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      monotone = monotone && pts[k].second >= pts[k - 1].second;
    }
    growth[std::to_string(mode)] = monotone;
  }
  r.summary["lambda_shell"] = lambda_shell;
  r.summary["violations"] = violations;
  r.summary["gap_monotone_along_rays"] = growth;
  return r;
}

Report run_stability_sweep(const ExperimentConfig& config) {
  require_planar(config, "stability-sweep");
  Report r;
  r.command = "stability-sweep";
  r.columns = {"id",          "amplitude",    "lambda_omega", "error_bar",     "lambda_shell", "gap",
               "alpha",       "hausdorff_asym", "g_of_asym",  "weak_fraenkel", "ratio",        "ratio_lower",
               "outer_ratio", "inner_bound",  "inner_holds",  "perimeter_residual", "volume_residual",
               "config_hash", "seed"};
  const FamilyDraw draw = draw_family(config);
  record_draw(r, draw, config);
  const double lambda_shell = shell_eigenvalue(config.geom);
  const double weight = std::min(1.0, std::abs(lambda_shell));
  const double h0 = finest_to_coarsest(config.solver);
  struct Item {
    Extrapolation ex;
    AsymmetryReport asym;
  };
  std::vector<std::string> errors;
  const auto results = parallel_map<Item>(
      static_cast<int>(draw.samples.size()), config.workers,
      [&](int i) {
        const HoledDomain& d = draw.samples[static_cast<std::size_t>(i)].domain;
        return Item{refine_and_extrapolate(d, config.geom.beta, config.solver.levels, h0), hybrid_asymmetry(d)};
      },
      errors);
  r.log.insert(r.log.end(), errors.begin(), errors.end());
  const std::string hash = config.hash();
  const double floor = config.tolerance("alpha_floor");
  const double inner_slack = config.tolerance("inner_slack");
  std::vector<double> ratios;
  std::vector<double> lowers;
  std::vector<double> outer_ratios;
  std::vector<double> inner_margins;
  int inner_failures = 0;
  for (std::size_t i = 0; i < draw.samples.size(); ++i) {
    if (!results[i]) {
      continue;
    }
    const Sample& s = draw.samples[i];
    const auto& [ex, asym] = *results[i];
    const auto res = constraint_residuals(s.domain);
    const double gap = lambda_shell - ex.value;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double ratio = nan;
    double lower = nan;
    double outer_ratio = nan;
    if (asym.alpha > floor) {
      ratio = gap / asym.alpha;
      lower = (gap - ex.error_estimate) / asym.alpha;
      ratios.push_back(ratio);
      lowers.push_back(lower);
    }
    if (asym.g_of_asym > floor) {
      outer_ratio = gap / asym.g_of_asym;
      outer_ratios.push_back(outer_ratio);
    }
    const double bound = weight * asym.weak_fraenkel;
    const bool inner_holds = gap + ex.error_estimate + inner_slack >= bound;
    inner_failures += inner_holds ? 0 : 1;
    inner_margins.push_back(gap - bound);
    r.rows.push_back({fmt(s.id), fmt(s.amplitude), fmt(ex.value), fmt(ex.error_estimate), fmt(lambda_shell),
                      fmt(gap), fmt(asym.alpha), fmt(asym.hausdorff_asym), fmt(asym.g_of_asym),
                      fmt(asym.weak_fraenkel), fmt(ratio), fmt(lower), fmt(outer_ratio), fmt(bound),
                      inner_holds ? "1" : "0", fmt(res.perimeter), fmt(res.volume), hash,
                      std::to_string(config.family.seed)});
  }
  const double ratio_floor = config.tolerance("ratio_floor");
  const double c_hat = ratios.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : *std::min_element(ratios.begin(), ratios.end());
  const double c_low = lowers.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : *std::min_element(lowers.begin(), lowers.end());
  add_assertion(r, "all_solves_succeeded", "", static_cast<double>(errors.size()), errors.empty());
  add_assertion(r, "empirical_constant_positive", "ratio_floor", c_low, !lowers.empty() && c_low > ratio_floor);
  add_assertion(r, "inner_stability_bound", "inner_slack", inner_failures, inner_failures == 0);
  if (!outer_ratios.empty()) {
    const double c_outer = *std::min_element(outer_ratios.begin(), outer_ratios.end());
    add_assertion(r, "outer_constant_positive", "ratio_floor", c_outer, c_outer > ratio_floor);
    r.summary["outer_constant"] = c_outer;
  }
  r.summary["lambda_shell"] = lambda_shell;
  r.summary["empirical_constant"] = c_hat;
  r.summary["empirical_constant_lower"] = c_low;
  r.summary["empirical_constant_uncertainty"] = c_hat - c_low;
  r.summary["ratio_quartiles"] = {quantile(ratios, 0.25), quantile(ratios, 0.5), quantile(ratios, 0.75)};
  r.summary["ratio_min"] = c_hat;
  r.summary["ratio_max"] = quantile(ratios, 1.0);
  r.summary["inner_margin_min"] = inner_margins.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                        : *std::min_element(inner_margins.begin(), inner_margins.end());
  r.summary["samples_used"] = ratios.size();
  return r;
}

Report run_steklov_gap(const ExperimentConfig& config) {
  Report r;
  r.command = "steklov-gap";
  r.columns = {"id",       "mode",  "amplitude", "gap",       "ratio_to_gradient", "quotient",
               "gradient_norm_sq", "outside_threshold", "fem_sigma", "fem_error", "config_hash", "seed"};
  const FamilyDraw draw = draw_family(config);
  record_draw(r, draw, config);
  const int count = static_cast<int>(draw.samples.size());
  const int subsample = config.geom.n == 2 ? std::min(config.fem_subsample, count) : 0;
  std::set<int> fem_ids;
  for (int k = 0; k < subsample; ++k) {
    fem_ids.insert(static_cast<int>((static_cast<long>(k) * count) / subsample));
  }
  const double h0 = finest_to_coarsest(config.solver);
  struct Item {
    QuotientEvaluation q;
    StabilityGap gap;
    std::optional<Extrapolation> fem;
  };
  std::vector<std::string> errors;
  const auto results = parallel_map<Item>(
      count, config.workers,
      [&](int i) {
        const Sample& s = draw.samples[static_cast<std::size_t>(i)];
        Item item{evaluate_quotient(s.domain.outer, config.geom), stability_gap(s.domain.outer, config.geom), {}};
        if (fem_ids.count(i)) {
          const HoledDomain d(config.geom, s.domain.outer, BoundaryProfile::zero(config.geom.n));
          item.fem = refine_and_extrapolate(d, config.geom.beta, config.solver.levels, h0, Problem::steklov_neumann);
        }
        return item;
      },
      errors);
  r.log.insert(r.log.end(), errors.begin(), errors.end());
  const std::string hash = config.hash();
  const double gap_slack = config.tolerance("gap_slack");
  const double q_slack = config.tolerance("quotient_slack");
  double worst_gap = std::numeric_limits<double>::infinity();
  int quotient_failures = 0;
  std::map<int, std::vector<std::tuple<double, double, double>>> rays;
  for (int i = 0; i < count; ++i) {
    if (!results[static_cast<std::size_t>(i)]) {
      continue;
    }
    const Sample& s = draw.samples[static_cast<std::size_t>(i)];
    const Item& it = *results[static_cast<std::size_t>(i)];
    worst_gap = std::min(worst_gap, it.gap.gap);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double sigma = nan;
    double err = nan;
    if (it.fem) {
      sigma = it.fem->value;
      err = it.fem->error_estimate;
      quotient_failures += sigma <= it.q.ratio + err + q_slack ? 0 : 1;
    }
    if (s.mode > 0) {
      rays[s.mode].emplace_back(s.amplitude, it.gap.gap, it.gap.lower_bound);
    }
    r.rows.push_back({fmt(s.id), fmt(s.mode), fmt(s.amplitude), fmt(it.gap.gap), fmt(it.gap.lower_bound),
                      fmt(it.q.ratio), fmt(it.q.gradient_norm_sq), it.q.outside_threshold ? "1" : "0", fmt(sigma),
                      fmt(err), hash, std::to_string(config.family.seed)});
  }
  add_assertion(r, "all_evaluations_succeeded", "", static_cast<double>(errors.size()), errors.empty());
  add_assertion(r, "gaps_nonnegative", "gap_slack", worst_gap, worst_gap >= -gap_slack);
  if (subsample > 0) {
    add_assertion(r, "fem_sigma_below_quotient", "quotient_slack", quotient_failures, quotient_failures == 0);
  }
  json fits = json::object();
  const double band = config.tolerance("exponent_band");
  for (auto& [mode, pts] : rays) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> eps;
    std::vector<double> gaps;
    for (const auto& [e, g, ratio] : pts) {
      eps.push_back(e);
      gaps.push_back(g);
    }
    const double limit = std::get<2>(pts.front());
    if (pts.size() >= 2 && std::all_of(gaps.begin(), gaps.end(), [](double g) { return g > 0.0; })) {
      const double slope = log_log_slope(eps, gaps);
      fits[std::to_string(mode)] = {{"exponent", slope}, {"limit_ratio", limit}};
      add_assertion(r, "mode_" + std::to_string(mode) + "_exponent", "exponent_band", slope,
                    std::abs(slope - 2.0) <= band);
    } else {
      fits[std::to_string(mode)] = {{"exponent", nullptr}, {"limit_ratio", limit}};
      add_assertion(r, "mode_" + std::to_string(mode) + "_exponent", "exponent_band",
                    std::numeric_limits<double>::quiet_NaN(), false);
    }
    add_assertion(r, "mode_" + std::to_string(mode) + "_limit_ratio_positive", "ratio_floor", limit,
                  limit > config.tolerance("ratio_floor"));
  }
  r.summary["min_gap"] = worst_gap;
  r.summary["fem_checked"] = subsample;
  r.summary["ray_fits"] = fits;
  return r;
}

Report run_asymmetry(const ExperimentConfig& config) {
  Report r;
  r.command = "asymmetry";
  r.columns = {"key", "value"};
  const int n = config.geom.n;
  HoledDomain d(config.geom, packed_profile(n, config.domain.outer), packed_profile(n, config.domain.inner));
  if (config.domain.project) {
    d = project_constraints(d);
  }
  d.validate();
  const AsymmetryReport a = hybrid_asymmetry(d);
  std::istringstream lines(a.to_record());
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      r.rows.push_back({line.substr(0, eq), line.substr(eq + 1)});
    }
  }
  r.rows.push_back({"config_hash", config.hash()});
  const auto membership = class_membership(d);
  add_assertion(r, "admissible", "", membership.hausdorff_gap, membership.member());
  r.summary["alpha"] = a.alpha;
  r.summary["hausdorff_asym"] = a.hausdorff_asym;
  r.summary["g_of_asym"] = a.g_of_asym;
  r.summary["weak_fraenkel"] = a.weak_fraenkel;
  r.summary["branch"] = a.alpha == 0.0 ? "none" : (a.g_of_asym >= a.weak_fraenkel ? "hausdorff" : "weak_fraenkel");
  r.log.push_back(a.to_record());
  return r;
}

Report run_lemma_checks(const ExperimentConfig& config) {
  Report r;
  r.command = "lemma-checks";
  r.columns = {"id",  "mode", "amplitude", "eps", "perimeter_expansion_ratio", "volume_expansion_ratio",
               "poincare_ratio", "poincare_holds", "sup_bound_lhs", "sup_bound_rhs", "sup_bound_holds",
               "gradient_bound_lhs", "gradient_bound_rhs", "gradient_bound_holds", "config_hash", "seed"};
  FamilyDraw draw = draw_family(config);
  record_draw(r, draw, config);
  if (config.family.kind == "ray") {
    // Rays leave the hole round; project the volume as well.
    for (auto& s : draw.samples) {
      s.domain = project_constraints(s.domain);
    }
  }
  std::vector<std::string> errors;
  const auto results = parallel_map<LemmaReport>(
      static_cast<int>(draw.samples.size()), config.workers,
      [&](int i) {
        const HoledDomain& d = draw.samples[static_cast<std::size_t>(i)].domain;
        const double size = std::max(d.outer.w1inf_norm(), d.inner.w1inf_norm());
        return lemma_checks(d, size > 0.0 ? size * (1.0 + 1e-9) : 1e-3);
      },
      errors);
  r.log.insert(r.log.end(), errors.begin(), errors.end());
  const std::string hash = config.hash();
  int failures = 0;
  std::map<int, std::vector<std::pair<double, double>>> rays;
  for (std::size_t i = 0; i < draw.samples.size(); ++i) {
    if (!results[i]) {
      continue;
    }
    const Sample& s = draw.samples[i];
    const LemmaReport& l = *results[i];
    failures += (l.poincare_holds && l.sup_bound_holds && l.gradient_bound_holds) ? 0 : 1;
    if (s.mode > 0) {
      rays[s.mode].emplace_back(s.amplitude, l.perimeter_expansion_ratio);
    }
    r.rows.push_back({fmt(s.id), fmt(s.mode), fmt(s.amplitude), fmt(l.eps), fmt(l.perimeter_expansion_ratio),
                      fmt(l.volume_expansion_ratio), fmt(l.poincare_ratio), l.poincare_holds ? "1" : "0",
                      fmt(l.sup_bound_lhs), fmt(l.sup_bound_rhs), l.sup_bound_holds ? "1" : "0",
                      fmt(l.gradient_bound_lhs), fmt(l.gradient_bound_rhs), l.gradient_bound_holds ? "1" : "0", hash,
                      std::to_string(config.family.seed)});
  }
  add_assertion(r, "all_checks_succeeded", "", static_cast<double>(errors.size()), errors.empty());
  add_assertion(r, "bounds_hold", "", failures, failures == 0);
  json fits = json::object();
  for (auto& [mode, pts] : rays) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> eps;
    std::vector<double> ratios;
    for (const auto& [e, q] : pts) {
      eps.push_back(e);
      ratios.push_back(q);
    }
    if (pts.size() < 2 || !std::all_of(ratios.begin(), ratios.end(), [](double q) { return q > 0.0; })) {
      fits[std::to_string(mode)] = nullptr;
      continue;
    }
    const double slope = log_log_slope(eps, ratios);
    fits[std::to_string(mode)] = slope;
    // Residual over the squared size is O(eps); single modes can decay faster.
    add_assertion(r, "mode_" + std::to_string(mode) + "_expansion_at_least_linear", "slope_band", slope,
                  slope >= 1.0 - config.tolerance("slope_band"));
  }
  r.summary["expansion_slopes"] = fits;
  return r;
}

std::string to_csv(const Report& report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    os << (i ? "," : "") << report.columns[i];
  }
  os << "\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << row[i];
    }
    os << "\n";
  }
  return os.str();
}

json summary_json(const Report& report, const ExperimentConfig& config) {
  json assertions = json::array();
  for (const auto& a : report.assertions) {
    json tol = a.tolerance.empty() ? json(nullptr) : json(config.tolerance(a.tolerance));
    assertions.push_back({{"name", a.name},
                          {"tolerance", a.tolerance.empty() ? json(nullptr) : json(a.tolerance)},
                          {"tolerance_value", tol},
                          {"value", std::isfinite(a.value) ? json(a.value) : json(nullptr)},
                          {"passed", a.passed}});
  }
  json results = report.summary;
  for (auto& [key, value] : results.items()) {
    if (value.is_number_float() && !std::isfinite(value.get<double>())) {
      value = nullptr;
    }
  }
  return json{{"command", report.command},
              {"schema_version", kSchemaVersion},
              {"config_hash", config.hash()},
              {"seed", config.family.seed},
              {"passed", report.passed()},
              {"assertions", assertions},
              {"results", results},
              {"log", report.log},
              {"config", config.to_json()}};
}

void write_report(const Report& report, const ExperimentConfig& config, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    std::ofstream csv(base / (report.command + ".csv"));
    csv << to_csv(report);
  }
  std::ofstream js(base / (report.command + "_summary.json"));
  js << summary_json(report, config).dump(2) << "\n";
  if (!js) {
    throw std::runtime_error("write_report: cannot write to " + dir);
  }
}

}  // namespace shellstab::harness
