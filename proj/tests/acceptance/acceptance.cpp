// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "harness.hpp"
#include "shellstab/asymmetry.hpp"
#include "shellstab/domains.hpp"
#include "shellstab/fem.hpp"
#include "shellstab/planar.hpp"
#include "shellstab/shell.hpp"
#include "shellstab/specfun.hpp"
#include "shellstab/steklov_radial.hpp"

namespace {

using namespace shellstab;
using specfun::BesselOrder;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double log2_slope(double coarse, double fine) { return std::log(coarse / fine) / std::log(2.0); }

double five_point(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

harness::ExperimentConfig config_file(const std::string& name) {
  return harness::load_config(std::string(SHELLSTAB_CONFIG_DIR) + "/" + name);
}

std::string failing_assertions(const harness::Report& r) {
  std::string out;
  for (const auto& a : r.assertions) {
    if (!a.passed) {
      out += " " + a.name + "=" + fmt("%.3g", a.value);
    }
  }
  return out;
}

Outcome bessel_identities() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  const std::array<double, 4> orders = {1.0, 1.5, 2.0, 2.5};
  std::uniform_int_distribution<int> pick(0, static_cast<int>(orders.size()) - 1);
  std::uniform_real_distribution<double> logx(std::log(0.05), std::log(30.0));
  double worst_alg = 0.0;
  double worst_fd = 0.0;
  for (int s = 0; s < 500; ++s) {
    const double nu = orders[static_cast<std::size_t>(pick(rng))];
    const double x = std::exp(logx(rng));
    const BesselOrder lo(nu - 1), mid(nu), hi(nu + 1);
    // Three-term recurrences for I and K.
    const double ri = bessel_i(lo, x) - (2 * nu / x) * bessel_i(mid, x) - bessel_i(hi, x);
    const double rk = bessel_k(lo, x) + (2 * nu / x) * bessel_k(mid, x) - bessel_k(hi, x);
    worst_alg = std::max({worst_alg, std::abs(ri) / bessel_i(lo, x), std::abs(rk) / bessel_k(hi, x)});
    // (x^{-nu} F_nu)' = -+ x^{-nu} F_{nu+1} for J and Y.
    for (auto fn : {specfun::bessel_j, specfun::bessel_y}) {
      auto scaled = [&](double z) { return std::pow(z, -nu) * fn(mid, z); };
      const double rhs = -std::pow(x, -nu) * fn(hi, x);
      const double scale = std::max({1.0, std::abs(rhs), std::abs(scaled(x))});
      worst_fd = std::max(worst_fd, std::abs(five_point(scaled, x) - rhs) / scale);
    }
    // I' = (I_{nu-1} + I_{nu+1})/2 and K' = -(K_{nu-1} + K_{nu+1})/2.
    const double di = 0.5 * (bessel_i(lo, x) + bessel_i(hi, x));
    const double dk = -0.5 * (bessel_k(lo, x) + bessel_k(hi, x));
    worst_fd = std::max(worst_fd, std::abs(five_point([&](double z) { return bessel_i(mid, z); }, x) - di) /
                                      std::max(1.0, std::abs(di)));
    worst_fd = std::max(worst_fd, std::abs(five_point([&](double z) { return bessel_k(mid, z); }, x) - dk) /
                                      std::max(1.0, std::abs(dk)));
  }
  const double t = seconds_since(start);
  return {worst_alg <= 1e-11 && worst_fd <= 1e-8 && t < 5.0,
          fmt("500 pairs, recurrence %.2e (<= 1e-11), derivative %.2e (<= 1e-8), %.2fs (< 5s)", worst_alg,
              worst_fd, t)};
}

Outcome shell_vs_fem() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  for (double beta : {-0.25, -1.0, -4.0}) {
    const ShellGeometry g{2, beta, 1.0, 2.0};
    const double exact = shell_eigenvalue(g);
    const auto ex = refine_and_extrapolate(HoledDomain::shell(g), beta, 4, 0.2);
    const double rel = std::abs(ex.value - exact) / std::abs(exact);
    ok = ok && rel <= 1e-4 && std::abs(ex.observed_order - 2.0) <= 0.2;
    detail += fmt("beta=%g rel %.1e order %.3f; ", beta, rel, ex.observed_order);
  }
  const double t = seconds_since(start);
  ok = ok && t < 120.0;
  return {ok, detail + fmt("%.1fs (< 120s)", t)};
}

Outcome steklov_certificates() {
  const auto start = Clock::now();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> inner(0.1, 3.0);
  std::uniform_real_distribution<double> width(0.1, 3.0);
  int a1_fail = 0;
  int ratio_fail = 0;
  int combo_fail = 0;
  std::string first_combo;
  for (int s = 0; s < 50; ++s) {
    const int n = (s % 2 == 0) ? 2 : 3;
    const double r1 = inner(rng);
    const double r2 = r1 + width(rng);
    const auto c = sign_certificates(n, r1, r2);
    a1_fail += c.a1_negative ? 0 : 1;
    ratio_fail += c.eta_over_mu_decreasing ? 0 : 1;
    if (!c.combination_positive) {
      ++combo_fail;
      if (first_combo.empty()) {
        first_combo = fmt(", e.g. n=%d R1=%.3f R2=%.3f combination %.4g", n, r1, r2, c.combination);
      }
    }
  }
  const double t = seconds_since(start);
  return {a1_fail == 0 && ratio_fail == 0 && combo_fail == 0 && t < 10.0,
          fmt("50 shells, failures: A1 %d, ratio %d, combination %d%s; %.2fs (< 10s)", a1_fail, ratio_fail,
              combo_fail, first_combo.c_str(), t)};
}

Outcome web_identity() {
  const std::array<ShellGeometry, 10> shells = {
      ShellGeometry{2, -1.0, 1.0, 2.0},  ShellGeometry{2, -0.25, 1.0, 2.0}, ShellGeometry{2, -4.0, 1.0, 2.0},
      ShellGeometry{2, -0.5, 0.5, 1.0},  ShellGeometry{2, -2.0, 0.3, 2.5},  ShellGeometry{2, -1.0, 2.0, 2.5},
      ShellGeometry{3, -1.0, 1.0, 2.0},  ShellGeometry{3, -0.3, 0.5, 1.5},  ShellGeometry{3, -3.0, 1.0, 3.0},
      ShellGeometry{3, -1.5, 1.5, 2.0}};
  double worst_value = 0.0;
  double worst_rq = 0.0;
  for (const auto& g : shells) {
    const auto web = build_web_function(g);
    for (int i = 0; i < 100; ++i) {
      const double s = web.width() * i / 100.0;
      worst_value = std::max(worst_value, std::abs(web.value_by_quadrature(s) - web.value(s)));
    }
    const auto& eig = web.eigenpair();
    worst_rq = std::max(worst_rq, std::abs(eig.rayleigh_quotient() - eig.lambda1()));
  }
  return {worst_value <= 1e-8 && worst_rq <= 1e-8,
          fmt("10 shells x 100 levels: level inversion %.2e (<= 1e-8), Rayleigh quotient %.2e (<= 1e-8)",
              worst_value, worst_rq)};
}

Outcome isoperimetric_sweep() {
  const auto start = Clock::now();
  const auto cfg = config_file("verify_isoperimetric.json");
  const auto r = harness::run_verify_isoperimetric(cfg);
  const double t = seconds_since(start);
  const int domains = static_cast<int>(r.rows.size());
  const bool ok = r.passed() && domains >= 100 && t < 1800.0;
  return {ok, fmt("%d domains, eps=%g, h=%g, %d levels, %.0fs (< 1800s)", domains, cfg.family.amplitude,
                  cfg.solver.h_target, cfg.solver.levels, t) +
                  failing_assertions(r)};
}

Outcome inner_stability() {
  const auto start = Clock::now();
  const auto r = harness::run_stability_sweep(config_file("stability_inner.json"));
  const double t = seconds_since(start);
  const int domains = static_cast<int>(r.rows.size());
  double c = r.summary.value("empirical_constant", 0.0);
  return {r.passed() && domains >= 50,
          fmt("%d domains, empirical constant %.4g, %.0fs", domains, c, t) + failing_assertions(r)};
}

Outcome steklov_gap() {
  const auto start = Clock::now();
  const auto r = harness::run_steklov_gap(config_file("steklov_rays.json"));
  const double t = seconds_since(start);
  int exponents = 0;
  std::string range;
  double lo = 1e300;
  double hi = -1e300;
  for (const auto& a : r.assertions) {
    if (a.name.ends_with("_exponent")) {
      ++exponents;
      lo = std::min(lo, a.value);
      hi = std::max(hi, a.value);
    }
  }
  return {r.passed() && exponents == 5,
          fmt("modes 2..6, exponents in [%.4f, %.4f] (band [1.9, 2.1]), %.0fs", lo, hi, t) + failing_assertions(r)};
}

HoledDomain parallel_hole_domain(const ShellGeometry& g) {
  const auto u = project_perimeter(BoundaryProfile::fourier_mode(2, 0.05), g);
  const auto k = inner_parallel(u, g, g.r2 - g.r1);
  const auto& verts = k.vertices();
  auto radius = [&](double a) {
    const Eigen::Vector2d e(std::cos(a), std::sin(a));
    double best = 1e300;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const Eigen::Vector2d d = verts[(i + 1) % verts.size()] - verts[i];
      const Eigen::Vector2d nrm(d.y(), -d.x());
      const double proj = nrm.dot(e);
      if (proj > 0.0) {
        best = std::min(best, nrm.dot(verts[i]) / proj);
      }
    }
    return best - g.r1;
  };
  return HoledDomain(g, u, BoundaryProfile::fit_fourier(radius, 64));
}

Outcome hybrid_asymmetry_branches() {
  const ShellGeometry g{2, -1.0, 1.0, 2.0};
  const auto shell = hybrid_asymmetry(HoledDomain::shell(g));
  const bool shell_ok = shell.alpha < 1e-12 && shell.weak_fraenkel == 0.0;

  const auto round_outer = hybrid_asymmetry(
      project_constraints(HoledDomain(g, BoundaryProfile::zero(2), BoundaryProfile::fourier_mode(2, 0.05))));
  const bool hole_ok = round_outer.hausdorff_asym < 1e-12 && round_outer.weak_fraenkel > 0.0 &&
                       round_outer.alpha == round_outer.weak_fraenkel;

  const auto parallel = hybrid_asymmetry(parallel_hole_domain(g));
  const bool outer_ok = parallel.g_of_asym > 0.0 && parallel.weak_fraenkel < 1e-3 * parallel.g_of_asym &&
                        parallel.alpha == parallel.g_of_asym;

  return {shell_ok && hole_ok && outer_ok,
          fmt("shell alpha=%.1e; round outer -> hole term %.4g; parallel hole -> outer term %.4g (hole term %.1e)",
              shell.alpha, round_outer.alpha, parallel.alpha, parallel.weak_fraenkel)};
}

Outcome lemma_suite() {
  const ShellGeometry g2{2, -1.0, 1.0, 2.0};
  const ShellGeometry g3{3, -1.0, 1.0, 2.0};
  double poincare_err = 0.0;
  for (int k = 2; k <= 6; ++k) {
    const auto r = lemma_checks(HoledDomain(g2, BoundaryProfile::fourier_mode(k, 0.01), BoundaryProfile::zero(2)), 0.1);
    poincare_err = std::max(poincare_err, std::abs(r.poincare_ratio - k * k));
  }
  for (int l = 2; l <= 5; ++l) {
    const auto r =
        lemma_checks(HoledDomain(g3, BoundaryProfile::spherical_mode(l, 1, 0.01), BoundaryProfile::zero(3)), 0.2);
    poincare_err = std::max(poincare_err, std::abs(r.poincare_ratio - l * (l + 1.0)));
  }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_int_distribution<int> degree(2, 8);
  auto random_profile = [&](double amplitude) {
    const int kmax = degree(rng);
    std::vector<double> packed(2 * kmax + 1, 0.0);
    for (int k = 2; k <= kmax; ++k) {
      packed[2 * k - 1] = amplitude * uni(rng) / (k * k);
      packed[2 * k] = amplitude * uni(rng) / (k * k);
    }
    return BoundaryProfile::fourier(packed);
  };
  int bound_failures = 0;
  for (int s = 0; s < 200; ++s) {
    const HoledDomain d = project_constraints(HoledDomain(g2, random_profile(0.05), random_profile(0.05)));
    const double size = std::max(d.outer.w1inf_norm(), d.inner.w1inf_norm());
    const auto r = lemma_checks(d, size * (1.0 + 1e-9));
    bound_failures += (r.poincare_holds && r.sup_bound_holds && r.gradient_bound_holds) ? 0 : 1;
  }

  std::vector<double> residual;
  for (double e : {0.04, 0.02, 0.01}) {
    const HoledDomain d(g2, BoundaryProfile::fourier({0.0, 0.0, 0.0, 0.6 * e, 0.0, 0.0, 0.0, 0.3 * e, 0.0}),
                        BoundaryProfile::fourier({0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5 * e, 0.0}));
    residual.push_back(lemma_checks(project_constraints(d), 3.0 * e).perimeter_expansion_ratio);
  }
  const double s1 = log2_slope(residual[0], residual[1]);
  const double s2 = log2_slope(residual[1], residual[2]);
  const bool linear = std::abs(s1 - 1.0) <= 0.1 && std::abs(s2 - 1.0) <= 0.1;
  return {poincare_err <= 1e-12 && bound_failures == 0 && linear,
          fmt("harmonic Poincare error %.1e; 200 random profiles, %d bound failures; expansion slopes %.3f, %.3f",
              poincare_err, bound_failures, s1, s2)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const std::array<Criterion, 9> criteria = {{
      {"bessel_identity_suite", bessel_identities},
      {"shell_vs_fem_oracle", shell_vs_fem},
      {"steklov_radial_certificates", steklov_certificates},
      {"web_function_identity", web_identity},
      {"reverse_isoperimetric_sweep", isoperimetric_sweep},
      {"inner_stability", inner_stability},
      {"steklov_quantitative_gap", steklov_gap},
      {"hybrid_asymmetry", hybrid_asymmetry_branches},
      {"lemma_suite", lemma_suite},
  }};
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.passed ? 0 : 1;
    std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
