#include "shellstab/asymmetry.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "shellstab/errors.hpp"
#include "shellstab/numerics.hpp"

namespace shellstab {

namespace {

constexpr double kPi = std::numbers::pi;

double toms748_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) {
    return lo;
  }
  if (fhi == 0.0) {
    return hi;
  }
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw ConvergenceError("root bracket does not change sign");
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

Point direction_of(int n, double theta, double phi) {
  if (n == 2) {
    return Point(std::cos(theta), std::sin(theta), 0.0);
  }
  const double s = std::sin(theta);
  return Point(s * std::cos(phi), s * std::sin(phi), std::cos(theta));
}

double profile_value(const BoundaryProfile& u, double theta, double phi) {
  return u.dimension() == 2 ? u.value_planar(theta) : u.spherical_jet(theta, phi).value;
}

// Composite Gauss-Legendre integration of g(d(r e)) r^{n-1} along a ray.
class RayRule {
 public:
  RayRule(const ConvexBody& body, int panels) : body_(body), n_(body.dimension()), panels_(std::max(panels, 1)) {
    rule_ = numerics::gauss_legendre(12);
  }

  double distance(const Point& e, double r) const { return body_.boundary_distance(r * e); }

  // First radius in [a, b] where the distance drops to `level`; b if it never
  // does and a if it starts below.
  double crossing(const Point& e, double a, double b, double level) const {
    if (distance(e, a) <= level) {
      return a;
    }
    if (distance(e, b) >= level) {
      return b;
    }
    return numerics::bisect([&](double r) { return distance(e, r) - level; }, a, b, 1e-14 * b);
  }

  // g maps a distance to a scalar or a fixed-size Eigen vector.
  template <class G>
  auto segment(const Point& e, double a, double b, const G& g) const {
    using Value = decltype(g(0.0));
    Value total = Value(g(0.0) * 0.0);
    if (!(b > a)) {
      return total;
    }
    const double h = (b - a) / panels_;
    for (int p = 0; p < panels_; ++p) {
      const double mid = a + (p + 0.5) * h;
      for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
        const double r = mid + 0.5 * h * rule_.nodes[i];
        total += rule_.weights[i] * g(distance(e, r)) * std::pow(r, n_ - 1);
      }
    }
    return Value(0.5 * h * total);
  }

 private:
  const ConvexBody& body_;
  int n_;
  int panels_;
  numerics::QuadratureRule rule_;
};

int default_directions(int n) { return n == 2 ? 512 : 12; }

double hole_level(const HoledDomain& domain) {
  return parallel_level_for_volume(domain.outer, domain.geom, domain.hole_volume());
}

// Below this radius every point is at distance >= level from the outer boundary.
double core_radius(const HoledDomain& domain, double level) {
  return std::max(0.0, domain.geom.r2 - domain.outer.sup_norm() - level);
}

HoleIntegral band_by_rays(const HoledDomain& domain, const ConvexBody& body, double t, double cutoff,
                          const std::function<double(double)>& integrand, const HoleIntegrationOptions& options) {
  const int n = domain.geom.n;
  const int count = options.directions > 0 ? options.directions : default_directions(n);
  const auto q = sphere_quadrature(n, count);
  const RayRule ray(body, options.panels);
  const double core = core_radius(domain, cutoff);
  auto band = [&](double d) -> double { return d <= t ? integrand(d) : 0.0; };
  HoleIntegral out;
  out.t_level = t;
  out.method = HoleIntegration::rays;
  out.samples = static_cast<int>(q.weight.size());
  for (std::size_t i = 0; i < q.weight.size(); ++i) {
    const double phi = n == 2 ? 0.0 : q.phi[i];
    const Point e = direction_of(n, q.theta[i], phi);
    const double edge = domain.geom.r1 + profile_value(domain.inner, q.theta[i], phi);
    if (edge <= core) {
      continue;
    }
    const double start = ray.crossing(e, core, edge, cutoff);
    out.value += q.weight[i] * ray.segment(e, start, edge, band);
  }
  return out;
}

HoleIntegral band_by_monte_carlo(const HoledDomain& domain, const ConvexBody& body, double t, double cutoff,
                                 const std::function<double(double)>& integrand,
                                 const HoleIntegrationOptions& options) {
  const int n = domain.geom.n;
  const double core = core_radius(domain, cutoff);
  const double core_pow = std::pow(core, n);
  const int per_stratum = 4;
  const int strata = std::max(1, options.samples / per_stratum);
  int bands = 1;
  int azimuths = strata;
  if (n == 3) {
    bands = std::max(1, static_cast<int>(std::lround(std::sqrt(strata / 2.0))));
    azimuths = 2 * bands;
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  HoleIntegral out;
  out.t_level = t;
  out.method = HoleIntegration::monte_carlo;
  out.seed = options.seed;
  double variance = 0.0;
  const double dphi = 2.0 * kPi / azimuths;
  const double dcos = 2.0 / bands;
  const double cell = n == 2 ? dphi : dphi * dcos;
  for (int b = 0; b < bands; ++b) {
    for (int a = 0; a < azimuths; ++a) {
      double sum = 0.0;
      double sum_sq = 0.0;
      for (int k = 0; k < per_stratum; ++k) {
        const double phi = (a + uni(rng)) * dphi;
        double theta = phi;
        double azimuth = 0.0;
        if (n == 3) {
          theta = std::acos(std::clamp(1.0 - (b + uni(rng)) * dcos, -1.0, 1.0));
          azimuth = phi;
        }
        const double edge = domain.geom.r1 + profile_value(domain.inner, theta, azimuth);
        const double edge_pow = std::pow(edge, n);
        const double s = uni(rng);
        double y = 0.0;
        if (edge > core) {
          const double r = std::pow(core_pow + s * (edge_pow - core_pow), 1.0 / n);
          const double d = body.boundary_distance(r * direction_of(n, theta, azimuth));
          if (d <= t) {
            y = cell * (edge_pow - core_pow) / n * integrand(d);
          }
        }
        sum += y;
        sum_sq += y * y;
        ++out.samples;
      }
      const double mean = sum / per_stratum;
      out.value += mean;
      variance += std::max(0.0, sum_sq / per_stratum - mean * mean) / (per_stratum - 1);
    }
  }
  out.standard_error = std::sqrt(variance);
  return out;
}

}  // namespace

WebFunction::WebFunction(const ShellGeometry& geom) : eig_(shell_eigenfunction(geom)) {}

WebFunction build_web_function(const ShellGeometry& geom) {
  geom.validate();
  return WebFunction(geom);
}

double WebFunction::value(double s) const {
  if (!(s >= 0.0)) {
    throw PreconditionError("WebFunction: distance must be nonnegative");
  }
  return s < width() ? eig_.psi(geometry().r2 - s) : z_m();
}

double WebFunction::slope(double s) const {
  if (!(s >= 0.0)) {
    throw PreconditionError("WebFunction: distance must be nonnegative");
  }
  return s < width() ? eig_.psi_prime(geometry().r2 - s) : 0.0;
}

double WebFunction::excess(double s) const {
  if (s >= width()) {
    return 0.0;
  }
  const double w = value(s);
  const double g = slope(s);
  return std::max(0.0, g * g + w * w - z_m() * z_m());
}

double WebFunction::radius_at_level(double t) const {
  const ShellGeometry& g = geometry();
  if (t <= z_m()) {
    return g.r1;
  }
  if (t >= z_M()) {
    return g.r2;
  }
  return toms748_root([&](double r) { return eig_.psi(r) - t; }, g.r1, g.r2);
}

double WebFunction::level_distance(double t) const {
  if (!(t >= z_m() && t <= z_M())) {
    throw PreconditionError("WebFunction::level_distance: level outside [z_m, z_M]");
  }
  if (t == z_M()) {
    return 0.0;
  }
  // tau = z_m + span sigma^2 absorbs the inverse square-root singularity of
  // 1/|grad z| at the bottom level.
  const double span = z_M() - z_m();
  auto integrand = [&](double sigma) {
    const double tau = z_m() + span * sigma * sigma;
    const double l = eig_.psi_prime(radius_at_level(tau));
    return l > 0.0 ? 2.0 * span * sigma / l : 0.0;
  };
  return numerics::integrate(integrand, std::sqrt((t - z_m()) / span), 1.0, 1e-11);
}

double WebFunction::value_by_quadrature(double s) const {
  if (!(s >= 0.0)) {
    throw PreconditionError("WebFunction: distance must be nonnegative");
  }
  if (s == 0.0) {
    return z_M();
  }
  if (s >= width()) {
    return z_m();
  }
  return toms748_root([&](double t) { return level_distance(t) - s; }, z_m(), z_M());
}

WebValue evaluate_web(const WebFunction& web, const ConvexBody& outer, const Point& x) {
  if (outer.dimension() != web.geometry().n) {
    throw PreconditionError("evaluate_web: dimension mismatch");
  }
  const double d = outer.boundary_distance(x);
  return {web.value(d), web.slope(d)};
}

WebValue evaluate_web(const WebFunction& web, const BoundaryProfile& outer, const Point& x) {
  return evaluate_web(web, ConvexBody(outer, web.geometry().r2), x);
}

HoleIntegral hole_band_integral(const HoledDomain& domain, const WebFunction& web,
                                const std::function<double(double)>& integrand,
                                const HoleIntegrationOptions& options) {
  domain.validate();
  if (!(domain.hole_volume() < domain.outer_volume())) {
    throw PreconditionError("hole_band_integral: hole volume must be below the outer volume");
  }
  const double t = hole_level(domain);
  const double cutoff = std::min(t, web.width());
  const ConvexBody body(domain.outer, domain.geom.r2);
  HoleIntegration method = options.method;
  if (method == HoleIntegration::automatic) {
    method = domain.geom.n == 2 ? HoleIntegration::rays : HoleIntegration::monte_carlo;
  }
  return method == HoleIntegration::rays ? band_by_rays(domain, body, t, cutoff, integrand, options)
                                         : band_by_monte_carlo(domain, body, t, cutoff, integrand, options);
}

HoleIntegral weak_fraenkel_estimate(const HoledDomain& domain, const WebFunction& web,
                                    const HoleIntegrationOptions& options) {
  return hole_band_integral(domain, web, [&](double d) { return web.excess(d); }, options);
}

double weak_fraenkel_asymmetry(const HoledDomain& domain, const WebFunction& web) {
  return weak_fraenkel_estimate(domain, web).value;
}

double g_modulus(double s, int n) {
  if (!(s >= 0.0)) {
    throw PreconditionError("g_modulus: argument must be nonnegative");
  }
  if (n < 2) {
    throw PreconditionError("g_modulus: dimension must be at least 2");
  }
  if (n == 2) {
    return s * s;
  }
  if (n >= 4) {
    return std::pow(s, 0.5 * (n + 1));
  }
  if (s == 0.0) {
    return 0.0;
  }
  const double target = s * s;
  const double peak = std::exp(-1.0);
  auto f = [](double t) { return std::sqrt(t * std::log(1.0 / t)); };
  if (target > f(peak)) {
    std::ostringstream os;
    os << "g_modulus: s^2 = " << target << " exceeds the maximum " << f(peak) << " of sqrt(t log(1/t))";
    throw DomainError(os.str());
  }
  if (target == f(peak)) {
    return peak;
  }
  return numerics::bisect([&](double t) { return f(t) - target; }, 0.0 + std::numeric_limits<double>::min(), peak,
                          1e-17);
}

std::string AsymmetryReport::to_record() const {
  std::ostringstream os;
  os.precision(17);
  os << "hausdorff_asym=" << hausdorff_asym << "\n"
     << "g_of_asym=" << g_of_asym << "\n"
     << "weak_fraenkel=" << weak_fraenkel << "\n"
     << "weak_fraenkel_error=" << weak_fraenkel_error << "\n"
     << "alpha=" << alpha << "\n"
     << "t_level=" << t_level << "\n"
     << "z_m=" << z_m << "\n"
     << "z_M=" << z_M << "\n"
     << "seed=" << seed << "\n";
  return os.str();
}

AsymmetryReport hybrid_asymmetry(const HoledDomain& domain, const HoleIntegrationOptions& options) {
  domain.validate();
  const WebFunction web(domain.geom);
  AsymmetryReport r;
  r.hausdorff_asym = hausdorff_asymmetry(domain.outer, domain.geom);
  r.g_of_asym = g_modulus(r.hausdorff_asym, domain.geom.n);
  const auto fraenkel = weak_fraenkel_estimate(domain, web, options);
  r.weak_fraenkel = fraenkel.value;
  r.weak_fraenkel_error = fraenkel.standard_error;
  r.t_level = fraenkel.t_level;
  r.seed = fraenkel.seed;
  r.alpha = std::max(r.g_of_asym, r.weak_fraenkel);
  r.z_m = web.z_m();
  r.z_M = web.z_M();
  return r;
}

InnerStability inner_stability_check(const HoledDomain& domain, double lambda_omega, double tolerance,
                                     const HoleIntegrationOptions& options) {
  const WebFunction web(domain.geom);
  const double lambda_shell = web.eigenpair().lambda1();
  InnerStability out;
  out.weak_fraenkel = weak_fraenkel_estimate(domain, web, options).value;
  out.gap = lambda_shell - lambda_omega;
  out.bound = std::min(1.0, std::abs(lambda_shell)) * out.weak_fraenkel;
  out.holds = out.gap >= out.bound - tolerance;
  return out;
}

WebRayleigh web_rayleigh_bounds(const HoledDomain& domain, const WebFunction& web,
                                const HoleIntegrationOptions& options) {
  domain.validate();
  const ShellGeometry& g = domain.geom;
  const int n = g.n;
  const ConvexBody body(domain.outer, g.r2);
  const int count = options.directions > 0 ? options.directions : default_directions(n);
  const auto q = sphere_quadrature(n, count);
  const RayRule ray(body, options.panels);
  WebRayleigh out;
  for (std::size_t i = 0; i < q.weight.size(); ++i) {
    const double phi = n == 2 ? 0.0 : q.phi[i];
    const Point e = direction_of(n, q.theta[i], phi);
    const double inner = g.r1 + profile_value(domain.inner, q.theta[i], phi);
    const double outer = g.r2 + profile_value(domain.outer, q.theta[i], phi);
    const double split = ray.crossing(e, inner, outer, web.width());
    for (auto [a, b] : {std::pair{inner, split}, std::pair{split, outer}}) {
      const Eigen::Vector2d part = ray.segment(e, a, b, [&](double d) {
        const double s = web.slope(d);
        const double w = web.value(d);
        return Eigen::Vector2d(s * s, w * w);
      });
      out.gradient += q.weight[i] * part[0];
      out.mass += q.weight[i] * part[1];
    }
  }
  out.boundary = web.z_M() * web.z_M() * body.perimeter();
  out.reference_boundary = web.z_M() * web.z_M() * g.outer_sphere_area();
  out.rq = (out.gradient + g.beta * out.boundary) / out.mass;
  out.lambda_shell = web.eigenpair().lambda1();
  const double band_grad = hole_band_integral(domain, web, [&](double d) {
                             const double s = web.slope(d);
                             return s * s;
                           }, options).value;
  const double band_mass = hole_band_integral(domain, web, [&](double d) {
                             const double w = web.value(d);
                             return w * w - web.z_m() * web.z_m();
                           }, options).value;
  out.chain_bound = (out.lambda_shell - band_grad) / (1.0 - band_mass);
  return out;
}

}  // namespace shellstab
