#pragma once

namespace shellstab {

// Radial Steklov-Neumann data on the shell R1 < |x| < R2: the Bessel pair
// eta, mu, the integrand weights h = r^{2-n} eta^2 and f = r^{2-n} eta mu, and
// the boundary coefficients A0, A1, A2 at R2.
class SteklovRadialContext {
 public:
  SteklovRadialContext(int n, double r1, double r2);

  int dimension() const { return n_; }
  double r1() const { return r1_; }
  double r2() const { return r2_; }

  double eta(double r) const;
  double mu(double r) const;
  double eta_prime(double r) const;
  double mu_prime(double r) const;

  double h(double r) const;
  double h_prime(double r) const;
  double h_second(double r) const;
  double f(double r) const;
  double f_prime(double r) const;
  double f_second(double r) const;

  // d/dr (eta/mu); undefined at r = R1 where mu vanishes.
  double eta_over_mu_prime(double r) const;

  double a0() const;
  double a1() const;
  double a2() const;
  // A1 through the quotient identity R2^{n-1} f(R2)^2 (eta/mu)'(R2).
  double a1_from_ratio() const;

  double sigma1() const { return f(r2_) / h(r2_); }

 private:
  int n_;
  double r1_;
  double r2_;
  double k_inner_;
  double i_inner_;
};

// r^{1-n/2} eta(r): radial solution of -Delta w + w = 0 with zero slope at R1.
double radial_solution(int n, double r1, double r);

double sigma1_shell(int n, double r1, double r2);

struct SignCertificates {
  bool a1_negative = false;
  bool combination_positive = false;     // (n-1) R2 A1 + R2^2 A2 + 2n A0 > 0
  bool eta_over_mu_decreasing = false;
  double a1 = 0.0;
  double combination = 0.0;
  double max_ratio_derivative = 0.0;     // largest sampled (eta/mu)'
};

SignCertificates sign_certificates(int n, double r1, double r2);

struct TaylorResiduals {
  double h_outer = 0.0;
  double h_inner = 0.0;
  double f_outer = 0.0;
  double max() const;
};

// Second-order Taylor remainders of h at R2 and R1 and of f at R2, each
// divided by eps * t^2, maximized over offsets |t| <= eps.
TaylorResiduals taylor_residuals(int n, double r1, double r2, double eps);

}  // namespace shellstab
