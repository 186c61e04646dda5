#pragma once

// Bessel functions J, Y, I, K of non-negative integer and half-integer order.

namespace shellstab::specfun {

// Order of a Bessel function. Only non-negative integers and half-integers up
// to kMaxOrder are representable.
class BesselOrder {
 public:
  static constexpr double kMaxOrder = 20.0;

  explicit BesselOrder(double nu);

  double value() const { return nu_; }
  int twice() const { return twice_; }
  bool is_integer() const { return twice_ % 2 == 0; }

  BesselOrder next() const { return BesselOrder(nu_ + 1.0); }

 private:
  double nu_;
  int twice_;
};

double bessel_j(BesselOrder nu, double x);
double bessel_y(BesselOrder nu, double x);
double bessel_i(BesselOrder nu, double x);
double bessel_k(BesselOrder nu, double x);

// Exponentially scaled variants: e^{-x} I_nu(x) and e^{x} K_nu(x).
double bessel_i_scaled(BesselOrder nu, double x);
double bessel_k_scaled(BesselOrder nu, double x);

namespace detail {
// Individual evaluation branches, exposed so the switchover can be tested.
double i_scaled_series(double nu, double x);
double i_scaled_asymptotic(double nu, double x);
double jy_hankel_j(double nu, double x);
double jy_hankel_y(double nu, double x);
double j_miller(int n, double x);
inline constexpr double kISwitch = 20.0;
inline constexpr double kJYSwitch = 25.0;
}  // namespace detail

}  // namespace shellstab::specfun
