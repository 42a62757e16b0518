#pragma once

#include <functional>
#include <optional>

namespace elnet {

/// Link delay τ(x). Polynomial delays a·x^degree + b carry their coefficients
/// so that interventions and primitives stay in closed form; anything else is
/// a custom callable.
class Delay {
 public:
  Delay() = default;
  static Delay affine(double a, double b) { return polynomial(a, b, 1); }
  static Delay polynomial(double a, double b, int degree);
  /// `derivative` is optional; a central difference is used when absent.
  static Delay custom(std::function<double(double)> tau,
                      std::function<double(double)> derivative = {});

  double operator()(double x) const;
  double derivative(double x) const;
  /// ∫_0^x τ, closed form for polynomials, adaptive quadrature otherwise.
  double primitive(double x) const;
  double free_flow() const { return (*this)(0.0); }

  bool is_polynomial() const { return !tau_; }
  bool is_affine() const { return is_polynomial() && degree_ == 1; }
  double a() const { return a_; }
  double b() const { return b_; }
  int degree() const { return degree_; }

  /// τ(0) + (τ(x) − τ(0))/(1 + u): the congestion term shrunk by an
  /// intervention of magnitude u.
  Delay scaled_congestion(double u) const;

 private:
  double a_ = 1.0;
  double b_ = 0.0;
  int degree_ = 1;
  std::function<double(double)> tau_;
  std::function<double(double)> dtau_;
};

}  // namespace elnet
