#include "elnet/delay.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace elnet {

Delay Delay::polynomial(double a, double b, int degree) {
  if (degree < 1) throw std::invalid_argument("polynomial delay degree must be at least 1");
  Delay d;
  d.a_ = a;
  d.b_ = b;
  d.degree_ = degree;
  return d;
}

Delay Delay::custom(std::function<double(double)> tau, std::function<double(double)> derivative) {
  if (!tau) throw std::invalid_argument("custom delay needs a callable");
  Delay d;
  d.tau_ = std::move(tau);
  d.dtau_ = std::move(derivative);
  return d;
}

double Delay::operator()(double x) const {
  if (tau_) return tau_(x);
  return degree_ == 1 ? a_ * x + b_ : a_ * std::pow(x, degree_) + b_;
}

double Delay::derivative(double x) const {
  if (tau_) {
    if (dtau_) return dtau_(x);
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    const double lo = std::max(0.0, x - h);
    return (tau_(x + h) - tau_(lo)) / (x + h - lo);
  }
  return degree_ == 1 ? a_ : degree_ * a_ * std::pow(x, degree_ - 1);
}

double Delay::primitive(double x) const {
  if (!tau_) return a_ * std::pow(x, degree_ + 1) / (degree_ + 1) + b_ * x;
  if (x <= 0.0) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(tau_, 0.0, x, 15, 1e-12,
                                                                         &error);
}

Delay Delay::scaled_congestion(double u) const {
  if (u < 0.0) throw std::invalid_argument("intervention magnitude must be nonnegative");
  if (!tau_) return polynomial(a_ / (1.0 + u), b_, degree_);
  const double base = tau_(0.0);
  auto tau = [f = tau_, base, u](double x) { return base + (f(x) - base) / (1.0 + u); };
  std::function<double(double)> dtau;
  if (dtau_) dtau = [g = dtau_, u](double x) { return g(x) / (1.0 + u); };
  return custom(tau, dtau);
}

}  // namespace elnet
