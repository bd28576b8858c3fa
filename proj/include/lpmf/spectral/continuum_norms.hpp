#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lpmf {

struct QuadratureError : std::runtime_error {
  double error_estimate;
  QuadratureError(const std::string& what, double err)
      : std::runtime_error(what + " (error estimate " + std::to_string(err) + ")"), error_estimate(err) {}
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive 61-point Gauss-Kronrod on [a, b] (b may be +inf).
template <class F>
QuadratureResult integrate(F f, double a, double b, double abs_tol = 1e-12, unsigned max_depth = 15) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  // Boost's termination is relative; the absolute target is checked below.
  double v = gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, 1e-12, &err);
  if (!std::isfinite(v) || err > std::max(abs_tol, 1e-13 * std::abs(v)))
    throw QuadratureError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]",
                          err);
  return {v, err};
}

struct ContinuumNorms {
  double gK_norm_sq = 0.0;
  double bK_norm_sq = 0.0;
  double kbK_norm_sq = 0.0;
  double error_estimate = 0.0;
};

// Squared L^2(R^3) norms of G_{K,x}, B_{K,x} and |k| B_{K,x}; the angular
// integral contributes 4 pi and the anchor drops out.
inline ContinuumNorms continuum_norms(double K, double abs_tol = 1e-10) {
  if (!(K > 0.0)) throw std::invalid_argument("continuum_norms: K must be positive");
  constexpr double four_pi = 4.0 * std::numbers::pi;
  const double inf = std::numeric_limits<double>::infinity();
  auto g = integrate([](double) { return 1.0; }, 0.0, K, abs_tol / four_pi);
  auto b = integrate([](double k) { double q = 1.0 + k * k; return 1.0 / (q * q); }, K, inf, abs_tol / four_pi);
  auto kb = integrate([](double k) { double q = 1.0 + k * k; return k * k / (q * q); }, K, inf, abs_tol / four_pi);
  ContinuumNorms out;
  out.gK_norm_sq = four_pi * g.value;
  out.bK_norm_sq = four_pi * b.value;
  out.kbK_norm_sq = four_pi * kb.value;
  out.error_estimate = four_pi * (g.error + b.error + kb.error);
  return out;
}

}  // namespace lpmf
