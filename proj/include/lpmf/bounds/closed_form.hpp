#pragma once

#include "lpmf/bounds/report.hpp"
#include "lpmf/spectral/continuum_norms.hpp"

#include <numbers>

namespace lpmf {

// Antiderivatives of the radial integrands of ||B_K||^2 and || |k| B_K ||^2.
inline double bK_norm_sq_closed(double K) {
  const double pi = std::numbers::pi;
  return 4.0 * pi * 0.5 * (pi / 2.0 - std::atan(K) - K / (1.0 + K * K));
}

inline double kbK_norm_sq_closed(double K) {
  const double pi = std::numbers::pi;
  return 4.0 * pi * 0.5 * (pi / 2.0 - std::atan(K) + K / (1.0 + K * K));
}

inline std::vector<InequalityReport> verify_form_factor_norms(const std::vector<double>& K_list,
                                                              double rel_tol = 1e-8) {
  const double four_pi = 4.0 * std::numbers::pi;
  std::vector<InequalityReport> out;
  for (double K : K_list) {
    if (!(K > 0.0)) throw std::invalid_argument("verify_form_factor_norms: K must be positive");
    const ContinuumNorms n = continuum_norms(K);
    auto make = [&](std::string name, double lhs, double rhs, double margin, double slack) {
      InequalityReport r;
      r.name = std::move(name);
      r.lhs = {lhs};
      r.rhs = {rhs};
      r.margin = margin;
      r.slack = slack;
      r.context["K"] = K;
      r.context["quadrature_error"] = n.error_estimate;
      r.decide();
      out.push_back(r);
    };
    const double g = four_pi * K;
    make("gK_norm_identity", n.gK_norm_sq, g, rel_tol * g - std::abs(n.gK_norm_sq - g), 0.0);
    make("bK_norm_bound", n.bK_norm_sq, four_pi / (K * K * K), four_pi / (K * K * K) - n.bK_norm_sq,
         1e-12 * four_pi / (K * K * K));
    make("kbK_norm_bound", n.kbK_norm_sq, four_pi / K, four_pi / K - n.kbK_norm_sq, 1e-12 * four_pi / K);
    const double bc = bK_norm_sq_closed(K), kbc = kbK_norm_sq_closed(K);
    make("bK_closed_form", n.bK_norm_sq, bc, rel_tol * bc - std::abs(n.bK_norm_sq - bc), 0.0);
    make("kbK_closed_form", n.kbK_norm_sq, kbc, rel_tol * kbc - std::abs(n.kbK_norm_sq - kbc), 0.0);
  }
  return out;
}

// I(p) = int d^3k / (k^2 (1 + (p + k)^2)) after the angular integration:
//   I(p) = int_0^inf dk (pi / (p k)) log((1 + (p + k)^2) / (1 + (p - k)^2)),  I(0) = 4 pi int dk / (1 + k^2).
inline QuadratureResult cg_integral(double p, double abs_tol = 1e-10) {
  const double pi = std::numbers::pi;
  const double inf = std::numeric_limits<double>::infinity();
  if (p == 0.0) {
    auto r = integrate([](double k) { return 1.0 / (1.0 + k * k); }, 0.0, inf, abs_tol / (4.0 * pi));
    return {4.0 * pi * r.value, 4.0 * pi * r.error};
  }
  auto f = [p, pi](double k) {
    if (k == 0.0) return 4.0 * pi / (1.0 + p * p);
    const double num = 1.0 + (p + k) * (p + k), den = 1.0 + (p - k) * (p - k);
    return pi / (p * k) * std::log1p((num - den) / den);
  };
  auto a = integrate(f, 0.0, p, abs_tol / 2);
  auto b = integrate(f, p, inf, abs_tol / 2);
  return {a.value + b.value, a.error + b.error};
}

struct CGConstant {
  double value_at_p0 = 0.0;
  double sup_over_p = 0.0;
  double argmax_p = 0.0;
  double quoted_rhs = 0.0;
  double error_estimate = 0.0;
  bool monotone_decay = true;
  std::vector<double> p_grid;
  std::vector<double> values;
};

inline CGConstant compute_cg_constant(double p_max = 10.0, int points = 81) {
  CGConstant c;
  c.quoted_rhs = 4.0 * std::numbers::pi;  // 4 pi int_0^inf dk / (1 + k)^2
  for (int i = 0; i < points; ++i) {
    const double p = p_max * i / (points - 1);
    const QuadratureResult r = cg_integral(p);
    c.p_grid.push_back(p);
    c.values.push_back(r.value);
    c.error_estimate = std::max(c.error_estimate, r.error);
    if (r.value > c.sup_over_p) {
      c.sup_over_p = r.value;
      c.argmax_p = p;
    }
    if (i > 0 && r.value > c.values[i - 1]) c.monotone_decay = false;
  }
  c.value_at_p0 = c.values.front();
  return c;
}

}  // namespace lpmf
