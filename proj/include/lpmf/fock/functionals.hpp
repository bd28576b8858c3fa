#pragma once

#include "lpmf/fock/density.hpp"
#include "lpmf/fock/states.hpp"

#include <string>
#include <tuple>
#include <vector>

namespace lpmf {

struct FunctionalReport {
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double beta_a = 0.0;
  double beta_b = 0.0;
  double beta_c = 0.0;
  double trace_dist = 0.0;
  double energy_per_particle = 0.0;
  double energy_reference = 0.0;
  double grad_q_norm = 0.0;
  bool grad_q_applicable = false;
  double leakage = 0.0;
  std::vector<std::string> warnings;

  double beta() const { return beta_a + beta_b + beta_c; }
};

// N^{-1} <W^*(sqrt(N) phi) v, Nph W^*(sqrt(N) phi) v>, plus the top-shell mass
// of the shifted vector.
inline std::pair<double, double> shifted_phonon_number(const ManyBodyBasis& basis, const CVec& v, const CVec& phi) {
  const double N = basis.spec().n_particles;
  const CVec s = apply_weyl(basis, -std::sqrt(N) * phi, v);
  return {mean_phonon_number(basis, s) / N, top_shell_mass(basis, s)};
}

// ||N^{-1} (H - <H>) v||^2
template <class Op>
inline double energy_variance(const Op& H, const CVec& v, int N, double* mean = nullptr) {
  CVec Hv = apply_op(H, v);
  const double e = v.dot(Hv).real();
  if (mean) *mean = e;
  return (Hv - e * v).squaredNorm() / (double(N) * N);
}

// <Phi, q_1 (-D_2^2) q_1 Phi> for a symmetric state, from
//   sum_{i != j} q_i M_j = dGamma(q) dGamma(M) - dGamma(q M).
inline double grad_q_norm(const ManyBodyBasis& basis, const HopTable& table, const CVec& v, const CVec& psi) {
  const int N = basis.spec().n_particles;
  if (N < 2) return 0.0;
  const int S = basis.particles().sites();
  const CMat q = CMat::Identity(S, S) - psi * psi.adjoint();
  const CMat M = central_gradient_sq(basis.spec().sites).cast<cplx>();
  CVec qv, mv, qmv;
  apply_one_body(basis, table, q, v, qv);
  apply_one_body(basis, table, M, v, mv);
  apply_one_body(basis, table, CMat(q * M), v, qmv);
  const double val = (qv.dot(mv) - v.dot(qmv)).real() / (double(N) * (N - 1));
  return std::max(val, 0.0);
}

// All functionals of a many-body state against a classical pair (psi, phi):
// psi on the particle sites (l2-normalized), phi on the retained modes.
inline FunctionalReport functional_report(const FockModel& model, const CVec& state, const CVec& psi,
                                          const CVec& phi, double energy_reference = 0.0, double t = 0.0,
                                          double leakage_tolerance = 1e-6) {
  const ManyBodyBasis& basis = *model.basis;
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw std::invalid_argument("functional_report: psi must be normalized");
  const int N = model.particles();
  FunctionalReport r;
  r.t = t;
  r.energy_reference = energy_reference;

  const CMat gamma = reduced_density(basis, model.hops, state);
  r.trace_dist = trace_distance(gamma, psi);
  r.a = r.trace_dist;
  double shifted_leak = 0.0;
  std::tie(r.b, shifted_leak) = shifted_phonon_number(basis, state, phi);

  double e = 0.0;
  r.c = energy_variance(model.HF, state, N, &e);
  r.beta_c = r.c;
  r.energy_per_particle = e / N;

  const CVec us = model.U.forward(state);
  const CMat gu = reduced_density(basis, model.hops, us);
  r.beta_a = depletion(gu, psi);
  double gross_leak = 0.0;
  std::tie(r.beta_b, gross_leak) = shifted_phonon_number(basis, us, phi);

  r.grad_q_applicable = N >= 2;
  r.grad_q_norm = r.grad_q_applicable ? grad_q_norm(basis, model.hops, us, psi) : 0.0;
  if (!r.grad_q_applicable) r.warnings.push_back("grad_q_norm not applicable for N = 1");

  r.leakage = std::max({top_shell_mass(basis, state), shifted_leak, gross_leak});
  if (r.leakage > leakage_tolerance)
    r.warnings.push_back("phonon top-shell mass " + std::to_string(r.leakage) + " above tolerance");
  return r;
}

}  // namespace lpmf
