#pragma once

#include "lpmf/fock/operators.hpp"

#include <Eigen/Eigenvalues>

namespace lpmf {

// gamma(x, y) = N^{-1} <Psi, c_y^dag c_x Psi>, phonons traced out.
inline CMat reduced_density(const ManyBodyBasis& basis, const HopTable& table, const CVec& psi) {
  const int S = basis.particles().sites();
  const std::size_t P = basis.block();
  CMat g = CMat::Zero(S, S);
  for (std::size_t c = 0; c < table.configs(); ++c)
    for (const auto* e = table.begin(c); e != table.end(c); ++e) {
      if (e->factor == 0.0) continue;
      const cplx amp = psi.segment(static_cast<Eigen::Index>(e->target * P), P)
                           .dot(psi.segment(static_cast<Eigen::Index>(c * P), P));
      g(e->from, e->to) += e->factor * amp;
    }
  g /= static_cast<double>(basis.particles().particles());
  return 0.5 * (g + g.adjoint());
}

// Tr |gamma - |psi><psi|| by hermitian eigendecomposition.
inline double trace_distance(const CMat& gamma, const CVec& psi) {
  CMat d = gamma - psi * psi.adjoint();
  d = 0.5 * (d + d.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(d, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// <Psi, q_1 Psi> = 1 - <psi, gamma psi>.
inline double depletion(const CMat& gamma, const CVec& psi) {
  return std::max(0.0, 1.0 - psi.dot(gamma * psi).real());
}

}  // namespace lpmf
