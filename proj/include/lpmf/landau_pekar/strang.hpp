#pragma once

#include "lpmf/spectral/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace lpmf {

// Exact flow of i d/ds phi = phi + S for fixed source S.
inline void rotate_with_source(CVec& phi, const CVec& S, double s) {
  const cplx ph = std::polar(1.0, -s);
  phi = ph * (phi + S) - S;
}

// One symmetric step for the coupled system
//   i d/dt psi = (T + sqrt(alpha) Phi[phi]) psi,   i d/dt phi = phi + S[|psi|^2].
// Ops supplies:
//   kinetic(psi, tau)        exact free flow exp(-i tau T)
//   source(psi)    -> CVec   S = sqrt(alpha) |k|^{-1} rho_hat
//   potential(phi) -> RVec   Phi(x)
//   sqrt_alpha()
// The potential substep leaves |psi| unchanged, so the source computed after
// the first kinetic half-step stays exact for the whole coupled substep and
// the step is time reversible: step(dt) followed by step(-dt) is the identity.
template <class Ops>
void strang_step(const Ops& ops, CVec& psi, CVec& phi, double dt) {
  ops.kinetic(psi, 0.5 * dt);
  const CVec S = ops.source(psi);
  rotate_with_source(phi, S, 0.5 * dt);
  const RVec V = ops.potential(phi);
  const double g = dt * ops.sqrt_alpha();
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] *= std::polar(1.0, -g * V[i]);
  rotate_with_source(phi, S, 0.5 * dt);
  ops.kinetic(psi, 0.5 * dt);
}

}  // namespace lpmf
