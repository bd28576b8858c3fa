#pragma once

#include "lpmf/fock/model_spec.hpp"

#include <numbers>

namespace lpmf {

// 3^3 sites on a box of side 2 pi / 3 (|k| = 3 on the first shell), N = 2,
// the six first-shell modes, Lambda = 3, alpha = 1, K = 3.
inline ModelSpec desk_spec() {
  ModelSpec s;
  s.sites = BoxLattice(2.0 * std::numbers::pi / 3.0, 3, 3);
  s.n_particles = 2;
  s.modes = lowest_shell_modes(3, 1);
  s.phonon_cutoff = 3;
  s.alpha = 1.0;
  s.K = 3.0;
  return s;
}

// 2^3 sites on a box of side 2 pi with axis modes at odd radii up to 51, so
// B_K has support across a decade of K.
inline ModelSpec scaling_spec() {
  ModelSpec s;
  s.sites = BoxLattice(2.0 * std::numbers::pi, 2, 3);
  s.n_particles = 1;
  s.modes = axis_modes(3, {1, 5, 9, 15, 21, 31, 51});
  s.phonon_cutoff = 2;
  s.alpha = 1.0;
  s.K = 5.0;
  return s;
}

inline std::vector<double> scaling_K_list() { return {5, 9, 15, 21, 31, 51}; }

// 2^3 sites on a box of side 4 pi, six modes with |k| = 1/2, weak coupling and
// K above the retained modes.
inline ModelSpec mean_field_spec(int N = 1) {
  ModelSpec s;
  s.sites = BoxLattice(4.0 * std::numbers::pi, 2, 3);
  s.n_particles = N;
  s.modes = lowest_shell_modes(3, 1);
  s.phonon_cutoff = 6;
  s.alpha = 0.25;
  s.K = 1.0;
  return s;
}

// Normalized one-particle vector with a peak at site 0 and a complex bump
// at site S/2 - 1 (used as default condensate wave function).
inline CVec peaked_psi(std::size_t sites) {
  CVec psi = CVec::Ones(static_cast<Eigen::Index>(sites));
  psi[0] = 2.0;
  if (sites > 2) psi[static_cast<Eigen::Index>(sites / 2 - 1)] = cplx(1.0, 0.5);
  psi.normalize();
  return psi;
}

}  // namespace lpmf
