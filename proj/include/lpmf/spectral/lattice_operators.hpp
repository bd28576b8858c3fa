#pragma once

#include "lpmf/spectral/lattice.hpp"

#include <Eigen/Dense>

namespace lpmf {

using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Cyclic shift along one axis: (S f)(x) = f(x + e_axis dx).
inline RMat shift_matrix(const BoxLattice& lat, int axis, int step = 1) {
  const std::size_t S = lat.size();
  RMat m = RMat::Zero(S, S);
  for (std::size_t i = 0; i < S; ++i) {
    Idx3 idx = lat.unravel(i);
    idx[axis] += step;
    m(i, lat.ravel(idx)) += 1.0;
  }
  return m;
}

// Nearest-neighbour second difference, -sum_a (S_a + S_a^T - 2)/dx^2. Its
// dispersion is sum_a 2(1 - cos(k_a dx))/dx^2, which matches k^2 for small k.
inline RMat lattice_laplacian(const BoxLattice& lat) {
  const std::size_t S = lat.size();
  const double dx2 = lat.spacing() * lat.spacing();
  RMat T = RMat::Zero(S, S);
  for (int a = 0; a < lat.dim(); ++a) {
    RMat sh = shift_matrix(lat, a);
    T -= (sh + sh.transpose()) / dx2;
  }
  T.diagonal().array() += 2.0 * lat.dim() / dx2;
  return T;
}

// Central difference (S_a - S_a^T)/(2 dx); the lattice gradient component.
inline RMat central_difference(const BoxLattice& lat, int axis) {
  RMat sh = shift_matrix(lat, axis);
  return (sh - sh.transpose()) / (2.0 * lat.spacing());
}

// -sum_a D_a^2, the positive operator |grad|^2 built from central differences.
inline RMat central_gradient_sq(const BoxLattice& lat) {
  RMat M = RMat::Zero(lat.size(), lat.size());
  for (int a = 0; a < lat.dim(); ++a) {
    RMat D = central_difference(lat, a);
    M -= D * D;
  }
  return M;
}

inline double lattice_dispersion(const BoxLattice& lat, const Vec3& k) {
  const double dx = lat.spacing();
  double e = 0.0;
  for (int a = 0; a < lat.dim(); ++a) e += 2.0 * (1.0 - std::cos(k[a] * dx)) / (dx * dx);
  return e;
}

}  // namespace lpmf
