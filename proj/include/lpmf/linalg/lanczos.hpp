#pragma once

#include "lpmf/spectral/lattice.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <random>
#include <stdexcept>
#include <vector>

namespace lpmf {

struct LanczosBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Orthonormal Krylov basis with full reorthogonalization; stops early on an
// invariant subspace. T is the real symmetric tridiagonal projection.
template <class Op>
struct KrylovBasis {
  std::vector<CVec> V;
  Eigen::VectorXd alpha, beta;  // beta[j] couples V[j] and V[j+1]
  double beta_next = 0.0;       // residual coupling after the last vector
  bool invariant = false;

  KrylovBasis(const Op& A, const CVec& v0, int m, double breakdown_tol = 1e-13) {
    const double nv = v0.norm();
    if (nv == 0.0) throw std::invalid_argument("Lanczos: zero start vector");
    V.reserve(m + 1);
    V.push_back(v0 / nv);
    std::vector<double> a, b;
    CVec w(v0.size());
    double anorm = 0.0;
    for (int j = 0; j < m; ++j) {
      A.apply(V[j], w);
      const double aj = V[j].dot(w).real();
      w -= aj * V[j];
      if (j > 0) w -= b.back() * V[j - 1];
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) w -= V[i].dot(w) * V[i];
      a.push_back(aj);
      anorm = std::max(anorm, std::abs(aj));
      const double bj = w.norm();
      anorm = std::max(anorm, bj);
      if (bj <= breakdown_tol * std::max(anorm, 1e-300)) {
        invariant = true;
        beta_next = 0.0;
        break;
      }
      if (j + 1 == m) {
        beta_next = bj;
        V.push_back(w / bj);
        break;
      }
      b.push_back(bj);
      V.push_back(w / bj);
    }
    const int k = static_cast<int>(a.size());
    alpha = Eigen::Map<Eigen::VectorXd>(a.data(), k);
    beta = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    if (!invariant) V.resize(k + 1);
    else V.resize(k);
  }

  int size() const { return static_cast<int>(alpha.size()); }

  Eigen::MatrixXd tridiagonal() const {
    const int k = size();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) T(i, i) = alpha[i];
    for (int i = 0; i + 1 < k; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
    return T;
  }
};

struct ExpmvStats {
  int substeps = 0;
  int matvecs = 0;
  double error_estimate = 0.0;
};

// exp(z A) v for hermitian A and complex z via adaptive Lanczos substeps.
// Each substep of length h (fraction of z) is accepted when the standard
// a-posteriori estimate beta_m |e_m^T exp(h z T) e_1| ||v|| <= tol h.
template <class Op>
CVec expmv_lanczos(const Op& A, const CVec& v, cplx z, double tol = 1e-10, int m = 30, ExpmvStats* stats = nullptr) {
  CVec x = v;
  if (z == cplx(0.0, 0.0) || v.norm() == 0.0) return x;
  double done = 0.0, h = 1.0;
  ExpmvStats st;
  while (done < 1.0 - 1e-15) {
    const double nx = x.norm();
    KrylovBasis<Op> kb(A, x, m);
    st.matvecs += kb.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kb.tridiagonal());
    const Eigen::MatrixXd& Q = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();
    auto small_exp = [&](double hh) {
      CVec c(kb.size());
      for (int i = 0; i < kb.size(); ++i) c[i] = std::exp(hh * z * lam[i]) * Q(0, i);
      return CVec(Q.cast<cplx>() * c);
    };
    double step = std::min(h * 2.0, 1.0 - done);
    CVec y;
    double err = 0.0;
    for (int tries = 0; tries < 60; ++tries) {
      y = small_exp(step);
      err = kb.invariant ? 0.0 : kb.beta_next * std::abs(y[kb.size() - 1]) * nx;
      if (err <= tol * step || kb.invariant) break;
      step *= 0.5;
    }
    if (!(err <= tol * step) && !kb.invariant)
      throw LanczosBreakdown("expmv_lanczos: could not meet tolerance with a positive substep");
    CVec nxv = CVec::Zero(x.size());
    for (int i = 0; i < kb.size(); ++i) nxv += (nx * y[i]) * kb.V[i];
    x = nxv;
    done += step;
    h = step;
    st.substeps += 1;
    st.error_estimate += err;
  }
  if (stats) *stats = st;
  return x;
}

struct ExtremalResult {
  double value = 0.0;
  double residual = 0.0;
  double largest_ritz = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Smallest eigenvalue of a hermitian operator by explicitly restarted Lanczos
// (restart vector = current Ritz vector). Converged when the Ritz residual
// is below tol * max(1, |spectral scale|).
template <class Op>
ExtremalResult lanczos_smallest(const Op& A, std::size_t dim, uint64_t seed, double tol = 1e-11, int m = 60,
                                int max_restarts = 200) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVec v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = cplx(nd(rng), nd(rng));
  ExtremalResult r;
  double scale = 0.0;
  for (int it = 0; it < max_restarts; ++it) {
    KrylovBasis<Op> kb(A, v, std::min<int>(m, static_cast<int>(dim)));
    r.iterations += kb.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kb.tridiagonal());
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& Q = es.eigenvectors();
    scale = std::max({scale, std::abs(lam[0]), std::abs(lam[kb.size() - 1])});
    r.largest_ritz = std::max(it == 0 ? lam[kb.size() - 1] : r.largest_ritz, lam[kb.size() - 1]);
    r.value = lam[0];
    CVec y = CVec::Zero(dim);
    for (int i = 0; i < kb.size(); ++i) y += Q(i, 0) * kb.V[i];
    y.normalize();
    CVec Ay(dim);
    A.apply(y, Ay);
    r.residual = (Ay - r.value * y).norm();
    if (kb.invariant || r.residual <= tol * std::max(1.0, scale)) {
      r.converged = true;
      return r;
    }
    v = y;
  }
  return r;
}

}  // namespace lpmf
