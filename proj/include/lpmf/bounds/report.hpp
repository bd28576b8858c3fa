#pragma once

#include "lpmf/linalg/lanczos.hpp"
#include "lpmf/fock/operators.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <string>
#include <vector>

namespace lpmf {

struct InequalityReport {
  std::string name;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double margin = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::map<std::string, double> context;
  std::string note;

  void decide() { pass = std::isfinite(margin) && margin >= -slack; }
};

struct MarginResult {
  double lambda_min = 0.0;  // Ritz value (or exact eigenvalue for dense)
  double residual = 0.0;
  double scale = 0.0;       // spectral radius estimate of the operator
  bool converged = false;
  bool dense = false;

  // Lower estimate of the smallest eigenvalue.
  double certified() const { return lambda_min - residual; }
};

inline constexpr double kOperatorSlack = 1e-9;
inline constexpr std::size_t kDenseLimit = 2500;

template <class Op>
CMat materialize(const Op& A, std::size_t dim) {
  CMat M(dim, dim);
  CVec e = CVec::Zero(dim), col(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    e.setZero();
    e[i] = 1.0;
    A.apply(e, col);
    M.col(i) = col;
  }
  return M;
}

// Smallest eigenvalue of a hermitian operator: dense for small dimension,
// restarted Lanczos otherwise. The scale is the spectral radius estimate.
template <class Op>
MarginResult smallest_eigenvalue(const Op& A, std::size_t dim, uint64_t seed = 1, double tol = 1e-11) {
  MarginResult r;
  if (dim <= kDenseLimit) {
    CMat M = materialize(A, dim);
    M = 0.5 * (M + M.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMat> es(M, Eigen::EigenvaluesOnly);
    r.lambda_min = es.eigenvalues()[0];
    r.scale = std::max(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[dim - 1]));
    r.converged = true;
    r.dense = true;
    return r;
  }
  const ExtremalResult e = lanczos_smallest(A, dim, seed, tol);
  r.lambda_min = e.value;
  r.residual = e.residual;
  r.scale = std::max(std::abs(e.value), std::abs(e.largest_ritz));
  r.converged = e.converged;
  return r;
}

// Operator inequality A <= B checked as lambda_min(B - A) >= -slack * scale.
template <class Op>
InequalityReport operator_inequality(std::string name, const Op& diff, std::size_t dim, uint64_t seed) {
  InequalityReport rep;
  rep.name = std::move(name);
  const MarginResult m = smallest_eigenvalue(diff, dim, seed);
  rep.margin = m.certified();
  rep.slack = kOperatorSlack * std::max(1.0, m.scale);
  rep.lhs = {0.0};
  rep.rhs = {m.lambda_min};
  rep.context["scale"] = m.scale;
  rep.context["residual"] = m.residual;
  rep.context["dimension"] = static_cast<double>(dim);
  rep.decide();
  if (!m.converged) {
    rep.pass = false;
    rep.note = "eigensolver did not converge";
  }
  return rep;
}

inline SparseOperator shifted(const SpMat& m, double shift) {
  SpMat id(m.rows(), m.cols());
  id.setIdentity();
  return SparseOperator{m + cplx(shift, 0.0) * id, true};
}

}  // namespace lpmf
