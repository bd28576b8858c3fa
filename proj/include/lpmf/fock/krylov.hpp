#pragma once

#include "lpmf/fock/operators.hpp"
#include "lpmf/linalg/lanczos.hpp"

namespace lpmf {

struct NonHermitianOperator : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct KrylovOptions {
  double tol = 1e-10;
  int subspace = 30;
  double norm_tol = 1e-10;
};

// exp(-i H t) Psi. Any hermitian operator type works; SparseOperator inputs
// must carry the hermitian flag.
template <class Op>
CVec evolve_krylov(const Op& H, const CVec& psi, double t, const KrylovOptions& opt = {}, ExpmvStats* stats = nullptr) {
  if constexpr (std::is_same_v<Op, SparseOperator>) {
    if (!H.hermitian) throw NonHermitianOperator("evolve_krylov: operator is not flagged hermitian");
  }
  if (static_cast<std::size_t>(psi.size()) != H.dim())
    throw std::invalid_argument("evolve_krylov: state dimension does not match operator");
  if (t == 0.0) return psi;
  CVec out;
  try {
    out = expmv_lanczos(H, psi, cplx(0.0, -t), opt.tol, opt.subspace, stats);
  } catch (const LanczosBreakdown&) {
    // a larger subspace permits longer substeps
    out = expmv_lanczos(H, psi, cplx(0.0, -t), opt.tol, 2 * opt.subspace, stats);
  }
  const double n0 = psi.norm(), n1 = out.norm();
  if (std::abs(n1 - n0) > opt.norm_tol * std::max(1.0, n0))
    throw LanczosBreakdown("evolve_krylov: norm drift " + std::to_string(n1 - n0));
  return out;
}

inline ManyBodyState evolve_krylov(const SparseOperator& H, const ManyBodyState& psi, double t,
                                   const KrylovOptions& opt = {}) {
  return {psi.basis, evolve_krylov(H, psi.coeffs, t, opt)};
}

}  // namespace lpmf
