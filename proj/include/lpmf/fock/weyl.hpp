#pragma once

#include "lpmf/fock/operators.hpp"

#include <Eigen/Eigenvalues>

#include <string>

namespace lpmf {

// Generator A(f) = a^dag(f) - a(f) on the phonon factor for continuum values
// f on the retained modes; the discrete amplitudes are w^{1/2} f.
inline CMat weyl_generator_dense(const PhononSector& ph, const CVec& f, double weight) {
  const std::size_t P = ph.size();
  CMat A = CMat::Zero(P, P);
  const double sw = std::sqrt(weight);
  for (int m = 0; m < ph.modes(); ++m) {
    const cplx fm = sw * f[m];
    if (fm == cplx(0.0, 0.0)) continue;
    const auto& lad = ph.ladder(m);
    for (std::size_t i = 0; i < lad.src.size(); ++i) {
      A(lad.src[i], lad.dst[i]) += fm * lad.amp[i];             // a^dag
      A(lad.dst[i], lad.src[i]) -= std::conj(fm) * lad.amp[i];  // -a
    }
  }
  return A;
}

// exp of an anti-hermitian matrix through the hermitian eigenproblem of -iA;
// the result is unitary to machine precision.
inline CMat expm_antihermitian(const CMat& A) {
  CMat H = cplx(0.0, -1.0) * A;
  H = 0.5 * (H + H.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  const CVec ph = (cplx(0.0, 1.0) * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline CMat weyl_dense(const PhononSector& ph, const CVec& f, double weight) {
  if (f.isZero(0.0)) return CMat::Identity(ph.size(), ph.size());
  return expm_antihermitian(weyl_generator_dense(ph, f, weight));
}

// v <- exp(A(f)) v on one phonon block via scaled Taylor series.
inline void displace_block(const PhononSector& ph, const CVec& f, double weight, cplx* v, CVec& work_term,
                           CVec& work_next) {
  const std::size_t P = ph.size();
  const double sw = std::sqrt(weight);
  double fn = 0.0;
  for (int m = 0; m < ph.modes(); ++m) fn += std::norm(sw * f[m]);
  fn = std::sqrt(fn);
  if (fn == 0.0 || P == 1) return;
  const double bound = 2.0 * fn * std::sqrt(static_cast<double>(std::max(ph.cutoff(), 1)));
  const int substeps = std::max(1, static_cast<int>(std::ceil(bound / 0.5)));
  const double tau = 1.0 / substeps;
  Eigen::Map<CVec> x(v, P);
  work_term.resize(P);
  work_next.resize(P);
  for (int s = 0; s < substeps; ++s) {
    work_term = x;
    for (int k = 1; k < 80; ++k) {
      work_next.setZero();
      for (int m = 0; m < ph.modes(); ++m) {
        const cplx fm = tau * sw * f[m];
        if (fm == cplx(0.0, 0.0)) continue;
        const auto& lad = ph.ladder(m);
        const cplx fc = std::conj(fm);
        for (std::size_t i = 0; i < lad.src.size(); ++i) {
          work_next[lad.src[i]] += fm * lad.amp[i] * work_term[lad.dst[i]];
          work_next[lad.dst[i]] -= fc * lad.amp[i] * work_term[lad.src[i]];
        }
      }
      work_term = work_next / static_cast<double>(k);
      x += work_term;
      if (work_term.norm() <= 1e-17 * x.norm()) break;
    }
  }
}

// Probability mass on the maximal phonon-number shell, summed over blocks.
inline double top_shell_mass(const ManyBodyBasis& basis, const CVec& v) {
  const PhononSector& ph = basis.phonons();
  const std::size_t P = ph.size();
  double mass = 0.0;
  for (std::size_t c = 0; c < basis.particles().size(); ++c)
    for (std::size_t p = 0; p < P; ++p)
      if (ph.total(p) == ph.cutoff()) mass += std::norm(v[c * P + p]);
  return mass;
}

inline double mean_phonon_number(const ManyBodyBasis& basis, const CVec& v) {
  const PhononSector& ph = basis.phonons();
  const std::size_t P = ph.size();
  double n = 0.0;
  for (std::size_t c = 0; c < basis.particles().size(); ++c)
    for (std::size_t p = 0; p < P; ++p) n += ph.total(p) * std::norm(v[c * P + p]);
  return n;
}

// W(f) = exp(a^dag(f) - a(f)) acting as identity on particles.
class WeylOperator {
 public:
  WeylOperator(BasisPtr basis, CVec f, double leakage_tolerance = 1e-6)
      : basis_(std::move(basis)), f_(std::move(f)) {
    const ModelSpec& spec = basis_->spec();
    if (static_cast<std::size_t>(f_.size()) != spec.mode_count())
      throw std::invalid_argument("WeylOperator: f must have one entry per retained mode");
    factor_ = weyl_dense(basis_->phonons(), f_, spec.mode_weight());
    const double leak = coherent_leakage();
    leakage_ = leak;
    if (leak > leakage_tolerance)
      warnings_.push_back("Weyl operator: coherent-state top-shell mass " + std::to_string(leak) +
                          " exceeds tolerance " + std::to_string(leakage_tolerance));
  }

  std::size_t dim() const { return basis_->dim(); }
  const CMat& phonon_factor() const { return factor_; }
  const CVec& displacement() const { return f_; }
  double leakage() const { return leakage_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  void apply(const CVec& in, CVec& out) const { blockwise(factor_, in, out); }
  void apply_adjoint(const CVec& in, CVec& out) const { blockwise(factor_.adjoint(), in, out); }

  CMat to_dense() const {
    const std::size_t C = basis_->particles().size(), P = basis_->block();
    CMat D = CMat::Zero(C * P, C * P);
    for (std::size_t c = 0; c < C; ++c) D.block(c * P, c * P, P, P) = factor_;
    return D;
  }

 private:
  double coherent_leakage() const {
    const PhononSector& ph = basis_->phonons();
    double mass = 0.0;
    for (std::size_t p = 0; p < ph.size(); ++p)
      if (ph.total(p) == ph.cutoff()) mass += std::norm(factor_(p, 0));
    return mass;
  }

  template <class Mat>
  void blockwise(const Mat& W, const CVec& in, CVec& out) const {
    const Eigen::Index P = static_cast<Eigen::Index>(basis_->block());
    const Eigen::Index C = static_cast<Eigen::Index>(basis_->particles().size());
    out.resize(in.size());
    Eigen::Map<const CMat> X(in.data(), P, C);
    Eigen::Map<CMat> Y(out.data(), P, C);
    Y.noalias() = W * X;
  }

  BasisPtr basis_;
  CVec f_;
  CMat factor_;
  double leakage_ = 0.0;
  std::vector<std::string> warnings_;
};

inline WeylOperator weyl_operator(BasisPtr basis, const CVec& f, double leakage_tolerance = 1e-6) {
  return WeylOperator(std::move(basis), f, leakage_tolerance);
}

// Applies W(f) (same f for every configuration) with the Taylor kernel.
inline CVec apply_weyl(const ManyBodyBasis& basis, const CVec& f, const CVec& v) {
  CVec out = v;
  CVec t1, t2;
  const std::size_t P = basis.block();
  for (std::size_t c = 0; c < basis.particles().size(); ++c)
    displace_block(basis.phonons(), f, basis.spec().mode_weight(), out.data() + c * P, t1, t2);
  return out;
}

}  // namespace lpmf
