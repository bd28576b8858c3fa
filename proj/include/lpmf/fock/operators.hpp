#pragma once

#include "lpmf/fock/basis.hpp"
#include "lpmf/spectral/lattice_operators.hpp"

#include <Eigen/Sparse>

#include <functional>

namespace lpmf {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<cplx>;

struct SparseOperator {
  SpMat matrix;
  bool hermitian = false;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  void apply(const CVec& in, CVec& out) const { out.noalias() = matrix * in; }
  CVec operator*(const CVec& v) const { return matrix * v; }

  double hermiticity_defect() const {
    SpMat d = matrix - SpMat(matrix.adjoint());
    double m = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
      for (SpMat::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
  }

  CMat to_dense() const { return CMat(matrix); }
};

inline SparseOperator make_hermitian_operator(SpMat m, double tol = 1e-13) {
  SparseOperator op{std::move(m), false};
  double scale = 0.0;
  for (int k = 0; k < op.matrix.outerSize(); ++k)
    for (SpMat::InnerIterator it(op.matrix, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  const double defect = op.hermiticity_defect();
  if (defect > tol * std::max(1.0, scale))
    throw std::logic_error("operator expected hermitian, defect " + std::to_string(defect));
  op.hermitian = true;
  return op;
}

// Type-erased linear map, used for matrix-free operators and combinations.
struct FunctionOperator {
  std::size_t n = 0;
  std::function<void(const CVec&, CVec&)> fn;
  std::size_t dim() const { return n; }
  void apply(const CVec& in, CVec& out) const { fn(in, out); }
};

template <class Op>
CVec apply_op(const Op& A, const CVec& v) {
  CVec out(v.size());
  A.apply(v, out);
  return out;
}

template <class Op>
double expectation(const Op& A, const CVec& v) {
  return v.dot(apply_op(A, v)).real();
}

// (c, b) -> list of (a, c', factor) for c_a^dag c_b acting on configuration c.
class HopTable {
 public:
  struct Entry {
    uint32_t target;
    uint16_t from, to;
    double factor;
  };

  explicit HopTable(const ParticleSector& ps) {
    const int S = ps.sites();
    offsets_.push_back(0);
    for (std::size_t c = 0; c < ps.size(); ++c) {
      for (int b = 0; b < S; ++b) {
        if (ps.occupation(c, b) == 0) continue;
        for (int a = 0; a < S; ++a) {
          auto [t, f] = ps.hop(c, b, a);
          entries_.push_back({static_cast<uint32_t>(t), static_cast<uint16_t>(b), static_cast<uint16_t>(a), f});
        }
      }
      offsets_.push_back(entries_.size());
    }
  }

  std::size_t configs() const { return offsets_.size() - 1; }
  const Entry* begin(std::size_t c) const { return entries_.data() + offsets_[c]; }
  const Entry* end(std::size_t c) const { return entries_.data() + offsets_[c + 1]; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

// dGamma(h) on the particle sector as a C x C sparse matrix.
inline SpMat particle_one_body(const ManyBodyBasis& basis, const CMat& h, const HopTable& table) {
  const std::size_t C = basis.particles().size();
  std::vector<Triplet> trip;
  for (std::size_t c = 0; c < C; ++c)
    for (const auto* e = table.begin(c); e != table.end(c); ++e) {
      const cplx v = h(e->to, e->from);
      if (v != cplx(0.0, 0.0)) trip.emplace_back(e->target, c, v * e->factor);
    }
  SpMat m(C, C);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// Matrix-free (dGamma(h) (x) 1) for dense one-body h.
inline void apply_one_body(const ManyBodyBasis& basis, const HopTable& table, const CMat& h, const CVec& in,
                           CVec& out) {
  const std::size_t P = basis.block();
  out.setZero(in.size());
  for (std::size_t c = 0; c < table.configs(); ++c)
    for (const auto* e = table.begin(c); e != table.end(c); ++e) {
      const cplx v = h(e->to, e->from) * e->factor;
      if (v == cplx(0.0, 0.0)) continue;
      out.segment(e->target * P, P).noalias() += v * in.segment(c * P, P);
    }
}

// Coefficients of the field term sum_j s Phi(F_{x_j}) with Phi(f) = a(f) + a^dag(f)
// and a(f) = sum_m conj(f_m) w^{1/2} a_m: per site x and mode m the factor
// multiplying a_m is s w^{1/2} conj(F_x(k_m)).
struct FieldTerm {
  double scale = 1.0;
  std::function<CVec(const Vec3&)> profile;
};

struct LocalTerms {
  CMat one_body;                        // S x S, applied as dGamma
  double number_coefficient = 1.0;      // multiplies the phonon number operator
  std::vector<FieldTerm> fields;
  std::function<double(std::size_t)> config_scalar;  // per-configuration constant
};

inline SpMat assemble(const ManyBodyBasis& basis, const HopTable& table, const LocalTerms& terms) {
  const ModelSpec& spec = basis.spec();
  const ParticleSector& ps = basis.particles();
  const PhononSector& ph = basis.phonons();
  const std::size_t C = ps.size(), P = ph.size();
  const int S = ps.sites(), M = ph.modes();
  const double sw = std::sqrt(spec.mode_weight());

  // g(x, m): coefficient of a_m for a particle at x
  CMat g = CMat::Zero(S, M);
  for (const auto& f : terms.fields)
    for (int x = 0; x < S; ++x) {
      CVec F = f.profile(spec.sites.position(x));
      for (int m = 0; m < M; ++m) g(x, m) += f.scale * sw * std::conj(F[m]);
    }

  std::vector<Triplet> trip;
  trip.reserve(C * P * 4);
  SpMat kin = particle_one_body(basis, terms.one_body, table);
  for (int r = 0; r < kin.outerSize(); ++r)
    for (SpMat::InnerIterator it(kin, r); it; ++it)
      for (std::size_t p = 0; p < P; ++p) trip.emplace_back(it.row() * P + p, it.col() * P + p, it.value());

  for (std::size_t c = 0; c < C; ++c) {
    const double s = terms.config_scalar ? terms.config_scalar(c) : 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      const double diag = terms.number_coefficient * ph.total(p) + s;
      if (diag != 0.0) trip.emplace_back(c * P + p, c * P + p, diag);
    }
    if (terms.fields.empty()) continue;
    for (int m = 0; m < M; ++m) {
      cplx D = 0.0;
      for (int x = 0; x < S; ++x) {
        const int n = ps.occupation(c, x);
        if (n) D += static_cast<double>(n) * g(x, m);
      }
      if (D == cplx(0.0, 0.0)) continue;
      const auto& lad = ph.ladder(m);
      for (std::size_t i = 0; i < lad.src.size(); ++i) {
        const cplx v = D * lad.amp[i];
        trip.emplace_back(c * P + lad.dst[i], c * P + lad.src[i], v);             // a_m
        trip.emplace_back(c * P + lad.src[i], c * P + lad.dst[i], std::conj(v));  // a_m^dag
      }
    }
  }
  SpMat H(C * P, C * P);
  H.setFromTriplets(trip.begin(), trip.end());
  H.makeCompressed();
  return H;
}

inline CMat kinetic_one_body(const ModelSpec& spec) { return lattice_laplacian(spec.sites).cast<cplx>(); }

// H^0 = dGamma(-Laplace_lattice) + N_phonon
inline SparseOperator build_free_hamiltonian(const ManyBodyBasis& basis, const HopTable& table) {
  LocalTerms t;
  t.one_body = kinetic_one_body(basis.spec());
  return make_hermitian_operator(assemble(basis, table, t));
}

// Froehlich Hamiltonian on the truncated space:
// H^F = H^0 + sqrt(alpha/N) sum_j Phi(G_{x_j}) over retained modes.
inline SparseOperator build_frohlich_hamiltonian(const ManyBodyBasis& basis, const HopTable& table) {
  const ModelSpec& spec = basis.spec();
  LocalTerms t;
  t.one_body = kinetic_one_body(spec);
  if (spec.alpha > 0.0)
    t.fields.push_back({std::sqrt(spec.alpha / spec.n_particles),
                        [&spec](const Vec3& x) { return spec.form_factor(FormFactorKind::G, x); }});
  return make_hermitian_operator(assemble(basis, table, t));
}

inline SparseOperator build_number_operator(const ManyBodyBasis& basis, const HopTable& table) {
  LocalTerms t;
  t.one_body = CMat::Zero(basis.particles().sites(), basis.particles().sites());
  return make_hermitian_operator(assemble(basis, table, t));
}

inline RVec number_diagonal(const ManyBodyBasis& basis) {
  const RVec d = basis.phonons().number_diagonal();
  RVec out(basis.dim());
  for (std::size_t c = 0; c < basis.particles().size(); ++c) out.segment(c * basis.block(), basis.block()) = d;
  return out;
}

}  // namespace lpmf
