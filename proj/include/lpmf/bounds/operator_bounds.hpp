#pragma once

#include "lpmf/bounds/closed_form.hpp"
#include "lpmf/fock/model.hpp"

namespace lpmf {

// a(f) = sum_m conj(f_m) w^{1/2} a_m on the phonon factor.
inline SpMat annihilator(const PhononSector& ph, const CVec& f, double weight) {
  std::vector<Triplet> trip;
  const double sw = std::sqrt(weight);
  for (int m = 0; m < ph.modes(); ++m) {
    const cplx c = std::conj(f[m]) * sw;
    if (c == cplx(0.0, 0.0)) continue;
    const auto& lad = ph.ladder(m);
    for (std::size_t i = 0; i < lad.src.size(); ++i) trip.emplace_back(lad.dst[i], lad.src[i], c * lad.amp[i]);
  }
  SpMat a(ph.size(), ph.size());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

// Block-diagonal sum_j Q(x_j): configuration c gets sum_x n_x Q(x).
inline SpMat site_sum(const ManyBodyBasis& basis, const std::vector<CMat>& Q) {
  const ParticleSector& ps = basis.particles();
  const std::size_t P = basis.block();
  std::vector<Triplet> trip;
  for (std::size_t c = 0; c < ps.size(); ++c) {
    CMat blk = CMat::Zero(P, P);
    for (int x = 0; x < ps.sites(); ++x)
      if (int n = ps.occupation(c, x)) blk += static_cast<double>(n) * Q[x];
    for (std::size_t i = 0; i < P; ++i)
      for (std::size_t j = 0; j < P; ++j)
        if (blk(i, j) != cplx(0.0, 0.0)) trip.emplace_back(c * P + i, c * P + j, blk(i, j));
  }
  SpMat m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// (dGamma(h) (x) D) for a one-body h and a phonon-diagonal D.
inline SpMat one_body_times_phonon_diag(const ManyBodyBasis& basis, const HopTable& table, const CMat& h,
                                        const RVec& d) {
  const std::size_t P = basis.block();
  std::vector<Triplet> trip;
  for (std::size_t c = 0; c < table.configs(); ++c)
    for (const auto* e = table.begin(c); e != table.end(c); ++e) {
      const cplx v = h(e->to, e->from) * e->factor;
      if (v == cplx(0.0, 0.0)) continue;
      for (std::size_t p = 0; p < P; ++p)
        if (d[p] != 0.0) trip.emplace_back(e->target * P + p, c * P + p, v * d[p]);
    }
  SpMat m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

inline SpMat identity_matrix(std::size_t n) {
  SpMat id(n, n);
  id.setIdentity();
  return id;
}

inline SpMat field_sum(const ManyBodyBasis& basis, const HopTable& table, FormFactorKind kind) {
  const ModelSpec& spec = basis.spec();
  LocalTerms t;
  t.one_body = CMat::Zero(spec.sites.size(), spec.sites.size());
  t.number_coefficient = 0.0;
  t.fields.push_back({1.0, [&spec, kind](const Vec3& x) { return spec.form_factor(kind, x); }});
  return assemble(basis, table, t);
}

inline SpMat kinetic_sum(const ManyBodyBasis& basis, const HopTable& table) {
  LocalTerms t;
  t.one_body = kinetic_one_body(basis.spec());
  t.number_coefficient = 0.0;
  return assemble(basis, table, t);
}

inline SpMat phonon_number(const ManyBodyBasis& basis) {
  const RVec d = number_diagonal(basis);
  SpMat m(basis.dim(), basis.dim());
  std::vector<Triplet> trip;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) trip.emplace_back(i, i, d[i]);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// sum_j A_{K,x_j} on the lattice with central differences:
//   A_{K,x} = -2i N^{-1/2} (D . a(k B_{K,x}) + a^dag(k B_{K,x}) . D) + N^{-1} Phi(k B_{K,x})^2.
inline SpMat gross_correction_sum(const ManyBodyBasis& basis, const HopTable& table) {
  const ModelSpec& spec = basis.spec();
  const PhononSector& ph = basis.phonons();
  const int S = static_cast<int>(spec.sites.size());
  const int d = spec.sites.dim();
  const std::size_t P = ph.size();
  const double N = spec.n_particles;
  const double w = spec.mode_weight();

  std::vector<std::vector<SpMat>> a(d, std::vector<SpMat>(S));  // a(k_a B_x)
  std::vector<CMat> quad(S, CMat::Zero(P, P));
  for (int x = 0; x < S; ++x) {
    const CVec B = spec.form_factor(FormFactorKind::B, spec.sites.position(x));
    for (int ax = 0; ax < d; ++ax) {
      CVec kb(B.size());
      for (std::size_t m = 0; m < spec.mode_count(); ++m) kb[m] = spec.momentum(m)[ax] * B[m];
      a[ax][x] = annihilator(ph, kb, w);
      const CMat phi = CMat(a[ax][x]) + CMat(a[ax][x].adjoint());
      quad[x] += phi * phi / N;
    }
  }
  SpMat out = site_sum(basis, quad);

  std::vector<Triplet> trip;
  const cplx pre(0.0, -2.0 / std::sqrt(N));
  for (int ax = 0; ax < d; ++ax) {
    const RMat D = central_difference(spec.sites, ax);
    for (std::size_t c = 0; c < table.configs(); ++c)
      for (const auto* e = table.begin(c); e != table.end(c); ++e) {
        const double dxy = D(e->to, e->from);
        if (dxy == 0.0) continue;
        const cplx v = pre * dxy * e->factor;
        // D a(kB_y): phonon factor of the source site; a^dag(kB_x) D: target site
        const SpMat& ay = a[ax][e->from];
        for (int k = 0; k < ay.outerSize(); ++k)
          for (SpMat::InnerIterator it(ay, k); it; ++it)
            trip.emplace_back(e->target * P + it.row(), c * P + it.col(), v * it.value());
        const SpMat adx = a[ax][e->to].adjoint();
        for (int k = 0; k < adx.outerSize(); ++k)
          for (SpMat::InnerIterator it(adx, k); it; ++it)
            trip.emplace_back(e->target * P + it.row(), c * P + it.col(), v * it.value());
      }
  }
  SpMat cross(basis.dim(), basis.dim());
  cross.setFromTriplets(trip.begin(), trip.end());
  return out + cross;
}

// Smallest C >= 0 with 1/2 H0 - C N <= H <= 3/2 H0 + C N, then both margins
// re-measured at that C with independent start vectors.
template <class Op>
std::vector<InequalityReport> sandwich_reports(const std::string& label, const Op& H, const SparseOperator& H0,
                                               int N, uint64_t seed) {
  const std::size_t D = H0.dim();
  auto lower = [&](double shift) {
    return FunctionOperator{D, [&, shift](const CVec& in, CVec& out) {
                              H.apply(in, out);
                              out.noalias() -= 0.5 * (H0.matrix * in);
                              out += shift * in;
                            }};
  };
  auto upper = [&](double shift) {
    return FunctionOperator{D, [&, shift](const CVec& in, CVec& out) {
                              CVec h(in.size());
                              H.apply(in, h);
                              out.noalias() = 1.5 * (H0.matrix * in) - h;
                              out += shift * in;
                            }};
  };
  const MarginResult lo = smallest_eigenvalue(lower(0.0), D, seed);
  const MarginResult up = smallest_eigenvalue(upper(0.0), D, seed + 1);
  const double C = std::max({0.0, -lo.certified() / N, -up.certified() / N});
  std::vector<InequalityReport> out;
  out.push_back(operator_inequality("sandwich_lower_" + label, lower(C * N), D, seed + 2));
  out.push_back(operator_inequality("sandwich_upper_" + label, upper(C * N), D, seed + 3));
  for (auto& r : out) {
    r.context["C"] = C;
    r.context["N"] = N;
    if (!lo.converged || !up.converged) {
      r.pass = false;
      r.note = "eigensolver did not converge while fitting C";
    }
  }
  return out;
}

inline std::vector<InequalityReport> verify_hamiltonian_sandwich(const FockModel& model, uint64_t seed = 11) {
  std::vector<InequalityReport> out = sandwich_reports("HF", model.HF, model.H0, model.particles(), seed);
  const GrossHamiltonian HG = model.gross_hamiltonian();
  for (auto& r : sandwich_reports("HG", HG, model.H0, model.particles(), seed + 10)) out.push_back(r);
  for (auto& r : out) r.context["alpha"] = model.spec().alpha;
  return out;
}

// Bound for the low-pass field, summed over particles:
//   +- N^{-1/2} sum_j Phi(G_{K,x_j}) <= eps (dGamma(T) + Nph + 1) + N 2 (16 pi)^2 / eps^3,
// followed by the A_K bound
//   +- sum_j A_{K,x_j} <= sqrt(64 pi / K) (dGamma(T) + Nph) + 16 pi / K.
inline std::vector<InequalityReport> verify_interaction_bound(const FockModel& model, const std::vector<double>& eps_list,
                                                              uint64_t seed = 21) {
  const ManyBodyBasis& b = *model.basis;
  const ModelSpec& spec = model.spec();
  const double N = spec.n_particles;
  const double pi = std::numbers::pi;
  const SpMat field = field_sum(b, model.hops, FormFactorKind::GLow) / std::sqrt(N);
  const SpMat free = kinetic_sum(b, model.hops) + phonon_number(b);
  const SpMat id = identity_matrix(b.dim());
  std::vector<InequalityReport> out;
  int idx = 0;
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw std::invalid_argument("verify_interaction_bound: eps must be positive");
    const double constant = N * 2.0 * std::pow(16.0 * pi, 2) / std::pow(eps, 3);
    for (int sign : {1, -1}) {
      SparseOperator diff{eps * (free + id) + cplx(constant, 0.0) * id - double(sign) * field, true};
      auto r = operator_inequality(std::string("interaction_bound_") + (sign > 0 ? "plus" : "minus"), diff, b.dim(),
                                   seed + idx++);
      r.context["eps"] = eps;
      r.context["constant"] = constant;
      r.context["K"] = spec.K;
      out.push_back(r);
    }
  }
  const SpMat A = gross_correction_sum(b, model.hops);
  const double c1 = std::sqrt(64.0 * pi / spec.K), c0 = 16.0 * pi / spec.K;
  for (int sign : {1, -1}) {
    SparseOperator diff{c1 * free + cplx(c0, 0.0) * id - double(sign) * A, true};
    auto r = operator_inequality(std::string("gross_correction_bound_") + (sign > 0 ? "plus" : "minus"), diff,
                                 b.dim(), seed + idx++);
    r.context["K"] = spec.K;
    r.context["A_norm_max"] = A.nonZeros() ? A.coeffs().abs().maxCoeff() : 0.0;
    out.push_back(r);
  }
  return out;
}

// sum_j a^dag(G_{K,x_j}) a(G_{K,x_j}) <= C_G (N + dGamma(T)) Nph, the summed form of
// a^dag(G_{K,x}) a(G_{K,x}) <= C_G (1 - Laplace) Nph.
inline InequalityReport verify_lieb_yamazaki(const FockModel& model, double CG, uint64_t seed = 31) {
  const ManyBodyBasis& b = *model.basis;
  const ModelSpec& spec = model.spec();
  const int S = static_cast<int>(spec.sites.size());
  std::vector<CMat> Q(S);
  for (int x = 0; x < S; ++x) {
    const SpMat a = annihilator(b.phonons(), spec.form_factor(FormFactorKind::GLow, spec.sites.position(x)),
                                spec.mode_weight());
    Q[x] = CMat(SpMat(a.adjoint()) * a);
  }
  const SpMat lhs = site_sum(b, Q);
  const RVec nd = b.phonons().number_diagonal();
  const SpMat rhs = one_body_times_phonon_diag(b, model.hops, kinetic_one_body(spec), nd) +
                    double(spec.n_particles) * phonon_number(b);
  SparseOperator diff{CG * rhs - lhs, true};
  auto r = operator_inequality("lieb_yamazaki", diff, b.dim(), seed);
  r.context["C_G"] = CG;
  r.context["K"] = spec.K;
  return r;
}

}  // namespace lpmf
