#pragma once

#include "lpmf/fock/weyl.hpp"

#include <map>

namespace lpmf {

// B_{K,x} summed over the particles of configuration c, on retained modes.
inline CVec configuration_form_factor(const ManyBodyBasis& basis, std::size_t c, FormFactorKind kind) {
  const ModelSpec& spec = basis.spec();
  const ParticleSector& ps = basis.particles();
  CVec f = CVec::Zero(spec.mode_count());
  for (int j = 0; j < ps.particles(); ++j) f += spec.form_factor(kind, spec.sites.position(ps.site(c, j)));
  return f;
}

// U_K = exp(N^{-1/2} sum_j (a(B_{K,x_j}) - a^dag(B_{K,x_j}))): block diagonal,
// configuration c carrying the displacement W(f_c), f_c = -N^{-1/2} sum_j B_{K,x_j}.
class GrossTransform {
 public:
  explicit GrossTransform(BasisPtr basis) : basis_(std::move(basis)) {
    const std::size_t C = basis_->particles().size();
    const double s = -1.0 / std::sqrt(static_cast<double>(basis_->spec().n_particles));
    shifts_.reserve(C);
    identity_ = true;
    for (std::size_t c = 0; c < C; ++c) {
      shifts_.push_back(s * configuration_form_factor(*basis_, c, FormFactorKind::B));
      if (!shifts_.back().isZero(0.0)) identity_ = false;
    }
  }

  std::size_t dim() const { return basis_->dim(); }
  bool is_identity() const { return identity_; }
  const CVec& displacement(std::size_t c) const { return shifts_[c]; }
  const BasisPtr& basis() const { return basis_; }

  void apply(const CVec& in, CVec& out) const { run(in, out, 1.0); }
  void apply_adjoint(const CVec& in, CVec& out) const { run(in, out, -1.0); }

  CVec forward(const CVec& v) const { CVec o; apply(v, o); return o; }
  CVec adjoint(const CVec& v) const { CVec o; apply_adjoint(v, o); return o; }

  CMat block_dense(std::size_t c) const {
    return weyl_dense(basis_->phonons(), shifts_[c], basis_->spec().mode_weight());
  }

  CMat to_dense() const {
    const std::size_t C = basis_->particles().size(), P = basis_->block();
    CMat D = CMat::Zero(C * P, C * P);
    for (std::size_t c = 0; c < C; ++c) D.block(c * P, c * P, P, P) = block_dense(c);
    return D;
  }

 private:
  void run(const CVec& in, CVec& out, double sign) const {
    out = in;
    if (identity_) return;
    const std::size_t P = basis_->block();
    const double w = basis_->spec().mode_weight();
    CVec t1, t2;
    for (std::size_t c = 0; c < shifts_.size(); ++c)
      displace_block(basis_->phonons(), sign * shifts_[c], w, out.data() + c * P, t1, t2);
  }

  BasisPtr basis_;
  std::vector<CVec> shifts_;
  bool identity_ = true;
};

inline GrossTransform gross_transform(BasisPtr basis) { return GrossTransform(std::move(basis)); }

// Two-body kernel V_K(x - y) = N^{-1} (<B_x, B_y> + 2 sqrt(alpha) Re <G_x, B_y>)
// with w-weighted sums over the retained modes.
inline double gross_pair_kernel(const ModelSpec& spec, const Vec3& x, const Vec3& y) {
  const CVec Bx = spec.form_factor(FormFactorKind::B, x);
  const CVec By = spec.form_factor(FormFactorKind::B, y);
  const CVec Gx = spec.form_factor(FormFactorKind::G, x);
  const double bb = spec.weight_dot(Bx, By).real();
  const double gb = spec.weight_dot(Gx, By).real();
  return (bb + 2.0 * std::sqrt(spec.alpha) * gb) / spec.n_particles;
}

// Gross-transformed Hamiltonian on the lattice, applied matrix-free:
//   H^G = sum_hops t_xy c_x^dag c_y (x) W(-N^{-1/2}(B_x - B_y))
//       + sqrt(alpha/N) sum_j Phi(G_{x_j}) + N^{-1/2} sum_j Phi(B_{x_j})
//       + sum_{j,l} V_K(x_j - x_l) + N_phonon.
// The dressed hopping is the exact conjugate of the lattice kinetic term, so
// H^G equals U_K H^F U_K^* up to phonon truncation. Requires an inversion
// symmetric mode set, which makes <B_x, B_y> real.
class GrossHamiltonian {
 public:
  GrossHamiltonian(BasisPtr basis, const HopTable& table) : basis_(std::move(basis)) {
    const ModelSpec& spec = basis_->spec();
    if (!spec.inversion_symmetric())
      throw std::invalid_argument("GrossHamiltonian: retained modes must be closed under k -> -k");
    const ParticleSector& ps = basis_->particles();
    const PhononSector& ph = basis_->phonons();
    const int S = ps.sites();
    const std::size_t P = ph.size();
    const int N = spec.n_particles;
    const double w = spec.mode_weight();
    T_ = kinetic_one_body(spec);

    // Local part: on-site kinetic diagonal, fields, pair kernel, number.
    std::vector<double> pair(S * S);
    for (int x = 0; x < S; ++x)
      for (int y = 0; y < S; ++y)
        pair[x * S + y] = gross_pair_kernel(spec, spec.sites.position(x), spec.sites.position(y));
    LocalTerms t;
    t.one_body = CMat::Zero(S, S);
    for (int x = 0; x < S; ++x) t.one_body(x, x) = T_(x, x);
    if (spec.alpha > 0.0)
      t.fields.push_back({std::sqrt(spec.alpha / N),
                          [&spec](const Vec3& x) { return spec.form_factor(FormFactorKind::G, x); }});
    t.fields.push_back({1.0 / std::sqrt(static_cast<double>(N)),
                        [&spec](const Vec3& x) { return spec.form_factor(FormFactorKind::B, x); }});
    t.config_scalar = [&ps, &pair, S](std::size_t c) {
      double v = 0.0;
      for (int j = 0; j < ps.particles(); ++j)
        for (int l = 0; l < ps.particles(); ++l) v += pair[ps.site(c, j) * S + ps.site(c, l)];
      return v;
    };
    local_ = assemble(*basis_, table, t);

    // Dressed hops grouped by displacement and source site.
    const BoxLattice& lat = spec.sites;
    const CVec B0 = spec.form_factor(FormFactorKind::B, Vec3{0, 0, 0});
    std::map<int, int> slot;  // raveled displacement -> dressing index
    for (std::size_t c = 0; c < ps.size(); ++c)
      for (const auto* e = table.begin(c); e != table.end(c); ++e) {
        if (e->from == e->to) continue;
        const double tv = T_(e->to, e->from).real();
        if (tv == 0.0) continue;
        Idx3 mf = lat.unravel(e->from), mt = lat.unravel(e->to);
        Idx3 dm{mt[0] - mf[0], mt[1] - mf[1], mt[2] - mf[2]};
        const int key = static_cast<int>(lat.ravel(dm));
        auto it = slot.find(key);
        int di;
        if (it == slot.end()) {
          di = static_cast<int>(dressings_.size());
          slot[key] = di;
          // h_delta(k) = -N^{-1/2} B_0(k) (e^{-ik delta} - 1), delta = x_to - x_from
          Vec3 delta{0, 0, 0};
          for (int a = 0; a < lat.dim(); ++a) delta[a] = dm[a] * lat.spacing();
          CVec h(spec.mode_count());
          for (std::size_t m = 0; m < spec.mode_count(); ++m)
            h[m] = -B0[m] * (std::polar(1.0, -dot3(spec.momentum(m), delta)) - 1.0) / std::sqrt(double(N));
          dressings_.push_back(weyl_dense(ph, h, w));
          groups_.emplace_back(S);
        } else {
          di = it->second;
        }
        groups_[di][e->from].push_back({static_cast<uint32_t>(c), e->target, tv * e->factor});
      }
    // Gamma_y phases: exp(-i sum_m (k_m . y) n_m) per site y, diagonal on phonons.
    gamma_.resize(S);
    for (int y = 0; y < S; ++y) {
      const Vec3 xy = lat.position(y);
      gamma_[y].resize(P);
      for (std::size_t p = 0; p < P; ++p) {
        double th = 0.0;
        for (int m = 0; m < ph.modes(); ++m) th += ph.occupation(p, m) * dot3(spec.momentum(m), xy);
        gamma_[y][p] = std::polar(1.0, -th);
      }
    }
  }

  std::size_t dim() const { return basis_->dim(); }
  const SpMat& local_part() const { return local_; }

  void apply(const CVec& in, CVec& out) const {
    out.noalias() = local_ * in;
    const Eigen::Index P = static_cast<Eigen::Index>(basis_->block());
    for (std::size_t d = 0; d < dressings_.size(); ++d)
      for (std::size_t y = 0; y < groups_[d].size(); ++y) {
        const auto& g = groups_[d][y];
        if (g.empty()) continue;
        CMat X(P, static_cast<Eigen::Index>(g.size()));
        for (std::size_t i = 0; i < g.size(); ++i)
          X.col(i) = gamma_[y].conjugate().cwiseProduct(in.segment(g[i].source * P, P));
        CMat Y = dressings_[d] * X;
        for (std::size_t i = 0; i < g.size(); ++i)
          out.segment(g[i].target * P, P) += g[i].amp * gamma_[y].cwiseProduct(Y.col(i));
      }
  }

  CMat to_dense() const {
    const std::size_t D = dim();
    CMat H(D, D);
    CVec e = CVec::Zero(D), col;
    for (std::size_t i = 0; i < D; ++i) {
      e.setZero();
      e[i] = 1.0;
      apply(e, col);
      H.col(i) = col;
    }
    return H;
  }

 private:
  struct Hop {
    uint32_t source, target;
    double amp;
  };

  BasisPtr basis_;
  CMat T_;
  SpMat local_;
  std::vector<CMat> dressings_;
  std::vector<std::vector<std::vector<Hop>>> groups_;  // [dressing][source site] -> hops
  std::vector<CVec> gamma_;
};

}  // namespace lpmf
