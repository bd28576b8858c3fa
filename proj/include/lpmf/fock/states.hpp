#pragma once

#include "lpmf/fock/model.hpp"

#include <random>

namespace lpmf {

struct LeakageError : std::runtime_error {
  double leakage;
  LeakageError(const std::string& what, double l) : std::runtime_error(what), leakage(l) {}
};

// psi^{(x)N} in the occupation basis: sqrt(N! / prod n_x!) prod_j psi(x_j).
inline CVec product_particle_state(const ParticleSector& ps, const CVec& psi) {
  if (psi.size() != ps.sites()) throw std::invalid_argument("product state: psi must have one entry per site");
  CVec out(ps.size());
  const int N = ps.particles();
  double lognf = std::lgamma(N + 1.0);
  for (std::size_t c = 0; c < ps.size(); ++c) {
    cplx amp = 1.0;
    double logn = lognf;
    for (int j = 0; j < N; ++j) amp *= psi[ps.site(c, j)];
    for (int x = 0; x < ps.sites(); ++x) logn -= std::lgamma(ps.occupation(c, x) + 1.0);
    out[c] = std::exp(0.5 * logn) * amp;
  }
  return out;
}

// W(f) Omega on the phonon factor.
inline CVec coherent_phonon_state(const ManyBodyBasis& basis, const CVec& f) {
  CVec v = CVec::Zero(basis.block());
  v[0] = 1.0;
  CVec t1, t2;
  displace_block(basis.phonons(), f, basis.spec().mode_weight(), v.data(), t1, t2);
  return v;
}

inline double phonon_top_shell_mass(const PhononSector& ph, const CVec& v) {
  double m = 0.0;
  for (std::size_t p = 0; p < ph.size(); ++p)
    if (ph.total(p) == ph.cutoff()) m += std::norm(v[p]);
  return m;
}

inline CVec tensor(const CVec& particle, const CVec& phonon) {
  const Eigen::Index P = phonon.size();
  CVec out(particle.size() * P);
  for (Eigen::Index c = 0; c < particle.size(); ++c) out.segment(c * P, P) = particle[c] * phonon;
  return out;
}

// psi^{(x)N} (x) W(sqrt(N) phi) Omega with phi given on the retained modes.
inline ManyBodyState pekar_state(const BasisPtr& basis, const CVec& psi, const CVec& phi,
                                 double leakage_tolerance = 1e-6) {
  const double np = psi.norm();
  if (std::abs(np - 1.0) > 1e-10) throw std::invalid_argument("pekar_state: psi must be normalized");
  if (static_cast<std::size_t>(phi.size()) != basis->spec().mode_count())
    throw std::invalid_argument("pekar_state: phi must have one entry per retained mode");
  const CVec coh = coherent_phonon_state(*basis, std::sqrt(double(basis->spec().n_particles)) * phi);
  const double leak = phonon_top_shell_mass(basis->phonons(), coh);
  if (leak > leakage_tolerance)
    throw LeakageError("pekar_state: coherent-state top-shell mass " + std::to_string(leak) + " above tolerance", leak);
  CVec v = tensor(product_particle_state(basis->particles(), psi), coh);
  v.normalize();
  return {basis, v};
}

// U_K^* (psi^{(x)N} (x) W(sqrt(N) phi) Omega).
inline ManyBodyState gross_dressed_pekar_state(const GrossTransform& U, const CVec& psi, const CVec& phi,
                                               double leakage_tolerance = 1e-6) {
  ManyBodyState s = pekar_state(U.basis(), psi, phi, leakage_tolerance);
  s.coeffs = U.adjoint(s.coeffs);
  const double leak = top_shell_mass(*U.basis(), s.coeffs);
  if (leak > leakage_tolerance)
    throw LeakageError("gross_dressed_pekar_state: top-shell mass " + std::to_string(leak) + " above tolerance", leak);
  s.coeffs.normalize();
  return s;
}

inline CVec random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
  return v;
}

inline CVec random_state(std::size_t n, std::mt19937_64& rng) {
  CVec v = random_vector(n, rng);
  v.normalize();
  return v;
}

// Random coefficients on phonon totals <= max_phonons, damped by exp(-tau H^0).
// Depends only on the particle sector, the mode set and the seed, so the same
// state is produced for every phonon cutoff >= max_phonons.
inline CVec random_low_energy_state(const FockModel& model, std::mt19937_64& rng, int max_phonons = 1,
                                    double tau = 0.05) {
  const ManyBodyBasis& b = *model.basis;
  const PhononSector& ph = b.phonons();
  std::normal_distribution<double> nd;
  CVec v = CVec::Zero(b.dim());
  for (std::size_t c = 0; c < b.particles().size(); ++c)
    for (std::size_t p = 0; p < ph.size(); ++p) {
      if (ph.total(p) > max_phonons) continue;
      v[b.index(c, p)] = cplx(nd(rng), nd(rng));
    }
  if (tau > 0.0) v = expmv_lanczos(model.H0, v, cplx(-tau, 0.0), 1e-12);
  v.normalize();
  return v;
}

}  // namespace lpmf
