#pragma once

#include "lpmf/landau_pekar/strang.hpp"
#include "lpmf/spectral/fft.hpp"
#include "lpmf/spectral/form_factor.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace lpmf {

struct PekarPair {
  ComplexField psi;
  ModeVector phi;
  double alpha = 0.0;

  void validate(double norm_tol = 1e-10) const {
    require_same(psi.lattice, phi.lattice, "PekarPair");
    if (!(alpha >= 0.0)) throw std::invalid_argument("PekarPair: alpha must be non-negative");
    if (!psi.finite() || !phi.values.allFinite()) throw std::invalid_argument("PekarPair: non-finite entries");
    if (std::abs(psi.norm() - 1.0) > norm_tol) throw std::invalid_argument("PekarPair: psi is not normalized");
    if (phi.values[0] != cplx(0.0, 0.0)) throw std::invalid_argument("PekarPair: phi zero mode must vanish");
  }
};

struct LPDiagnostics {
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  double energy_drift = 0.0;
  double h2_norm = 0.0;
  double l21_norm = 0.0;
};

enum class PotentialRange { full, low, high };

struct LPStepperConfig {
  double dt = 1e-3;
  double t_end = 0.0;
  int record_every = 1;
  int snapshot_every = 0;  // 0: first and last only
  std::string scheme = "strang";

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("LPStepperConfig: dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("LPStepperConfig: t_end must be non-negative");
    if (record_every < 1) throw std::invalid_argument("LPStepperConfig: record_every must be >= 1");
    if (snapshot_every < 0) throw std::invalid_argument("LPStepperConfig: snapshot_every must be >= 0");
    if (scheme != "strang") throw std::invalid_argument("LPStepperConfig: unknown scheme '" + scheme + "'");
  }
};

struct IntegratorAbort : std::runtime_error {
  PekarPair last_good;
  double t;
  IntegratorAbort(const std::string& what, PekarPair state, double time)
      : std::runtime_error(what), last_good(std::move(state)), t(time) {}
};

inline RVec inverse_momentum(const BoxLattice& lat, PotentialRange range = PotentialRange::full, double K = 0.0) {
  RVec inv(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double k = lat.momentum_norm(i);
    bool keep = k > 0.0;
    if (range == PotentialRange::low) keep = keep && k <= K;
    if (range == PotentialRange::high) keep = keep && k >= K;
    inv[i] = keep ? 1.0 / k : 0.0;
  }
  return inv;
}

// Phi(x) = w sum_k |k|^{-1} (e^{ikx} phi(k) + c.c.) over the selected range.
inline ComplexField potential_from_phi(const ModeVector& phi, PotentialRange range = PotentialRange::full,
                                       std::optional<double> K = std::nullopt) {
  if (range != PotentialRange::full) {
    if (!K) throw std::invalid_argument("potential_from_phi: ranged potential needs K");
    if (!(*K > 0.0)) throw std::invalid_argument("potential_from_phi: K must be positive");
  }
  if (phi.values[0] != cplx(0.0, 0.0)) throw std::invalid_argument("potential_from_phi: phi zero mode must vanish");
  const BoxLattice& lat = phi.lattice;
  CVec g = phi.values.cwiseProduct(inverse_momentum(lat, range, K.value_or(0.0)).cast<cplx>());
  fft_inplace(lat, g, +1);
  ComplexField out(lat);
  out.values = (2.0 * lat.mode_weight() * g.real()).cast<cplx>();
  return out;
}

class SpectralOps {
 public:
  SpectralOps(const BoxLattice& lat, double alpha)
      : lat_(lat), sqrt_alpha_(std::sqrt(alpha)), inv_k_(inverse_momentum(lat)), k2_(lat.size()) {
    if (lat.points_per_dim() % 2 != 0)
      throw std::invalid_argument("Landau-Pekar solver needs an even number of points per dimension");
    for (std::size_t i = 0; i < lat.size(); ++i) k2_[i] = lat.momentum_sq(i);
  }

  double sqrt_alpha() const { return sqrt_alpha_; }
  const BoxLattice& lattice() const { return lat_; }

  void kinetic(CVec& psi, double tau) const {
    if (tau != cached_tau_) {
      phase_.resize(k2_.size());
      for (Eigen::Index i = 0; i < k2_.size(); ++i) phase_[i] = std::polar(1.0 / lat_.size(), -tau * k2_[i]);
      cached_tau_ = tau;
    }
    fft_inplace(lat_, psi, -1);
    psi.array() *= phase_.array();
    fft_inplace(lat_, psi, +1);
  }

  CVec density_hat(const CVec& psi) const {
    CVec rho = psi.cwiseAbs2().cast<cplx>();
    fft_inplace(lat_, rho, -1);
    return rho * lat_.cell_volume();
  }

  CVec source(const CVec& psi) const {
    return sqrt_alpha_ * density_hat(psi).cwiseProduct(inv_k_.cast<cplx>());
  }

  RVec potential(const CVec& phi) const {
    CVec g = phi.cwiseProduct(inv_k_.cast<cplx>());
    fft_inplace(lat_, g, +1);
    return 2.0 * lat_.mode_weight() * g.real();
  }

  LPDiagnostics diagnostics(const CVec& psi, const CVec& phi) const {
    const double h = lat_.cell_volume(), w = lat_.mode_weight();
    CVec ph = psi;
    fft_inplace(lat_, ph, -1);
    // Unitary transform: |psi_hat|^2 w = |raw|^2 h^2 (2 pi)^{-d} w = |raw|^2 h / n^d.
    const double scale = h / static_cast<double>(lat_.size());
    double kin = 0.0, h2 = 0.0;
    for (Eigen::Index i = 0; i < ph.size(); ++i) {
      const double a = std::norm(ph[i]) * scale;
      kin += k2_[i] * a;
      h2 += (1.0 + k2_[i]) * (1.0 + k2_[i]) * a;
    }
    const RVec V = potential(phi);
    const double pot = h * (V.array() * psi.cwiseAbs2().array()).sum();
    LPDiagnostics d;
    d.norm = std::sqrt(h * psi.squaredNorm());
    d.energy = kin + sqrt_alpha_ * pot + w * phi.squaredNorm();
    d.h2_norm = std::sqrt(h2);
    double l21 = 0.0;
    for (Eigen::Index i = 0; i < phi.size(); ++i) l21 += (1.0 + k2_[i]) * std::norm(phi[i]);
    d.l21_norm = std::sqrt(w * l21);
    return d;
  }

 private:
  BoxLattice lat_;
  double sqrt_alpha_;
  RVec inv_k_;
  RVec k2_;
  mutable CVec phase_;
  mutable double cached_tau_ = std::numeric_limits<double>::quiet_NaN();
};

inline LPDiagnostics lp_diagnostics(const PekarPair& s) {
  SpectralOps ops(s.psi.lattice, s.alpha);
  return ops.diagnostics(s.psi.values, s.phi.values);
}

namespace detail {
inline void lp_step_unchecked(const SpectralOps& ops, PekarPair& s, double dt) {
  strang_step(ops, s.psi.values, s.phi.values, dt);
  if (!s.psi.values.allFinite() || !s.phi.values.allFinite())
    throw std::runtime_error("non-finite state");
}
}  // namespace detail

inline PekarPair lp_step(const PekarPair& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("lp_step: dt must be positive");
  state.validate(1e-8);
  SpectralOps ops(state.psi.lattice, state.alpha);
  PekarPair next = state;
  try {
    detail::lp_step_unchecked(ops, next, dt);
  } catch (const std::runtime_error&) {
    throw IntegratorAbort("lp_step: non-finite values", state, 0.0);
  }
  return next;
}

// Backward step; the scheme is symmetric so this inverts lp_step exactly.
inline PekarPair lp_reverse_step(const PekarPair& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("lp_reverse_step: dt must be positive");
  SpectralOps ops(state.psi.lattice, state.alpha);
  PekarPair prev = state;
  detail::lp_step_unchecked(ops, prev, -dt);
  return prev;
}

struct LPTrajectory {
  std::vector<PekarPair> snapshots;
  std::vector<double> snapshot_times;
  std::vector<LPDiagnostics> diagnostics;
};

inline LPTrajectory evolve(const PekarPair& initial, const LPStepperConfig& cfg) {
  cfg.validate();
  initial.validate(1e-8);
  SpectralOps ops(initial.psi.lattice, initial.alpha);
  LPTrajectory out;
  PekarPair s = initial;
  LPDiagnostics d0 = ops.diagnostics(s.psi.values, s.phi.values);
  out.diagnostics.push_back(d0);
  out.snapshots.push_back(s);
  out.snapshot_times.push_back(0.0);

  const long full = static_cast<long>(std::floor(cfg.t_end / cfg.dt + 1e-9));
  const double rest = cfg.t_end - full * cfg.dt;
  const long nsteps = full + (rest > 1e-12 * std::max(1.0, cfg.t_end) ? 1 : 0);
  double t = 0.0;
  for (long step = 1; step <= nsteps; ++step) {
    const double h = step <= full ? cfg.dt : rest;
    PekarPair prev = s;
    try {
      detail::lp_step_unchecked(ops, s, h);
    } catch (const std::runtime_error&) {
      throw IntegratorAbort("evolve: non-finite values at t=" + std::to_string(t + h), std::move(prev), t);
    }
    t = step <= full ? step * cfg.dt : cfg.t_end;
    const bool last = step == nsteps;
    if (step % cfg.record_every == 0 || last) {
      LPDiagnostics d = ops.diagnostics(s.psi.values, s.phi.values);
      d.t = t;
      d.energy_drift = d.energy - d0.energy;
      if (!std::isfinite(d.energy) || !std::isfinite(d.h2_norm))
        throw IntegratorAbort("evolve: non-finite diagnostics at t=" + std::to_string(t), std::move(prev), t);
      out.diagnostics.push_back(d);
    }
    if (last || (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0)) {
      out.snapshots.push_back(s);
      out.snapshot_times.push_back(t);
    }
  }
  return out;
}

// Normalized Gaussian exp(-|x-c|^2/(2 sigma^2)) summed over the nearest
// periodic images, so the sampled function is smooth on the torus.
inline ComplexField gaussian_field(const BoxLattice& lat, double sigma, const Vec3& center) {
  ComplexField f(lat);
  const double L = lat.box_length();
  const int d = lat.dim();
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Vec3 x = lat.position(i);
    double acc = 0.0;
    for (int a = -1; a <= 1; ++a)
      for (int b = (d == 3 ? -1 : 0); b <= (d == 3 ? 1 : 0); ++b)
        for (int c = (d == 3 ? -1 : 0); c <= (d == 3 ? 1 : 0); ++c) {
          const int img[3] = {a, b, c};
          double r2 = 0.0;
          for (int ax = 0; ax < d; ++ax) {
            const double dx = x[ax] - center[ax] + img[ax] * L;
            r2 += dx * dx;
          }
          acc += std::exp(-r2 / (2.0 * sigma * sigma));
        }
    f.values[i] = acc;
  }
  f.values /= f.norm();
  return f;
}

inline ComplexField default_gaussian(const BoxLattice& lat) {
  const double c = 0.5 * lat.box_length();
  return gaussian_field(lat, lat.box_length() / 8.0, Vec3{c, c, c});
}

// phi(k) = -sqrt(alpha) |k|^{-1} rho_hat(k): the stationary point of the
// phonon equation for frozen psi.
inline ModeVector fixed_point_phi(const ComplexField& psi, double alpha) {
  const BoxLattice& lat = psi.lattice;
  CVec rho = psi.values.cwiseAbs2().cast<cplx>();
  fft_inplace(lat, rho, -1);
  ModeVector phi(lat);
  const RVec inv = inverse_momentum(lat);
  phi.values = -std::sqrt(alpha) * lat.cell_volume() * rho.cwiseProduct(inv.cast<cplx>());
  return phi;
}

// Crude self-consistent relaxation: imaginary-time steps of -Laplace +
// sqrt(alpha) Phi with phi slaved to its fixed point.
inline PekarPair relax_pekar(const ComplexField& psi0, double alpha, double tau, int iterations) {
  SpectralOps ops(psi0.lattice, alpha);
  const BoxLattice& lat = psi0.lattice;
  CVec psi = psi0.values;
  RVec k2(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) k2[i] = lat.momentum_sq(i);
  const double h = lat.cell_volume();
  for (int it = 0; it < iterations; ++it) {
    ModeVector phi = fixed_point_phi(ComplexField(lat, psi), alpha);
    const RVec V = ops.potential(phi.values);
    psi.array() *= (-0.5 * tau * ops.sqrt_alpha() * V.array()).exp().cast<cplx>();
    fft_inplace(lat, psi, -1);
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] *= std::exp(-tau * k2[i]) / lat.size();
    fft_inplace(lat, psi, +1);
    psi.array() *= (-0.5 * tau * ops.sqrt_alpha() * V.array()).exp().cast<cplx>();
    psi /= std::sqrt(h * psi.squaredNorm());
  }
  ComplexField f(lat, psi);
  return PekarPair{f, fixed_point_phi(f, alpha), alpha};
}

struct GrowthFit {
  double C_h2 = 0.0;
  double C_l21 = 0.0;
  double late_slope_h2 = 0.0;
  double late_slope_l21 = 0.0;
  bool superlinear = false;
};

namespace detail {
// Least-squares slope of log y against log(1+t) over the second half.
inline double late_loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  if (n < 4) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = n / 2; i < n; ++i) {
    const double X = std::log1p(t[i]), Y = std::log(y[i]);
    sx += X; sy += Y; sxx += X * X; sxy += X * Y; ++m;
  }
  const double den = m * sxx - sx * sx;
  return den > 0 ? (m * sxy - sx * sy) / den : 0.0;
}
}  // namespace detail

// Envelope ||psi_t||_{H^2} <= C (1+t), ||phi_t||_{L^2_1} <= C (1+t).
inline GrowthFit fit_linear_growth(const std::vector<LPDiagnostics>& diags) {
  GrowthFit g;
  std::vector<double> t, h2, l21;
  for (const auto& d : diags) {
    g.C_h2 = std::max(g.C_h2, d.h2_norm / (1.0 + d.t));
    g.C_l21 = std::max(g.C_l21, d.l21_norm / (1.0 + d.t));
    t.push_back(d.t);
    h2.push_back(d.h2_norm);
    l21.push_back(std::max(d.l21_norm, 1e-300));
  }
  g.late_slope_h2 = detail::late_loglog_slope(t, h2);
  g.late_slope_l21 = detail::late_loglog_slope(t, l21);
  g.superlinear = g.late_slope_h2 > 1.0 + 1e-6 || g.late_slope_l21 > 1.0 + 1e-6;
  return g;
}

}  // namespace lpmf
