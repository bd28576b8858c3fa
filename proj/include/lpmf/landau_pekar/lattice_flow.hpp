#pragma once

#include "lpmf/fock/model_spec.hpp"
#include "lpmf/spectral/lattice_operators.hpp"

#include <vector>

namespace lpmf {

// Landau-Pekar flow restricted to the truncated model: psi on the particle
// sites (l2-normalized), phi on the retained modes. It is the classical
// counterpart of H^F, so the Pekar-state energy per particle equals energy().
//   i psi' = (T + sqrt(alpha) V_phi) psi,   V_phi(x) = 2 Re <G_x, phi>_w
//   i phi' = phi + sqrt(alpha) sum_x |psi(x)|^2 G_x
struct LatticePair {
  CVec psi;
  CVec phi;
};

class LatticeLPFlow {
 public:
  explicit LatticeLPFlow(const ModelSpec& spec) : spec_(spec), sa_(std::sqrt(spec.alpha)) {
    T_ = lattice_laplacian(spec.sites).cast<cplx>();
    const int S = static_cast<int>(spec.sites.size());
    G_ = CMat(S, spec.mode_count());
    for (int x = 0; x < S; ++x) G_.row(x) = spec.form_factor(FormFactorKind::G, spec.sites.position(x)).transpose();
  }

  RVec potential(const CVec& phi) const {
    const double w = spec_.mode_weight();
    return (2.0 * w * (G_.conjugate() * phi).real()).eval();
  }

  CVec source(const CVec& psi) const { return (G_.transpose() * psi.cwiseAbs2().cast<cplx>()).eval(); }

  double energy(const LatticePair& s) const {
    const double kin = s.psi.dot(T_ * s.psi).real();
    const double pot = sa_ * (potential(s.phi).array() * s.psi.cwiseAbs2().array()).sum();
    return kin + pot + spec_.mode_weight() * s.phi.squaredNorm();
  }

  LatticePair rhs(const LatticePair& s) const {
    const cplx mi(0.0, -1.0);
    CVec dpsi = mi * (T_ * s.psi + sa_ * potential(s.phi).cast<cplx>().cwiseProduct(s.psi));
    CVec dphi = mi * (s.phi + sa_ * source(s.psi));
    return {dpsi, dphi};
  }

  // Classical fourth-order Runge-Kutta step.
  void step(LatticePair& s, double dt) const {
    auto axpy = [](const LatticePair& a, const LatticePair& k, double h) {
      return LatticePair{a.psi + h * k.psi, a.phi + h * k.phi};
    };
    const LatticePair k1 = rhs(s);
    const LatticePair k2 = rhs(axpy(s, k1, 0.5 * dt));
    const LatticePair k3 = rhs(axpy(s, k2, 0.5 * dt));
    const LatticePair k4 = rhs(axpy(s, k3, dt));
    s.psi += dt / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi);
    s.phi += dt / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
  }

  // States at the requested (increasing) times, integrated with steps <= dt_max.
  std::vector<LatticePair> sample(const LatticePair& init, const std::vector<double>& times,
                                  double dt_max = 1e-3) const {
    std::vector<LatticePair> out;
    LatticePair s = init;
    double t = 0.0;
    for (double target : times) {
      if (target < t) throw std::invalid_argument("LatticeLPFlow: sample times must be increasing");
      const double span = target - t;
      const long n = static_cast<long>(std::ceil(span / dt_max - 1e-12));
      for (long i = 0; i < n; ++i) step(s, span / n);
      t = target;
      out.push_back(s);
    }
    return out;
  }

 private:
  ModelSpec spec_;
  double sa_;
  CMat T_;
  CMat G_;  // G_(x, m) = G_x(k_m)
};

}  // namespace lpmf
