#pragma once

#include "lpmf/spectral/lattice.hpp"

#include <optional>
#include <string>

namespace lpmf {

enum class FormFactorKind { G, GLow, GHigh, B };

inline const char* to_string(FormFactorKind k) {
  switch (k) {
    case FormFactorKind::G: return "G";
    case FormFactorKind::GLow: return "G_K";
    case FormFactorKind::GHigh: return "G_geK";
    case FormFactorKind::B: return "B_K";
  }
  return "?";
}

inline bool needs_cutoff(FormFactorKind k) { return k != FormFactorKind::G; }

inline void check_cutoff(FormFactorKind kind, std::optional<double> K) {
  if (!needs_cutoff(kind)) return;
  if (!K) throw std::invalid_argument(std::string("form factor ") + to_string(kind) + " needs a cutoff K");
  if (!(*K > 0.0)) throw std::invalid_argument("form factor cutoff K must be positive");
}

// Radial profile without the phase: G -> 1/|k|, B -> -1/(|k|(1+k^2)), with
// the support restriction applied. The zero mode is always dropped.
inline double form_factor_profile(FormFactorKind kind, double K, double kabs) {
  if (kabs == 0.0) return 0.0;
  switch (kind) {
    case FormFactorKind::G: return 1.0 / kabs;
    case FormFactorKind::GLow: return kabs <= K ? 1.0 / kabs : 0.0;
    case FormFactorKind::GHigh: return kabs >= K ? 1.0 / kabs : 0.0;
    case FormFactorKind::B: return kabs >= K ? -1.0 / (kabs * (1.0 + kabs * kabs)) : 0.0;
  }
  return 0.0;
}

inline cplx form_factor_value(FormFactorKind kind, double K, const Vec3& k, const Vec3& x) {
  double prof = form_factor_profile(kind, K, norm3(k));
  if (prof == 0.0) return {0.0, 0.0};
  return prof * std::polar(1.0, -dot3(k, x));
}

struct FormFactor {
  FormFactorKind kind = FormFactorKind::G;
  std::optional<double> cutoff;
  Vec3 anchor{0, 0, 0};
  ModeVector values;
};

inline FormFactor make_form_factor(FormFactorKind kind, std::optional<double> K, const Vec3& x,
                                   const BoxLattice& lattice) {
  check_cutoff(kind, K);
  FormFactor f{kind, K, x, ModeVector(lattice)};
  const double Kv = K.value_or(0.0);
  for (std::size_t i = 0; i < lattice.size(); ++i)
    f.values.values[i] = form_factor_value(kind, Kv, lattice.momentum(i), x);
  return f;
}


// w-weighted lattice sums approximating the continuum L^2 norms.
inline double lattice_norm_sq(const FormFactor& f) {
  return f.values.lattice.mode_weight() * f.values.values.squaredNorm();
}

inline double lattice_k_norm_sq(const FormFactor& f) {
  const BoxLattice& lat = f.values.lattice;
  double s = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) s += lat.momentum_sq(i) * std::norm(f.values.values[i]);
  return lat.mode_weight() * s;
}

}  // namespace lpmf
