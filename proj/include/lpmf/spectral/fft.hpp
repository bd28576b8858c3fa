#pragma once

#include "lpmf/spectral/lattice.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace lpmf {

namespace detail {

// Plans are created once per (n, d, sign) and reused through the new-array
// execute interface, which is thread safe. Planning itself is serialized.
class FftPlanCache {
 public:
  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int d, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(n, d, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    int dims[3] = {n, n, n};
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(d, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, p);
    return p;
  }

  ~FftPlanCache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

// Unnormalized in-place DFT: sign -1 computes sum_x e^{-2 pi i j m / n} v_m.
inline void fft_inplace(const BoxLattice& lat, CVec& v, int sign) {
  if (static_cast<std::size_t>(v.size()) != lat.size())
    throw LatticeMismatch("fft: vector length does not match lattice");
  fftw_plan p = detail::FftPlanCache::instance().get(lat.points_per_dim(), lat.dim(),
                                                     sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  fftw_execute_dft(p, detail::as_fftw(v.data()), detail::as_fftw(v.data()));
}

// Unitary pair between the position measure (L/n)^d and the momentum measure
// (2 pi / L)^d:  fhat(k) = (2 pi)^{-d/2} h sum_x e^{-ikx} f(x).
inline ModeVector forward_ft(const ComplexField& f) {
  const BoxLattice& lat = f.lattice;
  CVec v = f.values;
  fft_inplace(lat, v, -1);
  v *= std::pow(2.0 * std::numbers::pi, -0.5 * lat.dim()) * lat.cell_volume();
  return ModeVector(lat, std::move(v));
}

inline ComplexField inverse_ft(const ModeVector& g) {
  const BoxLattice& lat = g.lattice;
  CVec v = g.values;
  fft_inplace(lat, v, +1);
  v *= std::pow(2.0 * std::numbers::pi, -0.5 * lat.dim()) * lat.mode_weight();
  return ComplexField(lat, std::move(v));
}

inline ModeVector forward_ft(const ComplexField& f, const BoxLattice& expected) {
  require_same(f.lattice, expected, "forward_ft");
  return forward_ft(f);
}

inline ComplexField inverse_ft(const ModeVector& g, const BoxLattice& expected) {
  require_same(g.lattice, expected, "inverse_ft");
  return inverse_ft(g);
}

}  // namespace lpmf
