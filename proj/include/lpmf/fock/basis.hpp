#pragma once

#include "lpmf/fock/model_spec.hpp"

#include <cstdint>
#include <memory>
#include <unordered_map>

namespace lpmf {

// Symmetric N-particle configurations on S sites, stored as sorted site
// tuples in lexicographic order.
class ParticleSector {
 public:
  ParticleSector(int sites, int n) : S_(sites), N_(n) {
    std::vector<int> t(N_, 0);
    while (true) {
      tuples_.insert(tuples_.end(), t.begin(), t.end());
      codes_.push_back(encode(t.data()));
      int i = N_ - 1;
      while (i >= 0 && t[i] == S_ - 1) --i;
      if (i < 0) break;
      const int v = t[i] + 1;
      for (int j = i; j < N_; ++j) t[j] = v;
    }
    occ_.assign(size() * S_, 0);
    for (std::size_t c = 0; c < size(); ++c)
      for (int j = 0; j < N_; ++j) ++occ_[c * S_ + site(c, j)];
  }

  std::size_t size() const { return codes_.size(); }
  int sites() const { return S_; }
  int particles() const { return N_; }
  int site(std::size_t c, int j) const { return tuples_[c * N_ + j]; }
  int occupation(std::size_t c, int x) const { return occ_[c * S_ + x]; }

  std::size_t index_of(const std::vector<int>& sorted_sites) const {
    const uint64_t code = encode(sorted_sites.data());
    auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
    if (it == codes_.end() || *it != code) throw std::out_of_range("ParticleSector: configuration not found");
    return static_cast<std::size_t>(it - codes_.begin());
  }

  std::vector<int> tuple(std::size_t c) const {
    return std::vector<int>(tuples_.begin() + c * N_, tuples_.begin() + (c + 1) * N_);
  }

  // Configuration reached by moving one particle from site b to site a, and
  // the bosonic factor sqrt(n_b) sqrt(n_a + 1 - delta_ab).
  std::pair<std::size_t, double> hop(std::size_t c, int b, int a) const {
    const int nb = occupation(c, b);
    if (nb == 0) return {c, 0.0};
    if (a == b) return {c, static_cast<double>(nb)};
    std::vector<int> t = tuple(c);
    auto it = std::find(t.begin(), t.end(), b);
    *it = a;
    std::sort(t.begin(), t.end());
    return {index_of(t), std::sqrt(static_cast<double>(nb) * (occupation(c, a) + 1))};
  }

 private:
  uint64_t encode(const int* t) const {
    uint64_t code = 0;
    for (int j = 0; j < N_; ++j) code = code * static_cast<uint64_t>(S_) + static_cast<uint64_t>(t[j]);
    return code;
  }

  int S_, N_;
  std::vector<int> tuples_;
  std::vector<uint64_t> codes_;
  std::vector<int> occ_;
};

// Phonon occupation vectors over M modes with total <= Lambda, ordered by
// total and then lexicographically by sorted mode tuple.
class PhononSector {
 public:
  struct Ladder {
    std::vector<uint32_t> src, dst;
    std::vector<double> amp;  // a_m |src> = amp |dst>
  };

  PhononSector(int modes, int cutoff) : M_(modes), Lambda_(cutoff) {
    for (int tot = 0; tot <= Lambda_; ++tot) {
      if (M_ == 0 && tot > 0) break;
      std::vector<int> t(tot, 0);
      while (true) {
        add_state(t);
        int i = tot - 1;
        while (i >= 0 && t[i] == M_ - 1) --i;
        if (i < 0) break;
        const int v = t[i] + 1;
        for (int j = i; j < tot; ++j) t[j] = v;
      }
    }
    ladders_.resize(M_);
    for (std::size_t p = 0; p < size(); ++p)
      for (int m = 0; m < M_; ++m) {
        const int nm = occupation(p, m);
        if (nm == 0) continue;
        std::vector<uint8_t> o(occ_.begin() + p * M_, occ_.begin() + (p + 1) * M_);
        --o[m];
        ladders_[m].src.push_back(static_cast<uint32_t>(p));
        ladders_[m].dst.push_back(static_cast<uint32_t>(index_of(o)));
        ladders_[m].amp.push_back(std::sqrt(static_cast<double>(nm)));
      }
  }

  std::size_t size() const { return total_.size(); }
  int modes() const { return M_; }
  int cutoff() const { return Lambda_; }
  int occupation(std::size_t p, int m) const { return occ_[p * M_ + m]; }
  int total(std::size_t p) const { return total_[p]; }
  const Ladder& ladder(int m) const { return ladders_[m]; }

  std::size_t index_of(const std::vector<uint8_t>& occ) const {
    auto it = lookup_.find(encode(occ));
    if (it == lookup_.end()) throw std::out_of_range("PhononSector: occupation not in truncated space");
    return it->second;
  }

  RVec number_diagonal() const {
    RVec d(size());
    for (std::size_t p = 0; p < size(); ++p) d[p] = total_[p];
    return d;
  }

 private:
  uint64_t encode(const std::vector<uint8_t>& o) const {
    uint64_t code = 0;
    for (int m = 0; m < M_; ++m) code = code * static_cast<uint64_t>(Lambda_ + 1) + o[m];
    return code;
  }

  void add_state(const std::vector<int>& t) {
    std::vector<uint8_t> o(M_, 0);
    for (int m : t) ++o[m];
    lookup_.emplace(encode(o), static_cast<uint32_t>(size()));
    occ_.insert(occ_.end(), o.begin(), o.end());
    total_.push_back(static_cast<int>(t.size()));
  }

  int M_, Lambda_;
  std::vector<uint8_t> occ_;
  std::vector<int> total_;
  std::unordered_map<uint64_t, uint32_t> lookup_;
  std::vector<Ladder> ladders_;
};

// Tensor basis with index = configuration * P + phonon state, so each
// particle configuration owns a contiguous block of the state vector.
class ManyBodyBasis {
 public:
  ManyBodyBasis(const ModelSpec& spec)
      : spec_(spec),
        particles_(static_cast<int>(spec.sites.size()), spec.n_particles),
        phonons_(static_cast<int>(spec.modes.size()), spec.phonon_cutoff) {}

  const ModelSpec& spec() const { return spec_; }
  const ParticleSector& particles() const { return particles_; }
  const PhononSector& phonons() const { return phonons_; }
  std::size_t dim() const { return particles_.size() * phonons_.size(); }
  std::size_t block() const { return phonons_.size(); }
  std::size_t index(std::size_t c, std::size_t p) const { return c * phonons_.size() + p; }
  std::pair<std::size_t, std::size_t> split(std::size_t i) const { return {i / block(), i % block()}; }

 private:
  ModelSpec spec_;
  ParticleSector particles_;
  PhononSector phonons_;
};

using BasisPtr = std::shared_ptr<const ManyBodyBasis>;

inline BasisPtr build_bases(const ModelSpec& spec) {
  spec.validate();
  const double est = estimate_dimension(spec);
  if (est > static_cast<double>(spec.dimension_cap)) throw DimensionCapExceeded(est, spec.dimension_cap);
  return std::make_shared<const ManyBodyBasis>(spec);
}

struct ManyBodyState {
  BasisPtr basis;
  CVec coeffs;

  double norm() const { return coeffs.norm(); }
};

}  // namespace lpmf
