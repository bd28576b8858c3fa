#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lpmf {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Vec3 = std::array<double, 3>;
using Idx3 = std::array<int, 3>;

struct LatticeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Periodic box [0, L)^d sampled at n points per dimension. Position index
// ordering is row-major with the last axis fastest; momentum entries use the
// same storage ordering with FFT frequency folding, i.e. storage index m maps
// to the integer frequency j = m for m < ceil(n/2) and j = m - n otherwise.
class BoxLattice {
 public:
  BoxLattice() = default;
  BoxLattice(double box_length, int points_per_dim, int dim)
      : L_(box_length), n_(points_per_dim), d_(dim) {
    if (!(L_ > 0.0) || !std::isfinite(L_))
      throw std::invalid_argument("BoxLattice: box length must be positive");
    if (n_ < 1) throw std::invalid_argument("BoxLattice: need at least one point per dimension");
    if (d_ != 1 && d_ != 3) throw std::invalid_argument("BoxLattice: dimension must be 1 or 3");
    size_ = 1;
    for (int i = 0; i < d_; ++i) size_ *= static_cast<std::size_t>(n_);
  }

  double box_length() const { return L_; }
  int points_per_dim() const { return n_; }
  int dim() const { return d_; }
  std::size_t size() const { return size_; }

  double spacing() const { return L_ / n_; }
  double cell_volume() const { return std::pow(spacing(), d_); }
  double dk() const { return 2.0 * std::numbers::pi / L_; }
  double mode_weight() const { return std::pow(dk(), d_); }

  Idx3 unravel(std::size_t idx) const {
    Idx3 m{0, 0, 0};
    for (int a = d_ - 1; a >= 0; --a) {
      m[a] = static_cast<int>(idx % n_);
      idx /= n_;
    }
    return m;
  }

  std::size_t ravel(Idx3 m) const {
    std::size_t idx = 0;
    for (int a = 0; a < d_; ++a) {
      int v = ((m[a] % n_) + n_) % n_;
      idx = idx * n_ + static_cast<std::size_t>(v);
    }
    return idx;
  }

  Vec3 position(std::size_t idx) const {
    Idx3 m = unravel(idx);
    Vec3 x{0, 0, 0};
    for (int a = 0; a < d_; ++a) x[a] = m[a] * spacing();
    return x;
  }

  int frequency(int m) const { return m < (n_ + 1) / 2 ? m : m - n_; }

  Idx3 frequency_index(std::size_t idx) const {
    Idx3 m = unravel(idx);
    for (int a = 0; a < d_; ++a) m[a] = frequency(m[a]);
    return m;
  }

  Vec3 momentum(std::size_t idx) const {
    Idx3 j = frequency_index(idx);
    Vec3 k{0, 0, 0};
    for (int a = 0; a < d_; ++a) k[a] = j[a] * dk();
    return k;
  }

  double momentum_sq(std::size_t idx) const {
    Vec3 k = momentum(idx);
    return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  }

  double momentum_norm(std::size_t idx) const { return std::sqrt(momentum_sq(idx)); }
  bool is_zero_mode(std::size_t idx) const { return idx == 0; }

  friend bool operator==(const BoxLattice& a, const BoxLattice& b) {
    return a.L_ == b.L_ && a.n_ == b.n_ && a.d_ == b.d_;
  }

  std::string describe() const {
    return "L=" + std::to_string(L_) + " n=" + std::to_string(n_) + " d=" + std::to_string(d_);
  }

 private:
  double L_ = 1.0;
  int n_ = 1;
  int d_ = 1;
  std::size_t size_ = 1;
};

inline double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

struct ComplexField {
  BoxLattice lattice;
  CVec values;

  ComplexField() = default;
  explicit ComplexField(const BoxLattice& lat) : lattice(lat), values(CVec::Zero(lat.size())) {}
  ComplexField(const BoxLattice& lat, CVec v) : lattice(lat), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != lattice.size())
      throw LatticeMismatch("ComplexField: value count does not match lattice");
  }

  double norm() const { return std::sqrt(lattice.cell_volume()) * values.norm(); }
  bool finite() const { return values.allFinite(); }
};

struct ModeVector {
  BoxLattice lattice;
  CVec values;

  ModeVector() = default;
  explicit ModeVector(const BoxLattice& lat) : lattice(lat), values(CVec::Zero(lat.size())) {}
  ModeVector(const BoxLattice& lat, CVec v) : lattice(lat), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != lattice.size())
      throw LatticeMismatch("ModeVector: value count does not match lattice");
  }

  double norm() const { return std::sqrt(lattice.mode_weight()) * values.norm(); }

  // ||(1+|k|^2)^{1/2} phi|| with the momentum measure w.
  double l21_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i)
      s += (1.0 + lattice.momentum_sq(i)) * std::norm(values[i]);
    return std::sqrt(lattice.mode_weight() * s);
  }
};

inline void require_same(const BoxLattice& a, const BoxLattice& b, const char* what) {
  if (!(a == b)) throw LatticeMismatch(std::string(what) + ": lattice mismatch (" + a.describe() +
                                       " vs " + b.describe() + ")");
}

}  // namespace lpmf
