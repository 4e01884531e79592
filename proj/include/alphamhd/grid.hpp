#pragma once
// Uniform periodic box in 1, 2 or 3 dimensions.
//
// Integer mode m_j runs over [-n_j/2, n_j/2); the physical wavenumber is
// k_j = (2 pi / L_j) m_j, so k1(axis) = 2 pi / L is the smallest resolved
// wavenumber of that axis. Spectral storage is the real-to-complex half
// spectrum: the last axis keeps m in [0, n/2], all other axes store the full
// signed range in wrap-around order. Transform convention: forward is the
// plain sum over grid points, inverse divides by the total point count.

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "alphamhd/common.hpp"

namespace alphamhd {

class PeriodicGrid {
 public:
  PeriodicGrid(std::vector<int> n, std::vector<double> length) {
    dim_ = static_cast<int>(n.size());
    if (dim_ < 1 || dim_ > 3)
      throw ConfigError("grid: dim must be 1, 2 or 3");
    if (length.size() != n.size())
      throw ConfigError("grid: need one box length per axis");
    for (int a = 0; a < 3; ++a) {
      n_[a] = 1;
      ns_[a] = 1;
      len_[a] = 1.0;
    }
    for (int a = 0; a < dim_; ++a) {
      if (n[a] < 4 || n[a] % 2 != 0)
        throw ConfigError("grid: axis sizes must be even and >= 4");
      if (!(length[a] > 0.0))
        throw ConfigError("grid: box lengths must be positive");
      n_[a] = n[a];
      len_[a] = length[a];
    }
    for (int a = 0; a < dim_; ++a)
      ns_[a] = (a == dim_ - 1) ? n_[a] / 2 + 1 : n_[a];
    nphys_ = 1;
    nspec_ = 1;
    for (int a = 0; a < dim_; ++a) {
      nphys_ *= n_[a];
      nspec_ *= ns_[a];
    }
    for (int a = 0; a < dim_; ++a) {
      modes_[a].resize(ns_[a]);
      kphys_[a].resize(ns_[a]);
      const double k1 = 2.0 * kPi / len_[a];
      for (int i = 0; i < ns_[a]; ++i) {
        int m;
        if (a == dim_ - 1) {
          m = i;  // half spectrum: nonnegative modes only
        } else {
          m = (i <= n_[a] / 2) ? i : i - n_[a];
          if (i == n_[a] / 2) m = -n_[a] / 2;  // Nyquist stored as negative
        }
        modes_[a][i] = m;
        kphys_[a][i] = k1 * m;
      }
    }
  }

  int dim() const { return dim_; }
  int size(int axis) const { return n_[axis]; }
  int spectral_size(int axis) const { return ns_[axis]; }
  double length(int axis) const { return len_[axis]; }
  double k1(int axis) const { return 2.0 * kPi / len_[axis]; }
  std::int64_t physical_count() const { return nphys_; }
  std::int64_t spectral_count() const { return nspec_; }
  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= len_[a];
    return v;
  }
  double dx(int axis) const { return len_[axis] / n_[axis]; }
  double dx_min() const {
    double d = dx(0);
    for (int a = 1; a < dim_; ++a) d = d < dx(a) ? d : dx(a);
    return d;
  }
  // signed integer mode at a storage index
  int mode(int axis, int i) const { return modes_[axis][i]; }
  double kphys(int axis, int i) const { return kphys_[axis][i]; }
  // Two-thirds rule: modes with |m| > this are zeroed. The strict form
  // (n - 1) / 3 guarantees 3 * cutoff < n, so products of retained modes
  // never alias back into the retained band; for n not divisible by 3 it
  // coincides with n / 3.
  int dealias_cutoff(int axis) const { return (n_[axis] - 1) / 3; }

  // Smallest positive eigenvalue of -Laplacian on this box.
  double lambda1() const {
    double lam = k1(0) * k1(0);
    for (int a = 1; a < dim_; ++a) lam = std::min(lam, k1(a) * k1(a));
    return lam;
  }
  // conjugate-pair multiplicity of a half-spectrum entry along the last axis
  double hermitian_weight(int ilast) const {
    return (ilast == 0 || ilast == n_[dim_ - 1] / 2) ? 1.0 : 2.0;
  }
  bool same_shape(const PeriodicGrid& o) const {
    if (dim_ != o.dim_) return false;
    for (int a = 0; a < dim_; ++a)
      if (n_[a] != o.n_[a] || len_[a] != o.len_[a]) return false;
    return true;
  }

 private:
  int dim_ = 0;
  std::array<int, 3> n_{};   // physical points per axis
  std::array<int, 3> ns_{};  // spectral storage per axis
  std::array<double, 3> len_{};
  std::int64_t nphys_ = 0, nspec_ = 0;
  std::array<std::vector<int>, 3> modes_;
  std::array<std::vector<double>, 3> kphys_;
};

using GridPtr = std::shared_ptr<const PeriodicGrid>;

inline GridPtr make_grid(std::vector<int> n, std::vector<double> length) {
  return std::make_shared<PeriodicGrid>(std::move(n), std::move(length));
}

inline GridPtr make_cube(int dim, int n, double box = 2.0 * kPi) {
  return make_grid(std::vector<int>(dim, n), std::vector<double>(dim, box));
}

// Visit every stored spectral index. f(flat, i0, i1, i2) with storage
// indices; trailing indices are 0 below the grid dimension. Row major with
// the last axis fastest, matching the r2c layout.
template <class F>
inline void for_each_mode(const PeriodicGrid& g, F&& f) {
  const int d = g.dim();
  if (d == 1) {
    const int n0 = g.spectral_size(0);
    for (int i0 = 0; i0 < n0; ++i0) f(static_cast<std::int64_t>(i0), i0, 0, 0);
  } else if (d == 2) {
    const int n0 = g.spectral_size(0), n1 = g.spectral_size(1);
    std::int64_t flat = 0;
    for (int i0 = 0; i0 < n0; ++i0)
      for (int i1 = 0; i1 < n1; ++i1) f(flat++, i0, i1, 0);
  } else {
    const int n0 = g.spectral_size(0), n1 = g.spectral_size(1),
              n2 = g.spectral_size(2);
    std::int64_t flat = 0;
    for (int i0 = 0; i0 < n0; ++i0)
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) f(flat++, i0, i1, i2);
  }
}

// Visit every physical grid point. f(flat, x0, x1, x2) with coordinates.
template <class F>
inline void for_each_point(const PeriodicGrid& g, F&& f) {
  const int d = g.dim();
  if (d == 1) {
    const int n0 = g.size(0);
    const double h0 = g.dx(0);
    for (int i0 = 0; i0 < n0; ++i0)
      f(static_cast<std::int64_t>(i0), i0 * h0, 0.0, 0.0);
  } else if (d == 2) {
    const int n0 = g.size(0), n1 = g.size(1);
    const double h0 = g.dx(0), h1 = g.dx(1);
    std::int64_t flat = 0;
    for (int i0 = 0; i0 < n0; ++i0)
      for (int i1 = 0; i1 < n1; ++i1) f(flat++, i0 * h0, i1 * h1, 0.0);
  } else {
    const int n0 = g.size(0), n1 = g.size(1), n2 = g.size(2);
    const double h0 = g.dx(0), h1 = g.dx(1), h2 = g.dx(2);
    std::int64_t flat = 0;
    for (int i0 = 0; i0 < n0; ++i0)
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) f(flat++, i0 * h0, i1 * h1, i2 * h2);
  }
}

}  // namespace alphamhd
