#pragma once
// Field containers. A SpectralField stores the r2c half spectrum of each
// component; the implied conjugate modes are reconstructed through the
// Hermitian symmetry of the stored planes. Fields carrying the zero_mean
// flag keep the k = 0 coefficient pinned to zero exactly.

#include <cmath>
#include <complex>
#include <cstdint>

#include "alphamhd/grid.hpp"

namespace alphamhd {

template <class Real>
struct SpectralField {
  using C = std::complex<Real>;
  GridPtr grid;
  int ncomp = 0;
  bool zero_mean = false;
  avector<C> data;  // ncomp contiguous blocks of grid->spectral_count()

  SpectralField() = default;
  SpectralField(GridPtr g, int ncomp_, bool zero_mean_)
      : grid(std::move(g)),
        ncomp(ncomp_),
        zero_mean(zero_mean_),
        data(static_cast<std::size_t>(ncomp_) * grid->spectral_count(),
             C(0, 0)) {}

  std::int64_t count() const { return grid->spectral_count(); }
  C* comp(int c) { return data.data() + static_cast<std::size_t>(c) * count(); }
  const C* comp(int c) const {
    return data.data() + static_cast<std::size_t>(c) * count();
  }

  void set_zero() {
    for (auto& z : data) z = C(0, 0);
  }
  void pin_zero_mean() {
    for (int c = 0; c < ncomp; ++c) comp(c)[0] = C(0, 0);
  }
  // this += a * x
  void axpy(Real a, const SpectralField& x) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += a * x.data[i];
  }
  void scale(Real a) {
    for (auto& z : data) z *= a;
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data) {
      double v = std::abs(std::complex<double>(z.real(), z.imag()));
      if (v > m) m = v;
    }
    return m;
  }
  bool finite() const {
    for (const auto& z : data)
      if (!std::isfinite(static_cast<double>(z.real())) ||
          !std::isfinite(static_cast<double>(z.imag())))
        return false;
    return true;
  }
};

template <class Real>
inline SpectralField<Real> spectral_scalar(GridPtr g, bool zero_mean = true) {
  return SpectralField<Real>(std::move(g), 1, zero_mean);
}

template <class Real>
inline SpectralField<Real> spectral_vector(GridPtr g, bool zero_mean = true) {
  int d = g->dim();
  return SpectralField<Real>(std::move(g), d, zero_mean);
}

template <class Real>
inline SpectralField<Real> like(const SpectralField<Real>& f) {
  return SpectralField<Real>(f.grid, f.ncomp, f.zero_mean);
}

template <class Real>
struct PhysicalField {
  GridPtr grid;
  int ncomp = 0;
  avector<Real> data;  // ncomp contiguous blocks of grid->physical_count()

  PhysicalField() = default;
  PhysicalField(GridPtr g, int ncomp_)
      : grid(std::move(g)),
        ncomp(ncomp_),
        data(static_cast<std::size_t>(ncomp_) * grid->physical_count(),
             Real(0)) {}

  std::int64_t count() const { return grid->physical_count(); }
  Real* comp(int c) { return data.data() + static_cast<std::size_t>(c) * count(); }
  const Real* comp(int c) const {
    return data.data() + static_cast<std::size_t>(c) * count();
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data) {
      double a = std::fabs(static_cast<double>(v));
      if (a > m) m = a;
    }
    return m;
  }
  bool finite() const {
    for (const auto& v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }
};

template <class Real>
inline PhysicalField<Real> physical_scalar(GridPtr g) {
  return PhysicalField<Real>(std::move(g), 1);
}

template <class Real>
inline PhysicalField<Real> physical_vector(GridPtr g) {
  int d = g->dim();
  return PhysicalField<Real>(std::move(g), d);
}

// Repair the Hermitian symmetry of directly constructed spectral data.
// Only the last-axis planes i_last = 0 and i_last = n/2 contain both halves
// of conjugate pairs inside the stored array; partners there are averaged
// and self-conjugate entries are made real. Fields produced by the forward
// transform of real data satisfy this already.
template <class Real>
inline void enforce_hermitian(SpectralField<Real>& f) {
  using C = std::complex<Real>;
  const PeriodicGrid& g = *f.grid;
  const int d = g.dim();
  const int nlast = g.size(d - 1);
  const int planes[2] = {0, nlast / 2};
  for (int c = 0; c < f.ncomp; ++c) {
    C* a = f.comp(c);
    for (int pi = 0; pi < 2; ++pi) {
      const int il = planes[pi];
      if (d == 1) {
        a[il] = C(a[il].real(), Real(0));
      } else if (d == 2) {
        const int n0 = g.size(0), ns1 = g.spectral_size(1);
        for (int i0 = 0; i0 < n0; ++i0) {
          int j0 = (n0 - i0) % n0;
          std::int64_t self = static_cast<std::int64_t>(i0) * ns1 + il;
          std::int64_t part = static_cast<std::int64_t>(j0) * ns1 + il;
          if (j0 == i0) {
            a[self] = C(a[self].real(), Real(0));
          } else if (j0 > i0) {
            C avg = Real(0.5) * (a[self] + std::conj(a[part]));
            a[self] = avg;
            a[part] = std::conj(avg);
          }
        }
      } else {
        const int n0 = g.size(0), n1 = g.size(1), ns1 = g.spectral_size(1),
                  ns2 = g.spectral_size(2);
        for (int i0 = 0; i0 < n0; ++i0) {
          for (int i1 = 0; i1 < n1; ++i1) {
            int j0 = (n0 - i0) % n0, j1 = (n1 - i1) % n1;
            bool self_conj = (j0 == i0 && j1 == i1);
            bool canonical = (j0 > i0) || (j0 == i0 && j1 > i1);
            std::int64_t self =
                (static_cast<std::int64_t>(i0) * ns1 + i1) * ns2 + il;
            std::int64_t part =
                (static_cast<std::int64_t>(j0) * ns1 + j1) * ns2 + il;
            if (self_conj) {
              a[self] = C(a[self].real(), Real(0));
            } else if (canonical) {
              C avg = Real(0.5) * (a[self] + std::conj(a[part]));
              a[self] = avg;
              a[part] = std::conj(avg);
            }
          }
        }
      }
    }
  }
  if (f.zero_mean) f.pin_zero_mean();
}

}  // namespace alphamhd
