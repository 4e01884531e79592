#pragma once
// Seeded random spectral fields for tests, perturbations and magnetic
// seeding. Draw order follows storage order, so a seed pins the field
// exactly; the spectrum envelope concentrates energy at low |m|.

#include "alphamhd/operators.hpp"

namespace alphamhd {

namespace rf_detail {

template <class Real>
inline void fill_random_spectrum(SpectralField<Real>& f, std::uint64_t seed,
                                 double m_peak) {
  const PeriodicGrid& g = *f.grid;
  const int d = g.dim();
  Rng rng(seed);
  const int c0 = g.dealias_cutoff(0);
  const int c1 = d > 1 ? g.dealias_cutoff(1) : 0;
  const int c2 = d > 2 ? g.dealias_cutoff(2) : 0;
  for (int c = 0; c < f.ncomp; ++c) {
    auto* a = f.comp(c);
    for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
      const int m0 = g.mode(0, i0);
      const int m1 = d > 1 ? g.mode(1, i1) : 0;
      const int m2 = d > 2 ? g.mode(2, i2) : 0;
      if (m0 == 0 && m1 == 0 && m2 == 0) return;
      if (std::abs(m0) > c0 || std::abs(m1) > c1 || std::abs(m2) > c2) return;
      const double mm = m0 * m0 + m1 * m1 + m2 * m2;
      const double env = std::exp(-mm / (m_peak * m_peak));
      const double re = rng.gaussian() * env;
      const double im = rng.gaussian() * env;
      a[flat] = std::complex<Real>(Real(re), Real(im));
    });
  }
}

}  // namespace rf_detail

// Divergence-free, zero-mean, dealiased vector field normalized to the
// requested L2 norm. Identical seeds give identical fields.
template <class Real>
inline SpectralField<Real> random_solenoidal(GridPtr grid, std::uint64_t seed,
                                             double l2_norm_target = 1.0,
                                             double m_peak = 2.0) {
  SpectralField<Real> f = spectral_vector<Real>(grid, true);
  rf_detail::fill_random_spectrum(f, seed, m_peak);
  enforce_hermitian(f);
  leray_project(f);
  dealias(f);
  f.pin_zero_mean();
  const double n = l2_norm(f);
  if (n > 0.0) f.scale(Real(l2_norm_target / n));
  return f;
}

// General (not solenoidal) random vector field, same hygiene otherwise.
template <class Real>
inline SpectralField<Real> random_vector(GridPtr grid, std::uint64_t seed,
                                         double l2_norm_target = 1.0,
                                         double m_peak = 2.0) {
  SpectralField<Real> f = spectral_vector<Real>(grid, true);
  rf_detail::fill_random_spectrum(f, seed, m_peak);
  enforce_hermitian(f);
  dealias(f);
  f.pin_zero_mean();
  const double n = l2_norm(f);
  if (n > 0.0) f.scale(Real(l2_norm_target / n));
  return f;
}

template <class Real>
inline SpectralField<Real> random_scalar(GridPtr grid, std::uint64_t seed,
                                         double l2_norm_target = 1.0,
                                         double m_peak = 2.0) {
  SpectralField<Real> f = spectral_scalar<Real>(grid, true);
  rf_detail::fill_random_spectrum(f, seed, m_peak);
  enforce_hermitian(f);
  dealias(f);
  f.pin_zero_mean();
  const double n = l2_norm(f);
  if (n > 0.0) f.scale(Real(l2_norm_target / n));
  return f;
}

}  // namespace alphamhd
