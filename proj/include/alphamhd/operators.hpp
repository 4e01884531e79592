#pragma once
// Spectral calculus on half-spectrum fields: derivatives, Leray projection,
// inverse-Helmholtz filtering, two-thirds dealiasing, and Parseval-weighted
// inner products. All symbols act per mode with the physical wavenumber
// k_j = (2 pi / L_j) m_j; the k = 0 mode is left untouched by the projector
// and carries symbol 0 for every derivative.

#include <cmath>

#include "alphamhd/fft.hpp"

namespace alphamhd {

// ---- diagonal symbol helpers -------------------------------------------

template <class Real>
inline void dealias(SpectralField<Real>& f) {
  const PeriodicGrid& g = *f.grid;
  const int d = g.dim();
  const int c0 = g.dealias_cutoff(0);
  const int c1 = d > 1 ? g.dealias_cutoff(1) : 0;
  const int c2 = d > 2 ? g.dealias_cutoff(2) : 0;
  for (int c = 0; c < f.ncomp; ++c) {
    auto* a = f.comp(c);
    for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
      bool cut = std::abs(g.mode(0, i0)) > c0;
      if (d > 1) cut = cut || std::abs(g.mode(1, i1)) > c1;
      if (d > 2) cut = cut || std::abs(g.mode(2, i2)) > c2;
      if (cut) a[flat] = std::complex<Real>(0, 0);
    });
  }
}

// P = I - k k^T / |k|^2 per mode; k = 0 untouched
template <class Real>
inline void leray_project(SpectralField<Real>& f) {
  const PeriodicGrid& g = *f.grid;
  const int d = g.dim();
  if (f.ncomp != d)
    throw ConfigError("leray_project: field must have dim components");
  using C = std::complex<Real>;
  if (d == 2) {
    C* a0 = f.comp(0);
    C* a1 = f.comp(1);
    for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int) {
      const double k0 = g.kphys(0, i0), k1 = g.kphys(1, i1);
      const double k2 = k0 * k0 + k1 * k1;
      if (k2 == 0.0) return;
      const C dot = Real(k0) * a0[flat] + Real(k1) * a1[flat];
      const Real inv = Real(1.0 / k2);
      a0[flat] -= Real(k0) * inv * dot;
      a1[flat] -= Real(k1) * inv * dot;
    });
  } else if (d == 3) {
    C* a0 = f.comp(0);
    C* a1 = f.comp(1);
    C* a2 = f.comp(2);
    for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
      const double k0 = g.kphys(0, i0), k1 = g.kphys(1, i1),
                   k2 = g.kphys(2, i2);
      const double kk = k0 * k0 + k1 * k1 + k2 * k2;
      if (kk == 0.0) return;
      const C dot =
          Real(k0) * a0[flat] + Real(k1) * a1[flat] + Real(k2) * a2[flat];
      const Real inv = Real(1.0 / kk);
      a0[flat] -= Real(k0) * inv * dot;
      a1[flat] -= Real(k1) * inv * dot;
      a2[flat] -= Real(k2) * inv * dot;
    });
  } else {
    throw ConfigError("leray_project: dim must be 2 or 3");
  }
}

namespace op_detail {

template <class Real, class F>
inline void scale_by_k2(SpectralField<Real>& f, F&& factor_of_k2) {
  const PeriodicGrid& g = *f.grid;
  const int d = g.dim();
  for (int c = 0; c < f.ncomp; ++c) {
    auto* a = f.comp(c);
    for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
      double k2 = g.kphys(0, i0) * g.kphys(0, i0);
      if (d > 1) k2 += g.kphys(1, i1) * g.kphys(1, i1);
      if (d > 2) k2 += g.kphys(2, i2) * g.kphys(2, i2);
      a[flat] *= Real(factor_of_k2(k2));
    });
  }
}

}  // namespace op_detail

// multiply by (1 + alpha^2 |k|^2); alpha = 0 multiplies by exactly 1
template <class Real>
inline void helmholtz_apply(SpectralField<Real>& f, double alpha) {
  const double a2 = alpha * alpha;
  op_detail::scale_by_k2(f, [a2](double k2) { return 1.0 + a2 * k2; });
}

template <class Real>
inline void helmholtz_invert(SpectralField<Real>& f, double alpha) {
  const double a2 = alpha * alpha;
  op_detail::scale_by_k2(f, [a2](double k2) { return 1.0 / (1.0 + a2 * k2); });
}

template <class Real>
inline SpectralField<Real> helmholtz_applied(const SpectralField<Real>& f,
                                             double alpha) {
  SpectralField<Real> out = f;
  helmholtz_apply(out, alpha);
  return out;
}

template <class Real>
inline void laplacian(SpectralField<Real>& f) {
  op_detail::scale_by_k2(f, [](double k2) { return -k2; });
}

// ---- derivatives ---------------------------------------------------------

namespace op_detail {

// out = i * k_axis * in (single component arrays)
template <class Real>
inline void apply_ik(const PeriodicGrid& g, int axis,
                     const std::complex<Real>* in, std::complex<Real>* out) {
  for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
    const int idx = axis == 0 ? i0 : (axis == 1 ? i1 : i2);
    const Real k = Real(g.kphys(axis, idx));
    const std::complex<Real> z = in[flat];
    out[flat] = std::complex<Real>(-k * z.imag(), k * z.real());
  });
}

}  // namespace op_detail

template <class Real>
inline SpectralField<Real> gradient(const SpectralField<Real>& s) {
  if (s.ncomp != 1) throw ConfigError("gradient: scalar input required");
  const PeriodicGrid& g = *s.grid;
  SpectralField<Real> out(s.grid, g.dim(), true);
  for (int a = 0; a < g.dim(); ++a)
    op_detail::apply_ik(g, a, s.comp(0), out.comp(a));
  return out;
}

template <class Real>
inline SpectralField<Real> divergence(const SpectralField<Real>& w) {
  const PeriodicGrid& g = *w.grid;
  if (w.ncomp != g.dim())
    throw ConfigError("divergence: vector input required");
  SpectralField<Real> out(w.grid, 1, true);
  SpectralField<Real> tmp(w.grid, 1, true);
  op_detail::apply_ik(g, 0, w.comp(0), out.comp(0));
  for (int a = 1; a < g.dim(); ++a) {
    op_detail::apply_ik(g, a, w.comp(a), tmp.comp(0));
    auto* o = out.comp(0);
    const auto* t = tmp.comp(0);
    for (std::int64_t i = 0; i < out.count(); ++i) o[i] += t[i];
  }
  return out;
}

// 3D vector curl
template <class Real>
inline SpectralField<Real> curl(const SpectralField<Real>& w) {
  const PeriodicGrid& g = *w.grid;
  if (g.dim() != 3 || w.ncomp != 3)
    throw ConfigError("curl: 3D vector input required (2D uses perp_gradient/scalar_curl)");
  using C = std::complex<Real>;
  SpectralField<Real> out(w.grid, 3, true);
  const C* w0 = w.comp(0);
  const C* w1 = w.comp(1);
  const C* w2 = w.comp(2);
  C* o0 = out.comp(0);
  C* o1 = out.comp(1);
  C* o2 = out.comp(2);
  auto mul_i = [](Real k, C z) { return C(-k * z.imag(), k * z.real()); };
  for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
    const Real k0 = Real(g.kphys(0, i0));
    const Real k1 = Real(g.kphys(1, i1));
    const Real k2 = Real(g.kphys(2, i2));
    o0[flat] = mul_i(k1, w2[flat]) - mul_i(k2, w1[flat]);
    o1[flat] = mul_i(k2, w0[flat]) - mul_i(k0, w2[flat]);
    o2[flat] = mul_i(k0, w1[flat]) - mul_i(k1, w0[flat]);
  });
  return out;
}

// 2D perp gradient of a scalar streamfunction: (-d/dy, d/dx) psi
template <class Real>
inline SpectralField<Real> perp_gradient(const SpectralField<Real>& s) {
  const PeriodicGrid& g = *s.grid;
  if (g.dim() != 2 || s.ncomp != 1)
    throw ConfigError("perp_gradient: 2D scalar input required");
  using C = std::complex<Real>;
  SpectralField<Real> out(s.grid, 2, true);
  const C* p = s.comp(0);
  C* o0 = out.comp(0);
  C* o1 = out.comp(1);
  for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int) {
    const Real k0 = Real(g.kphys(0, i0));
    const Real k1 = Real(g.kphys(1, i1));
    const C z = p[flat];
    o0[flat] = C(k1 * z.imag(), -k1 * z.real());   // -i k1 psi
    o1[flat] = C(-k0 * z.imag(), k0 * z.real());   // +i k0 psi
  });
  return out;
}

// 2D scalar curl of a vector: d/dx w1 - d/dy w0
template <class Real>
inline SpectralField<Real> scalar_curl(const SpectralField<Real>& w) {
  const PeriodicGrid& g = *w.grid;
  if (g.dim() != 2 || w.ncomp != 2)
    throw ConfigError("scalar_curl: 2D vector input required");
  using C = std::complex<Real>;
  SpectralField<Real> out(w.grid, 1, true);
  const C* w0 = w.comp(0);
  const C* w1 = w.comp(1);
  C* o = out.comp(0);
  for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int) {
    const Real k0 = Real(g.kphys(0, i0));
    const Real k1 = Real(g.kphys(1, i1));
    o[flat] = C(-k0 * w1[flat].imag() + k1 * w0[flat].imag(),
                k0 * w1[flat].real() - k1 * w0[flat].real());
  });
  return out;
}

// ---- inner products and norms (Parseval) ---------------------------------

// Integral over the box of sum_c a_c b_c, as a weighted spectral sum.
// The per-mode weight w(|k|^2) makes one routine serve the plain L2 pairing
// (w = 1), the H1 seminorm (w = |k|^2) and filtered energies.
template <class Real, class W>
inline double spectral_pairing(const SpectralField<Real>& a,
                               const SpectralField<Real>& b, W&& w) {
  const PeriodicGrid& g = *a.grid;
  if (a.ncomp != b.ncomp || !g.same_shape(*b.grid))
    throw ConfigError("spectral_pairing: mismatched fields");
  const int d = g.dim();
  const double scale =
      g.volume() / (static_cast<double>(g.physical_count()) *
                    static_cast<double>(g.physical_count()));
  double total = 0.0;
  for (int c = 0; c < a.ncomp; ++c) {
    const auto* pa = a.comp(c);
    const auto* pb = b.comp(c);
    for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
      double k2 = g.kphys(0, i0) * g.kphys(0, i0);
      if (d > 1) k2 += g.kphys(1, i1) * g.kphys(1, i1);
      if (d > 2) k2 += g.kphys(2, i2) * g.kphys(2, i2);
      const int ilast = d == 1 ? i0 : (d == 2 ? i1 : i2);
      const double mult = g.hermitian_weight(ilast);
      const double re =
          static_cast<double>(pa[flat].real()) * pb[flat].real() +
          static_cast<double>(pa[flat].imag()) * pb[flat].imag();
      total += mult * w(k2) * re;
    });
  }
  return total * scale;
}

template <class Real>
inline double inner(const SpectralField<Real>& a, const SpectralField<Real>& b) {
  return spectral_pairing(a, b, [](double) { return 1.0; });
}

template <class Real>
inline double norm2(const SpectralField<Real>& a) {
  return inner(a, a);
}

template <class Real>
inline double l2_norm(const SpectralField<Real>& a) {
  return std::sqrt(norm2(a));
}

// || grad a ||^2 = sum |k|^2 |a_k|^2
template <class Real>
inline double grad_norm2(const SpectralField<Real>& a) {
  return spectral_pairing(a, a, [](double k2) { return k2; });
}

// || Lap a ||^2 = sum |k|^4 |a_k|^2
template <class Real>
inline double lap_norm2(const SpectralField<Real>& a) {
  return spectral_pairing(a, a, [](double k2) { return k2 * k2; });
}

// physical-space quadrature route for the same integral (dual-route checks)
template <class Real>
inline double physical_inner(const PhysicalField<Real>& a,
                             const PhysicalField<Real>& b) {
  const PeriodicGrid& g = *a.grid;
  if (a.ncomp != b.ncomp || !g.same_shape(*b.grid))
    throw ConfigError("physical_inner: mismatched fields");
  double total = 0.0;
  for (int c = 0; c < a.ncomp; ++c) {
    const Real* pa = a.comp(c);
    const Real* pb = b.comp(c);
    for (std::int64_t i = 0; i < g.physical_count(); ++i)
      total += static_cast<double>(pa[i]) * static_cast<double>(pb[i]);
  }
  return total * (g.volume() / static_cast<double>(g.physical_count()));
}

// max_k |k . w_k| over modes: divergence health (0 for a projected field)
template <class Real>
inline double max_divergence(const SpectralField<Real>& w) {
  const PeriodicGrid& g = *w.grid;
  const int d = g.dim();
  if (w.ncomp != d) throw ConfigError("max_divergence: vector input required");
  double m = 0.0;
  for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
    double re = g.kphys(0, i0) * static_cast<double>(w.comp(0)[flat].real());
    double im = g.kphys(0, i0) * static_cast<double>(w.comp(0)[flat].imag());
    if (d > 1) {
      re += g.kphys(1, i1) * static_cast<double>(w.comp(1)[flat].real());
      im += g.kphys(1, i1) * static_cast<double>(w.comp(1)[flat].imag());
    }
    if (d > 2) {
      re += g.kphys(2, i2) * static_cast<double>(w.comp(2)[flat].real());
      im += g.kphys(2, i2) * static_cast<double>(w.comp(2)[flat].imag());
    }
    const double v = std::sqrt(re * re + im * im);
    if (v > m) m = v;
  });
  return m;
}

// |k=0 coefficient| maximum over components
template <class Real>
inline double mean_magnitude(const SpectralField<Real>& f) {
  double m = 0.0;
  for (int c = 0; c < f.ncomp; ++c) {
    const auto z = f.comp(c)[0];
    const double v = std::sqrt(static_cast<double>(z.real()) * z.real() +
                               static_cast<double>(z.imag()) * z.imag());
    if (v > m) m = v;
  }
  return m;
}

}  // namespace alphamhd
