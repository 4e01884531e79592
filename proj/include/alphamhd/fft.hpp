#pragma once
// FFTW-backed transforms behind the codebase's convention: forward is the
// unnormalized sum over grid points, inverse divides by the point count.
// Plans use FFTW_ESTIMATE so the algorithm choice depends only on the shape,
// never on runtime timing; together with one alignment class for all buffers
// this keeps repeated runs bit-identical. Plan creation is serialized (the
// FFTW planner is not thread safe), execution with the new-array interface
// is safe from any thread.

#include <fftw3.h>

#include <map>
#include <mutex>

#include "alphamhd/field.hpp"

namespace alphamhd {
namespace fft_detail {

struct PlanKey {
  int prec;  // 0 = double, 1 = float
  int dim;
  std::array<int, 3> n;
  bool operator<(const PlanKey& o) const {
    if (prec != o.prec) return prec < o.prec;
    if (dim != o.dim) return dim < o.dim;
    return n < o.n;
  }
};

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftwf_plan r2cf = nullptr;
  fftwf_plan c2rf = nullptr;
};

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::map<PlanKey, PlanPair>& plan_cache() {
  static std::map<PlanKey, PlanPair> c;
  return c;
}

template <class Real>
inline PlanPair& plans_for(const PeriodicGrid& g) {
  PlanKey key;
  key.prec = std::is_same_v<Real, double> ? 0 : 1;
  key.dim = g.dim();
  key.n = {1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) key.n[a] = g.size(a);

  std::lock_guard<std::mutex> lock(planner_mutex());
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  PlanPair p;
  int n[3] = {key.n[0], key.n[1], key.n[2]};
  if constexpr (std::is_same_v<Real, double>) {
    avector<double> re(g.physical_count());
    avector<std::complex<double>> sp(g.spectral_count());
    p.r2c = fftw_plan_dft_r2c(g.dim(), n, re.data(),
                              reinterpret_cast<fftw_complex*>(sp.data()),
                              FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r(g.dim(), n,
                              reinterpret_cast<fftw_complex*>(sp.data()),
                              re.data(), FFTW_ESTIMATE);
  } else {
    avector<float> re(g.physical_count());
    avector<std::complex<float>> sp(g.spectral_count());
    p.r2cf = fftwf_plan_dft_r2c(g.dim(), n, re.data(),
                                reinterpret_cast<fftwf_complex*>(sp.data()),
                                FFTW_ESTIMATE);
    p.c2rf = fftwf_plan_dft_c2r(g.dim(), n,
                                reinterpret_cast<fftwf_complex*>(sp.data()),
                                re.data(), FFTW_ESTIMATE);
  }
  auto res = cache.emplace(key, p);
  return res.first->second;
}

}  // namespace fft_detail

// physical -> spectral, one component; unnormalized sum over points
template <class Real>
inline void forward_comp(const PeriodicGrid& g, const Real* in,
                         std::complex<Real>* out) {
  auto& p = fft_detail::plans_for<Real>(g);
  // r2c out-of-place preserves its input
  if constexpr (std::is_same_v<Real, double>) {
    fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
  } else {
    fftwf_execute_dft_r2c(p.r2cf, const_cast<float*>(in),
                          reinterpret_cast<fftwf_complex*>(out));
  }
}

// spectral -> physical, one component; divides by the point count.
// The input is left untouched (c2r destroys its input, so a copy is used).
template <class Real>
inline void inverse_comp(const PeriodicGrid& g, const std::complex<Real>* in,
                         Real* out) {
  auto& p = fft_detail::plans_for<Real>(g);
  const Real inv_n = Real(1.0 / static_cast<double>(g.physical_count()));
  avector<std::complex<Real>> scratch(g.spectral_count());
  for (std::int64_t i = 0; i < g.spectral_count(); ++i) scratch[i] = in[i];
  if constexpr (std::is_same_v<Real, double>) {
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                         out);
  } else {
    fftwf_execute_dft_c2r(p.c2rf,
                          reinterpret_cast<fftwf_complex*>(scratch.data()),
                          out);
  }
  for (std::int64_t i = 0; i < g.physical_count(); ++i) out[i] *= inv_n;
}

template <class Real>
inline void forward_transform(const PhysicalField<Real>& in,
                              SpectralField<Real>& out) {
  if (!in.finite())
    throw NonFiniteError("forward transform: input has non-finite samples");
  for (int c = 0; c < in.ncomp; ++c)
    forward_comp(*in.grid, in.comp(c), out.comp(c));
  if (out.zero_mean) out.pin_zero_mean();
}

template <class Real>
inline void inverse_transform(const SpectralField<Real>& in,
                              PhysicalField<Real>& out) {
  if (!in.finite())
    throw NonFiniteError("inverse transform: input has non-finite coefficients");
  for (int c = 0; c < in.ncomp; ++c)
    inverse_comp(*in.grid, in.comp(c), out.comp(c));
}

template <class Real>
inline PhysicalField<Real> to_physical(const SpectralField<Real>& f) {
  PhysicalField<Real> out(f.grid, f.ncomp);
  inverse_transform(f, out);
  return out;
}

template <class Real>
inline SpectralField<Real> to_spectral(const PhysicalField<Real>& f,
                                       bool zero_mean = false) {
  SpectralField<Real> out(f.grid, f.ncomp, zero_mean);
  forward_transform(f, out);
  return out;
}

}  // namespace alphamhd
