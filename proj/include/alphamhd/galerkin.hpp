// Dense truncated-Galerkin oracle: the same mode set as a dealiased grid,
// with every convolution written as an explicit sum over mode pairs. No FFTs
// anywhere, so it cross-checks the pseudospectral kernels independently.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "alphamhd/common.hpp"
#include "alphamhd/fft.hpp"
#include "alphamhd/field.hpp"
#include "alphamhd/grid.hpp"
#include "alphamhd/models.hpp"
#include "alphamhd/operators.hpp"
#include "alphamhd/random_fields.hpp"

namespace alphamhd {

// Coefficients over the signed mode box, comp-major. Values are continuum
// Fourier coefficients: f(x) = sum_k c_k exp(i k.x).
struct DenseField {
  int ncomp = 0;
  std::int64_t nmodes = 0;
  std::vector<std::complex<double>> data;

  DenseField() = default;
  DenseField(int ncomp_, std::int64_t nmodes_)
      : ncomp(ncomp_),
        nmodes(nmodes_),
        data(static_cast<std::size_t>(ncomp_) * nmodes_) {}

  std::complex<double>* comp(int c) {
    return data.data() + static_cast<std::size_t>(c) * nmodes;
  }
  const std::complex<double>* comp(int c) const {
    return data.data() + static_cast<std::size_t>(c) * nmodes;
  }
  void set_zero() { std::fill(data.begin(), data.end(), std::complex<double>(0)); }
};

// Signed modes |m_a| <= m on each active axis, origin excluded, lexicographic
// order. Convolutions visit all nmodes^2 ordered pairs; the guard keeps
// accidental large instantiations from running for hours.
class GalerkinSystem {
 public:
  GalerkinSystem(int dim, int m,
                 std::array<double, 3> length = {2.0 * kPi, 2.0 * kPi, 2.0 * kPi},
                 std::int64_t pair_budget = 100000)
      : dim_(dim), m_(m), length_(length) {
    if (dim < 1 || dim > 3) throw ConfigError("galerkin: dim must be 1, 2 or 3");
    if (m < 1) throw ConfigError("galerkin: mode cutoff must be >= 1");
    for (int a = 0; a < dim; ++a) {
      if (!(length_[a] > 0.0)) throw ConfigError("galerkin: box length must be positive");
      kfac_[a] = 2.0 * kPi / length_[a];
    }
    for (int a = dim; a < 3; ++a) kfac_[a] = 0.0;

    const int lo[3] = {-m, dim > 1 ? -m : 0, dim > 2 ? -m : 0};
    const int hi[3] = {m, dim > 1 ? m : 0, dim > 2 ? m : 0};
    for (int m0 = lo[0]; m0 <= hi[0]; ++m0)
      for (int m1 = lo[1]; m1 <= hi[1]; ++m1)
        for (int m2 = lo[2]; m2 <= hi[2]; ++m2) {
          if (m0 == 0 && m1 == 0 && m2 == 0) continue;
          modes_.push_back({m0, m1, m2});
        }
    const std::int64_t n = static_cast<std::int64_t>(modes_.size());
    const std::int64_t pairs = n * n;
    if (pairs > pair_budget) {
      std::ostringstream os;
      os << "galerkin: " << n << " modes need a pair budget of " << pairs
         << " (current budget " << pair_budget
         << "); pass an explicit budget to confirm the cost";
      throw ConfigError(os.str());
    }

    side_ = 4 * m + 1;
    std::int64_t tsize = side_;
    for (int a = 1; a < dim; ++a) tsize *= side_;
    lut_.assign(static_cast<std::size_t>(tsize), -1);
    for (std::int64_t i = 0; i < n; ++i)
      lut_[static_cast<std::size_t>(table_index(modes_[static_cast<std::size_t>(i)]))] =
          static_cast<std::int32_t>(i);
  }

  int dim() const { return dim_; }
  int order() const { return m_; }
  std::int64_t nmodes() const { return static_cast<std::int64_t>(modes_.size()); }
  const std::array<int, 3>& mode(std::int64_t i) const {
    return modes_[static_cast<std::size_t>(i)];
  }
  std::array<double, 3> kvec(std::int64_t i) const {
    const auto& mv = modes_[static_cast<std::size_t>(i)];
    return {kfac_[0] * mv[0], kfac_[1] * mv[1], kfac_[2] * mv[2]};
  }
  double k2(std::int64_t i) const {
    auto k = kvec(i);
    return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  }
  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= length_[a];
    return v;
  }
  double length(int axis) const { return length_[static_cast<std::size_t>(axis)]; }

  // Dense index of a signed mode, or -1 when it lies outside the retained set.
  std::int32_t lookup(const std::array<int, 3>& mv) const {
    for (int a = 0; a < dim_; ++a)
      if (mv[static_cast<std::size_t>(a)] < -2 * m_ || mv[static_cast<std::size_t>(a)] > 2 * m_)
        return -1;
    for (int a = 0; a < dim_; ++a)
      if (std::abs(mv[static_cast<std::size_t>(a)]) > m_) return -1;
    for (int a = dim_; a < 3; ++a)
      if (mv[static_cast<std::size_t>(a)] != 0) return -1;
    if (mv[0] == 0 && mv[1] == 0 && mv[2] == 0) return -1;
    return lut_[static_cast<std::size_t>(table_index(mv))];
  }

  DenseField make_field(int ncomp) const { return DenseField(ncomp, nmodes()); }

  // ---- convolution forms ----------------------------------------------------
  // All are sums over ordered pairs (p, q) with output mode p + q truncated to
  // the retained set, matching a dealiased pseudospectral product exactly.

  // (a . grad) c
  void advective(const DenseField& a, const DenseField& c, DenseField& out,
                 bool project_out = true) const {
    pair_loop(a, c, out, [&](const std::complex<double>* ap, const double* kq,
                             const std::complex<double>* cq, const double*,
                             std::complex<double>* acc) {
      std::complex<double> dot(0.0, 0.0);
      for (int j = 0; j < dim_; ++j) dot += ap[j] * kq[j];
      const std::complex<double> fac(-dot.imag(), dot.real());  // i * dot
      for (int i = 0; i < out.ncomp; ++i) acc[i] += fac * cq[i];
    });
    if (project_out) project(out);
  }

  // (curl c) x a, 3D only
  void rotational(const DenseField& a, const DenseField& c, DenseField& out,
                  bool project_out = true) const {
    if (dim_ != 3) throw ConfigError("galerkin: rotational form needs dim 3");
    pair_loop(a, c, out, [&](const std::complex<double>* ap, const double* kq,
                             const std::complex<double>* cq, const double*,
                             std::complex<double>* acc) {
      // w = i q x c_q, then w x a_p
      const std::complex<double> w0 = mul_i(kq[1] * cq[2] - kq[2] * cq[1]);
      const std::complex<double> w1 = mul_i(kq[2] * cq[0] - kq[0] * cq[2]);
      const std::complex<double> w2 = mul_i(kq[0] * cq[1] - kq[1] * cq[0]);
      acc[0] += w1 * ap[2] - w2 * ap[1];
      acc[1] += w2 * ap[0] - w0 * ap[2];
      acc[2] += w0 * ap[1] - w1 * ap[0];
    });
    if (project_out) project(out);
  }

  // sum_j a_j grad c_j, unprojected
  void gradterm(const DenseField& a, const DenseField& c, DenseField& out) const {
    pair_loop(a, c, out, [&](const std::complex<double>* ap, const double* kq,
                             const std::complex<double>* cq, const double*,
                             std::complex<double>* acc) {
      std::complex<double> s(0.0, 0.0);
      for (int j = 0; j < dim_; ++j) s += ap[j] * cq[j];
      const std::complex<double> is(-s.imag(), s.real());
      for (int i = 0; i < dim_; ++i) acc[i] += is * kq[i];
    });
  }

  // a x (curl c), 3D only, unprojected
  void cross_curl(const DenseField& a, const DenseField& c, DenseField& out) const {
    if (dim_ != 3) throw ConfigError("galerkin: cross_curl needs dim 3");
    pair_loop(a, c, out, [&](const std::complex<double>* ap, const double* kq,
                             const std::complex<double>* cq, const double*,
                             std::complex<double>* acc) {
      const std::complex<double> w0 = mul_i(kq[1] * cq[2] - kq[2] * cq[1]);
      const std::complex<double> w1 = mul_i(kq[2] * cq[0] - kq[0] * cq[2]);
      const std::complex<double> w2 = mul_i(kq[0] * cq[1] - kq[1] * cq[0]);
      acc[0] += ap[1] * w2 - ap[2] * w1;
      acc[1] += ap[2] * w0 - ap[0] * w2;
      acc[2] += ap[0] * w1 - ap[1] * w0;
    });
  }

  // grad (a . c), unprojected
  void grad_dot(const DenseField& a, const DenseField& c, DenseField& out) const {
    pair_loop(a, c, out, [&](const std::complex<double>* ap, const double*,
                             const std::complex<double>* cq, const double* kk,
                             std::complex<double>* acc) {
      std::complex<double> s(0.0, 0.0);
      for (int j = 0; j < dim_; ++j) s += ap[j] * cq[j];
      const std::complex<double> is(-s.imag(), s.real());
      for (int i = 0; i < dim_; ++i) acc[i] += is * kk[i];
    });
  }

  // ---- pointwise mode operators ---------------------------------------------

  void project(DenseField& f) const {
    if (f.ncomp != dim_) throw ConfigError("galerkin: projection needs a velocity-shaped field");
    for (std::int64_t i = 0; i < nmodes(); ++i) {
      const auto k = kvec(i);
      const double kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
      std::complex<double> dot(0.0, 0.0);
      for (int c = 0; c < dim_; ++c) dot += f.comp(c)[i] * k[c];
      dot /= kk;
      for (int c = 0; c < dim_; ++c) f.comp(c)[i] -= dot * k[c];
    }
  }

  void helmholtz(DenseField& f, double alpha, bool invert) const {
    const double a2 = alpha * alpha;
    for (std::int64_t i = 0; i < nmodes(); ++i) {
      const double h = 1.0 + a2 * k2(i);
      const double fac = invert ? 1.0 / h : h;
      for (int c = 0; c < f.ncomp; ++c) f.comp(c)[i] *= fac;
    }
  }

  // Integral of a . b over the box, both fields real valued in physical space.
  double inner(const DenseField& a, const DenseField& b) const {
    double s = 0.0;
    for (int c = 0; c < a.ncomp; ++c) {
      const auto* pa = a.comp(c);
      const auto* pb = b.comp(c);
      for (std::int64_t i = 0; i < nmodes(); ++i)
        s += pa[i].real() * pb[i].real() + pa[i].imag() * pb[i].imag();
    }
    return volume() * s;
  }

  double norm(const DenseField& a) const { return std::sqrt(inner(a, a)); }

  // Hermitian, divergence free, unit norm by default. Deterministic in seed.
  DenseField random_solenoidal(std::uint64_t seed, double target = 1.0) const {
    DenseField f = make_field(dim_);
    Rng rng(seed);
    for (std::int64_t i = 0; i < nmodes(); ++i) {
      const auto& mv = modes_[static_cast<std::size_t>(i)];
      const std::array<int, 3> neg = {-mv[0], -mv[1], -mv[2]};
      const std::int64_t j = lookup(neg);
      if (j < i) continue;  // partner already drew this pair
      for (int c = 0; c < dim_; ++c) {
        const std::complex<double> z(rng.gaussian(), rng.gaussian());
        f.comp(c)[i] = z;
        f.comp(c)[j] = std::conj(z);
      }
    }
    project(f);
    const double n = norm(f);
    if (n > 0.0)
      for (auto& z : f.data) z *= target / n;
    return f;
  }

  // ---- model right-hand sides -----------------------------------------------

  // Nonlinear terms in the evolved variables, built from the per-model term
  // list with plain advective convolutions and analytic inverse filters.
  void oracle_nonlinear(const ModelSpec& spec, const DenseField& u,
                        const DenseField& b, DenseField& du, DenseField& db) const {
    DenseField nv = make_field(dim_);
    DenseField nb = make_field(dim_);
    DenseField t = make_field(dim_);

    auto add_adv = [&](const DenseField& a, const DenseField& c, DenseField& out,
                       double sgn) {
      t.set_zero();
      advective(a, c, t, false);
      axpy(sgn, t, out);
    };
    auto add_grad = [&](const DenseField& a, const DenseField& c, DenseField& out,
                        double sgn) {
      t.set_zero();
      gradterm(a, c, t);
      axpy(sgn, t, out);
    };

    switch (spec.model) {
      case Model::mhd: {
        add_adv(u, u, nv, -1.0);
        add_adv(b, b, nv, +1.0);
        add_adv(u, b, nb, -1.0);
        add_adv(b, u, nb, +1.0);
        break;
      }
      case Model::mhd_alpha: {
        DenseField v = u;
        helmholtz(v, spec.alpha, false);
        add_adv(u, v, nv, -1.0);
        add_grad(v, u, nv, -1.0);
        add_adv(b, b, nv, +1.0);
        add_adv(u, b, nb, -1.0);
        add_adv(b, u, nb, +1.0);
        break;
      }
      case Model::lamhd_alpha: {
        DenseField v = u;
        helmholtz(v, spec.alpha, false);
        DenseField bf = b;
        helmholtz(bf, spec.alpha_m, false);
        add_adv(u, v, nv, -1.0);
        add_grad(v, u, nv, -1.0);
        add_adv(b, bf, nv, +1.0);
        add_grad(b, bf, nv, -1.0);
        add_adv(u, b, nb, -1.0);
        add_adv(b, u, nb, +1.0);
        break;
      }
      case Model::leray_alpha_mhd_3d: {
        DenseField v = u;
        helmholtz(v, spec.alpha, false);
        add_adv(u, v, nv, -1.0);
        add_adv(b, b, nv, +1.0);
        add_adv(u, b, nb, -1.0);
        add_adv(b, v, nb, +1.0);
        break;
      }
      case Model::ml_alpha_mhd: {
        DenseField v = u;
        helmholtz(v, spec.alpha, false);
        add_adv(v, u, nv, -1.0);
        add_adv(b, b, nv, +1.0);
        add_adv(u, b, nb, -1.0);
        add_adv(b, u, nb, +1.0);
        break;
      }
      case Model::leray_alpha_mhd_2d: {
        DenseField v = u;
        helmholtz(v, spec.alpha, false);
        add_adv(u, v, nv, -1.0);
        add_adv(b, b, nv, +1.0);
        add_adv(u, b, nb, -1.0);
        add_adv(b, u, nb, +1.0);
        break;
      }
    }
    project(nv);
    project(nb);
    helmholtz(nv, spec.alpha, true);
    du = nv;
    db = nb;
  }

  void oracle_rhs(const ModelSpec& spec, const DenseField& u, const DenseField& b,
                  DenseField& du, DenseField& db, bool dissipation = true) const {
    oracle_nonlinear(spec, u, b, du, db);
    if (!dissipation) return;
    for (std::int64_t i = 0; i < nmodes(); ++i) {
      const double kk = k2(i);
      const double su = stiff_sigma_u(spec, kk);
      const double sb = stiff_sigma_b(spec, kk);
      for (int c = 0; c < dim_; ++c) {
        du.comp(c)[i] -= su * u.comp(c)[i];
        db.comp(c)[i] -= sb * b.comp(c)[i];
      }
    }
  }

  // Classic fourth-order step of the dense ODE system.
  void rk4_step(const ModelSpec& spec, DenseField& u, DenseField& b, double h,
                bool dissipation = true) const {
    DenseField k1u = make_field(dim_), k1b = make_field(dim_);
    DenseField k2u = make_field(dim_), k2b = make_field(dim_);
    DenseField k3u = make_field(dim_), k3b = make_field(dim_);
    DenseField k4u = make_field(dim_), k4b = make_field(dim_);
    DenseField tu = make_field(dim_), tb = make_field(dim_);

    oracle_rhs(spec, u, b, k1u, k1b, dissipation);
    stage(u, b, k1u, k1b, 0.5 * h, tu, tb);
    oracle_rhs(spec, tu, tb, k2u, k2b, dissipation);
    stage(u, b, k2u, k2b, 0.5 * h, tu, tb);
    oracle_rhs(spec, tu, tb, k3u, k3b, dissipation);
    stage(u, b, k3u, k3b, h, tu, tb);
    oracle_rhs(spec, tu, tb, k4u, k4b, dissipation);

    const double w = h / 6.0;
    for (std::size_t i = 0; i < u.data.size(); ++i)
      u.data[i] += w * (k1u.data[i] + 2.0 * k2u.data[i] + 2.0 * k3u.data[i] +
                        k4u.data[i]);
    for (std::size_t i = 0; i < b.data.size(); ++i)
      b.data[i] += w * (k1b.data[i] + 2.0 * k2b.data[i] + 2.0 * k3b.data[i] +
                        k4b.data[i]);
  }

 private:
  static std::complex<double> mul_i(const std::complex<double>& z) {
    return {-z.imag(), z.real()};
  }

  static void axpy(double a, const DenseField& x, DenseField& y) {
    for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
  }

  static void stage(const DenseField& u, const DenseField& b, const DenseField& ku,
                    const DenseField& kb, double h, DenseField& tu, DenseField& tb) {
    for (std::size_t i = 0; i < u.data.size(); ++i)
      tu.data[i] = u.data[i] + h * ku.data[i];
    for (std::size_t i = 0; i < b.data.size(); ++i)
      tb.data[i] = b.data[i] + h * kb.data[i];
  }

  std::int64_t table_index(const std::array<int, 3>& mv) const {
    std::int64_t idx = mv[0] + 2 * m_;
    for (int a = 1; a < dim_; ++a)
      idx = idx * side_ + (mv[static_cast<std::size_t>(a)] + 2 * m_);
    return idx;
  }

  // Shared ordered-pair loop. The callback receives a_p, k(q), c_q, k(p+q)
  // and the accumulator row of the output mode.
  template <class F>
  void pair_loop(const DenseField& a, const DenseField& c, DenseField& out,
                 F&& fn) const {
    const std::int64_t n = nmodes();
    if (out.nmodes != n) out = make_field(dim_);
    std::vector<std::complex<double>> acc(out.data.size(), std::complex<double>(0));
    std::vector<std::array<double, 3>> kq(static_cast<std::size_t>(n));
    for (std::int64_t q = 0; q < n; ++q) kq[static_cast<std::size_t>(q)] = kvec(q);

    std::vector<std::complex<double>> ap(static_cast<std::size_t>(a.ncomp));
    std::vector<std::complex<double>> cq(static_cast<std::size_t>(c.ncomp));
    for (std::int64_t p = 0; p < n; ++p) {
      const auto& mp = modes_[static_cast<std::size_t>(p)];
      for (int cc = 0; cc < a.ncomp; ++cc) ap[static_cast<std::size_t>(cc)] = a.comp(cc)[p];
      for (std::int64_t q = 0; q < n; ++q) {
        const auto& mq = modes_[static_cast<std::size_t>(q)];
        const std::array<int, 3> mk = {mp[0] + mq[0], mp[1] + mq[1], mp[2] + mq[2]};
        const std::int32_t ik = lookup(mk);
        if (ik < 0) continue;
        for (int cc = 0; cc < c.ncomp; ++cc) cq[static_cast<std::size_t>(cc)] = c.comp(cc)[q];
        const std::array<double, 3> kk = {kfac_[0] * mk[0], kfac_[1] * mk[1],
                                          kfac_[2] * mk[2]};
        // accumulator rows are comp-major like the field
        std::complex<double> row[3];
        for (int cc = 0; cc < out.ncomp; ++cc)
          row[cc] = acc[static_cast<std::size_t>(cc) * n + ik];
        fn(ap.data(), kq[static_cast<std::size_t>(q)].data(), cq.data(), kk.data(), row);
        for (int cc = 0; cc < out.ncomp; ++cc)
          acc[static_cast<std::size_t>(cc) * n + ik] = row[cc];
      }
    }
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += acc[i];
  }

  int dim_ = 0;
  int m_ = 0;
  int side_ = 0;
  std::array<double, 3> length_{};
  std::array<double, 3> kfac_{};
  std::vector<std::array<int, 3>> modes_;
  std::vector<std::int32_t> lut_;
};

// ---- conversions ------------------------------------------------------------

namespace gal_detail {

inline void require_compatible(const GalerkinSystem& sys, const PeriodicGrid& g) {
  if (g.dim() != sys.dim())
    throw ConfigError("galerkin: grid dimension mismatch");
  for (int a = 0; a < g.dim(); ++a) {
    if (g.dealias_cutoff(a) < sys.order())
      throw ConfigError("galerkin: grid too coarse for the dense mode set");
    if (std::fabs(g.length(a) - sys.length(a)) > 1e-12 * sys.length(a))
      throw ConfigError("galerkin: box length mismatch");
  }
}

inline std::int64_t storage_flat(const PeriodicGrid& g, const std::array<int, 3>& mv) {
  const int d = g.dim();
  std::int64_t flat = 0;
  for (int a = 0; a < d; ++a) {
    const int n = g.size(a);
    const int m = mv[static_cast<std::size_t>(a)];
    const int idx = (a == d - 1) ? m : (m >= 0 ? m : m + n);
    const std::int64_t extent = (a == d - 1) ? (n / 2 + 1) : n;
    flat = flat * extent + idx;
  }
  return flat;
}

}  // namespace gal_detail

template <class Real>
inline DenseField dense_from_spectral(const GalerkinSystem& sys,
                                      const SpectralField<Real>& f) {
  const PeriodicGrid& g = *f.grid;
  gal_detail::require_compatible(sys, g);
  const double inv_n = 1.0 / static_cast<double>(g.physical_count());
  DenseField out(f.ncomp, sys.nmodes());
  const int last = g.dim() - 1;
  for (std::int64_t i = 0; i < sys.nmodes(); ++i) {
    std::array<int, 3> mv = sys.mode(i);
    const bool conj = mv[static_cast<std::size_t>(last)] < 0;
    if (conj)
      for (auto& v : mv) v = -v;
    const std::int64_t flat = gal_detail::storage_flat(g, mv);
    for (int c = 0; c < f.ncomp; ++c) {
      const std::complex<Real> z = f.comp(c)[flat];
      std::complex<double> zc(static_cast<double>(z.real()) * inv_n,
                              static_cast<double>(z.imag()) * inv_n);
      out.comp(c)[i] = conj ? std::conj(zc) : zc;
    }
  }
  return out;
}

template <class Real>
inline void dense_to_spectral(const GalerkinSystem& sys, const DenseField& f,
                              SpectralField<Real>& out) {
  const PeriodicGrid& g = *out.grid;
  gal_detail::require_compatible(sys, g);
  if (out.ncomp != f.ncomp) throw ConfigError("galerkin: component count mismatch");
  const double n_tot = static_cast<double>(g.physical_count());
  out.set_zero();
  const int last = g.dim() - 1;
  for (std::int64_t i = 0; i < sys.nmodes(); ++i) {
    const std::array<int, 3>& mv = sys.mode(i);
    if (mv[static_cast<std::size_t>(last)] < 0) continue;  // implied by symmetry
    const std::int64_t flat = gal_detail::storage_flat(g, mv);
    for (int c = 0; c < f.ncomp; ++c) {
      const std::complex<double> z = f.comp(c)[i] * n_tot;
      out.comp(c)[flat] = std::complex<Real>(static_cast<Real>(z.real()),
                                             static_cast<Real>(z.imag()));
    }
  }
}

// ---- bilinear identity suite --------------------------------------------------

struct IdentityReport {
  std::string name;
  int trials = 0;
  double max_residual = 0.0;
};

namespace gal_detail {

inline void bump(std::vector<IdentityReport>& reps, std::size_t idx, double r) {
  reps[idx].trials += 1;
  reps[idx].max_residual = std::max(reps[idx].max_residual, r);
}

inline std::vector<IdentityReport> make_reports() {
  return {{"advective_antisymmetry", 0, 0.0},
          {"advective_orthogonality", 0, 0.0},
          {"rotational_decomposition", 0, 0.0},
          {"rotational_orthogonality", 0, 0.0},
          {"gradient_identity", 0, 0.0}};
}

// Unprojected pseudospectral terms used by the gradient identity. All keep
// the k = 0 row (both sides carry the same mean), so no pinning here.

template <class Real>
inline SpectralField<Real> advect_noproj(const SpectralField<Real>& a,
                                         const SpectralField<Real>& c) {
  const PeriodicGrid& g = *a.grid;
  const int d = g.dim();
  PhysicalField<Real> ap = to_physical(a);
  SpectralField<Real> tmp(a.grid, 1, false);
  PhysicalField<Real> der(a.grid, 1);
  PhysicalField<Real> acc(a.grid, 1);
  SpectralField<Real> out(a.grid, c.ncomp, false);
  for (int i = 0; i < c.ncomp; ++i) {
    std::fill(acc.data.begin(), acc.data.end(), Real(0));
    for (int j = 0; j < d; ++j) {
      op_detail::apply_ik(g, j, c.comp(i), tmp.comp(0));
      inverse_comp(g, tmp.comp(0), der.comp(0));
      const Real* aj = ap.comp(j);
      Real* s = acc.comp(0);
      const Real* dd = der.comp(0);
      for (std::int64_t nn = 0; nn < g.physical_count(); ++nn) s[nn] += aj[nn] * dd[nn];
    }
    forward_comp(g, acc.comp(0), out.comp(i));
  }
  dealias(out);
  return out;
}

template <class Real>
inline SpectralField<Real> gradterm_noproj(const SpectralField<Real>& a,
                                           const SpectralField<Real>& c) {
  const PeriodicGrid& g = *a.grid;
  const int d = g.dim();
  PhysicalField<Real> ap = to_physical(a);
  SpectralField<Real> tmp(a.grid, 1, false);
  PhysicalField<Real> der(a.grid, 1);
  PhysicalField<Real> acc(a.grid, 1);
  SpectralField<Real> out(a.grid, d, false);
  for (int i = 0; i < d; ++i) {
    std::fill(acc.data.begin(), acc.data.end(), Real(0));
    for (int j = 0; j < d; ++j) {
      op_detail::apply_ik(g, i, c.comp(j), tmp.comp(0));
      inverse_comp(g, tmp.comp(0), der.comp(0));
      const Real* aj = ap.comp(j);
      Real* s = acc.comp(0);
      const Real* dd = der.comp(0);
      for (std::int64_t nn = 0; nn < g.physical_count(); ++nn) s[nn] += aj[nn] * dd[nn];
    }
    forward_comp(g, acc.comp(0), out.comp(i));
  }
  dealias(out);
  return out;
}

template <class Real>
inline SpectralField<Real> cross_curl_noproj(const SpectralField<Real>& a,
                                             const SpectralField<Real>& c) {
  const PeriodicGrid& g = *a.grid;
  PhysicalField<Real> ap = to_physical(a);
  SpectralField<Real> w = curl(c);
  PhysicalField<Real> wp = to_physical(w);
  PhysicalField<Real> res(a.grid, 3);
  for (std::int64_t nn = 0; nn < g.physical_count(); ++nn) {
    const Real a0 = ap.comp(0)[nn], a1 = ap.comp(1)[nn], a2 = ap.comp(2)[nn];
    const Real w0 = wp.comp(0)[nn], w1 = wp.comp(1)[nn], w2 = wp.comp(2)[nn];
    res.comp(0)[nn] = a1 * w2 - a2 * w1;
    res.comp(1)[nn] = a2 * w0 - a0 * w2;
    res.comp(2)[nn] = a0 * w1 - a1 * w0;
  }
  SpectralField<Real> out = to_spectral(res, false);
  dealias(out);
  return out;
}

template <class Real>
inline SpectralField<Real> grad_dot_noproj(const SpectralField<Real>& a,
                                           const SpectralField<Real>& c) {
  const PeriodicGrid& g = *a.grid;
  PhysicalField<Real> ap = to_physical(a);
  PhysicalField<Real> cp = to_physical(c);
  PhysicalField<Real> s(a.grid, 1);
  for (std::int64_t nn = 0; nn < g.physical_count(); ++nn) {
    Real v = 0;
    for (int j = 0; j < a.ncomp; ++j) v += ap.comp(j)[nn] * cp.comp(j)[nn];
    s.comp(0)[nn] = v;
  }
  SpectralField<Real> sh = to_spectral(s, false);
  dealias(sh);
  SpectralField<Real> out(a.grid, g.dim(), false);
  for (int i = 0; i < g.dim(); ++i)
    op_detail::apply_ik(g, i, sh.comp(0), out.comp(i));
  return out;
}

template <class Real>
inline double diff_norm(const SpectralField<Real>& x, const SpectralField<Real>& y) {
  SpectralField<Real> d = x;
  d.axpy(Real(-1), y);
  return l2_norm(d);
}

}  // namespace gal_detail

// Residuals of the five bilinear identities on seeded random solenoidal
// fields, evaluated with the dense convolutions. Residuals are normalized by
// the product of the participating field norms.
inline std::vector<IdentityReport> identity_suite_dense(const GalerkinSystem& sys,
                                                        int trials,
                                                        std::uint64_t seed) {
  if (sys.dim() != 3) throw ConfigError("identity suite: dim 3 required");
  auto reps = gal_detail::make_reports();
  DenseField buv = sys.make_field(3), buw = sys.make_field(3);
  DenseField bwv = sys.make_field(3), btuv = sys.make_field(3);
  DenseField lhs = sys.make_field(3), rhs = sys.make_field(3), t = sys.make_field(3);
  for (int tr = 0; tr < trials; ++tr) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(tr) * 3;
    DenseField u = sys.random_solenoidal(s);
    DenseField v = sys.random_solenoidal(s + 1);
    DenseField w = sys.random_solenoidal(s + 2);
    const double nu = sys.norm(u), nv = sys.norm(v), nw = sys.norm(w);

    buv.set_zero();
    sys.advective(u, v, buv);
    buw.set_zero();
    sys.advective(u, w, buw);
    bwv.set_zero();
    sys.advective(w, v, bwv);
    btuv.set_zero();
    sys.rotational(u, v, btuv);

    gal_detail::bump(reps, 0,
                     std::fabs(sys.inner(buv, w) + sys.inner(buw, v)) / (nu * nv * nw));
    gal_detail::bump(reps, 1, std::fabs(sys.inner(buv, v)) / (nu * nv * nv));
    gal_detail::bump(
        reps, 2,
        std::fabs(sys.inner(btuv, w) - (sys.inner(buv, w) - sys.inner(bwv, u))) /
            (nu * nv * nw));
    gal_detail::bump(reps, 3, std::fabs(sys.inner(btuv, u)) / (nu * nu * nv));

    // (b.grad)a + sum_j a_j grad b_j = -b x (curl a) + grad(a.b), unprojected
    lhs.set_zero();
    sys.advective(v, u, lhs, false);
    t.set_zero();
    sys.gradterm(u, v, t);
    for (std::size_t i = 0; i < lhs.data.size(); ++i) lhs.data[i] += t.data[i];
    rhs.set_zero();
    sys.cross_curl(v, u, rhs);
    for (auto& z : rhs.data) z = -z;
    t.set_zero();
    sys.grad_dot(u, v, t);
    for (std::size_t i = 0; i < rhs.data.size(); ++i) rhs.data[i] += t.data[i];
    double acc = 0.0;
    for (std::size_t i = 0; i < lhs.data.size(); ++i) {
      const std::complex<double> d = lhs.data[i] - rhs.data[i];
      acc += d.real() * d.real() + d.imag() * d.imag();
    }
    gal_detail::bump(reps, 4, std::sqrt(sys.volume() * acc) / (nu * nv));
  }
  return reps;
}

// Same five identities through the transform-based kernels.
template <class Real>
inline std::vector<IdentityReport> identity_suite_spectral(GridPtr grid, int trials,
                                                           std::uint64_t seed) {
  if (grid->dim() != 3) throw ConfigError("identity suite: dim 3 required");
  auto reps = gal_detail::make_reports();
  for (int tr = 0; tr < trials; ++tr) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(tr) * 3;
    SpectralField<Real> u = random_solenoidal<Real>(grid, s);
    SpectralField<Real> v = random_solenoidal<Real>(grid, s + 1);
    SpectralField<Real> w = random_solenoidal<Real>(grid, s + 2);
    const double nu = l2_norm(u), nv = l2_norm(v), nw = l2_norm(w);

    SpectralField<Real> buv = advective_bilinear(u, v);
    SpectralField<Real> buw = advective_bilinear(u, w);
    SpectralField<Real> bwv = advective_bilinear(w, v);
    SpectralField<Real> btuv = rotational_bilinear(u, v);

    gal_detail::bump(reps, 0,
                     std::fabs(inner(buv, w) + inner(buw, v)) / (nu * nv * nw));
    gal_detail::bump(reps, 1, std::fabs(inner(buv, v)) / (nu * nv * nv));
    gal_detail::bump(reps, 2,
                     std::fabs(inner(btuv, w) - (inner(buv, w) - inner(bwv, u))) /
                         (nu * nv * nw));
    gal_detail::bump(reps, 3, std::fabs(inner(btuv, u)) / (nu * nu * nv));

    SpectralField<Real> lhs = gal_detail::advect_noproj(v, u);
    lhs.axpy(Real(1), gal_detail::gradterm_noproj(u, v));
    SpectralField<Real> rhs = gal_detail::cross_curl_noproj(v, u);
    rhs.scale(Real(-1));
    rhs.axpy(Real(1), gal_detail::grad_dot_noproj(u, v));
    gal_detail::bump(reps, 4, gal_detail::diff_norm(lhs, rhs) / (nu * nv));
  }
  return reps;
}

inline std::string format_identity_report(const std::vector<IdentityReport>& reps,
                                          const std::string& route) {
  std::ostringstream os;
  os << "bilinear identity residuals (" << route << " route)\n";
  for (const auto& r : reps)
    os << "  " << r.name << ": trials=" << r.trials
       << " max_residual=" << format_g17(r.max_residual) << "\n";
  return os.str();
}

inline void write_identity_csv(const std::string& path,
                               const std::vector<IdentityReport>& reps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "identity,trials,max_residual\n";
  for (const auto& r : reps)
    out << r.name << ',' << r.trials << ',' << format_g17(r.max_residual) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace alphamhd
