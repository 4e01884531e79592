#pragma once
// Quadratic diagnostics, per-model conserved sets, and the energy balance.
//
// Every quantity is a Parseval-weighted spectral sum; no transforms are
// needed. Energies use the per-mode weight of the model's conserved
// functional, so the same pairing routine yields the energy and its exact
// dissipation rate: d/dt E = -diss_u - diss_b along the viscous flow.
//
// Magnetic helicity is recorded twice: h_m_b pairs the unfiltered field B
// with its Coulomb-gauge potential, h_m_bs pairs the evolved (smoothed)
// field. They coincide unless the magnetic filter is active; only the
// evolved-field pairing is an exact invariant of the filtered model.

#include <cstdio>
#include <fstream>
#include <vector>

#include "alphamhd/models.hpp"

namespace alphamhd {

struct DiagnosticsRecord {
  double t = 0.0;
  double e_alpha = 0.0;   // model energy
  double h_c = 0.0;       // cross helicity (v, B)/2
  double h_m_b = 0.0;     // magnetic helicity of B (3D)
  double h_m_bs = 0.0;    // magnetic helicity of the evolved field (3D)
  double a_msq = 0.0;     // mean-square magnetic potential (2D)
  double diss_u = 0.0;    // instantaneous viscous energy flux
  double diss_b = 0.0;    // instantaneous resistive energy flux
  double enstrophy = 0.0; // |curl u|^2 / 2
  double div_u_rel = 0.0; // max |k.u_k| relative to kmax max |u_k|
  double div_b_rel = 0.0;
  double mean_u_rel = 0.0;
  double mean_b_rel = 0.0;
  double u_scale = 0.0;   // rms magnitude
  double b_scale = 0.0;
};

inline const char* kSeriesColumns =
    "t,e_alpha,h_c,h_m_b,h_m_bs,a_msq,diss_u,diss_b,enstrophy,"
    "div_u_rel,div_b_rel,mean_u_rel,mean_b_rel,u_scale,b_scale";

// names of the record fields that the ideal model conserves exactly
inline std::vector<std::string> conserved_names(Model m) {
  switch (m) {
    case Model::mhd:
    case Model::mhd_alpha:
      return {"e_alpha", "h_c", "h_m_b"};
    case Model::lamhd_alpha:
      return {"e_alpha", "h_m_bs"};
    case Model::leray_alpha_mhd_3d:
      return {"e_alpha", "h_c"};
    case Model::ml_alpha_mhd:
      return {"e_alpha", "h_m_b"};
    case Model::leray_alpha_mhd_2d:
      return {"e_alpha", "a_msq"};
  }
  return {};
}

inline double record_field(const DiagnosticsRecord& r, const std::string& n) {
  if (n == "e_alpha") return r.e_alpha;
  if (n == "h_c") return r.h_c;
  if (n == "h_m_b") return r.h_m_b;
  if (n == "h_m_bs") return r.h_m_bs;
  if (n == "a_msq") return r.a_msq;
  if (n == "diss_u") return r.diss_u;
  if (n == "diss_b") return r.diss_b;
  if (n == "enstrophy") return r.enstrophy;
  throw ConfigError("unknown diagnostic field '" + n + "'");
}

namespace diag_detail {

// per-mode weight of the model energy, velocity part
inline double energy_weight_u(const ModelSpec& s, double k2) {
  const double h = 1.0 + s.alpha * s.alpha * k2;
  return s.model == Model::leray_alpha_mhd_3d ? h * h : h;
}

// per-mode weight of the model energy, magnetic part (evolved field)
inline double energy_weight_b(const ModelSpec& s, double k2) {
  return s.magnetic_filtered() ? 1.0 + s.alpha_m * s.alpha_m * k2 : 1.0;
}

inline double sigma_u(const ModelSpec& s, double k2) { return s.nu * k2; }

inline double sigma_b(const ModelSpec& s, double k2) {
  const double hm = s.model == Model::lamhd_alpha
                        ? 1.0 + s.alpha_m * s.alpha_m * k2
                        : 1.0;
  return s.eta * k2 * hm;
}

}  // namespace diag_detail

namespace diag_detail {

template <class Real>
inline void require_solenoidal(const SpectralField<Real>& b, const char* who) {
  const PeriodicGrid& g = *b.grid;
  double kmax = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double km = g.k1(a) * (g.size(a) / 2);
    kmax += km * km;
  }
  kmax = std::sqrt(kmax);
  const double scale = kmax * b.max_abs();
  if (scale > 0.0 && max_divergence(b) > 1e-8 * scale)
    throw ConfigError(std::string(who) + ": input is not divergence free");
}

}  // namespace diag_detail

// Coulomb-gauge vector potential: A_k = i k x B_k / |k|^2, A_0 = 0
template <class Real>
inline SpectralField<Real> vector_potential(const SpectralField<Real>& b) {
  const PeriodicGrid& g = *b.grid;
  if (g.dim() != 3 || b.ncomp != 3)
    throw ConfigError("vector_potential: 3D vector input required");
  diag_detail::require_solenoidal(b, "vector_potential");
  using C = std::complex<Real>;
  SpectralField<Real> a(b.grid, 3, true);
  auto mul_i = [](Real k, C z) { return C(-k * z.imag(), k * z.real()); };
  for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
    const double k0 = g.kphys(0, i0), k1 = g.kphys(1, i1), k2 = g.kphys(2, i2);
    const double kk = k0 * k0 + k1 * k1 + k2 * k2;
    if (kk == 0.0) return;
    const Real inv = Real(1.0 / kk);
    const C b0 = b.comp(0)[flat], b1 = b.comp(1)[flat], b2 = b.comp(2)[flat];
    a.comp(0)[flat] = inv * (mul_i(Real(k1), b2) - mul_i(Real(k2), b1));
    a.comp(1)[flat] = inv * (mul_i(Real(k2), b0) - mul_i(Real(k0), b2));
    a.comp(2)[flat] = inv * (mul_i(Real(k0), b1) - mul_i(Real(k1), b0));
  });
  return a;
}

// 2D streamfunction psi with B = perp_gradient(psi); zero-mean gauge
template <class Real>
inline SpectralField<Real> streamfunction(const SpectralField<Real>& b) {
  const PeriodicGrid& g = *b.grid;
  if (g.dim() != 2 || b.ncomp != 2)
    throw ConfigError("streamfunction: 2D vector input required");
  diag_detail::require_solenoidal(b, "streamfunction");
  SpectralField<Real> psi = scalar_curl(b);  // -k^2 psi
  for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int) {
    const double k0 = g.kphys(0, i0), k1 = g.kphys(1, i1);
    const double kk = k0 * k0 + k1 * k1;
    psi.comp(0)[flat] *= Real(kk == 0.0 ? 0.0 : -1.0 / kk);
  });
  return psi;
}

template <class Real>
inline DiagnosticsRecord compute_diagnostics(const ModelSpec& spec,
                                             const SolverState<Real>& s) {
  const PeriodicGrid& g = *s.u.grid;
  DiagnosticsRecord r;
  r.t = s.t;

  const double eu = spectral_pairing(
      s.u, s.u, [&](double k2) { return diag_detail::energy_weight_u(spec, k2); });
  const double eb = spectral_pairing(
      s.b, s.b, [&](double k2) { return diag_detail::energy_weight_b(spec, k2); });
  r.e_alpha = 0.5 * (eu + eb);

  r.diss_u = spectral_pairing(s.u, s.u, [&](double k2) {
    return diag_detail::energy_weight_u(spec, k2) * diag_detail::sigma_u(spec, k2);
  });
  r.diss_b = spectral_pairing(s.b, s.b, [&](double k2) {
    return diag_detail::energy_weight_b(spec, k2) * diag_detail::sigma_b(spec, k2);
  });

  // cross helicity (v, B)/2 with both filters unwound onto the pair weight
  r.h_c = 0.5 * spectral_pairing(s.u, s.b, [&](double k2) {
    const double hv = 1.0 + spec.alpha * spec.alpha * k2;
    const double hb = spec.magnetic_filtered()
                          ? 1.0 + spec.alpha_m * spec.alpha_m * k2
                          : 1.0;
    return hv * hb;
  });

  if (g.dim() == 3) {
    SpectralField<Real> as = vector_potential(s.b);
    r.h_m_bs = 0.5 * inner(as, s.b);
    if (spec.magnetic_filtered()) {
      SpectralField<Real> bf = helmholtz_applied(s.b, spec.alpha_m);
      SpectralField<Real> af = vector_potential(bf);
      r.h_m_b = 0.5 * inner(af, bf);
    } else {
      r.h_m_b = r.h_m_bs;
    }
  } else {
    SpectralField<Real> psi = streamfunction(s.b);
    r.a_msq = 0.5 * norm2(psi);
  }

  r.enstrophy = 0.5 * grad_norm2(s.u);

  double kmax = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double km = g.k1(a) * (g.size(a) / 2);
    kmax += km * km;
  }
  kmax = std::sqrt(kmax);
  const double umax = s.u.max_abs();
  const double bmax = s.b.max_abs();
  r.div_u_rel = umax > 0.0 ? max_divergence(s.u) / (kmax * umax) : 0.0;
  r.div_b_rel = bmax > 0.0 ? max_divergence(s.b) / (kmax * bmax) : 0.0;
  r.mean_u_rel = umax > 0.0 ? mean_magnitude(s.u) / umax : 0.0;
  r.mean_b_rel = bmax > 0.0 ? mean_magnitude(s.b) / bmax : 0.0;

  r.u_scale = std::sqrt(norm2(s.u) / g.volume());
  r.b_scale = std::sqrt(norm2(s.b) / g.volume());
  return r;
}

// ---- energy balance ---------------------------------------------------------

namespace diag_detail {

// Cumulative integral on uniformly spaced samples, exact for cubics: the
// first panel uses interpolatory weights over four points, later entries
// chain Simpson increments two panels apart. Non-uniform spacing is rejected.
inline std::vector<double> cumulative_integral(const std::vector<double>& t,
                                               const std::vector<double>& f) {
  const std::size_t n = t.size();
  std::vector<double> cum(n, 0.0);
  if (n < 2) return cum;
  const double h = t[1] - t[0];
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (std::fabs((t[i + 1] - t[i]) - h) > 1e-9 * std::fabs(h))
      throw ConfigError("energy balance: samples are not uniformly spaced");
  if (n == 2) {
    cum[1] = h / 2.0 * (f[0] + f[1]);
    return cum;
  }
  if (n == 3) {
    // quadratic through all three points, integrated over each panel
    cum[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    cum[2] = h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
    return cum;
  }
  // cubic through the first four points, integrated over the first panel
  cum[1] = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  cum[2] = h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
  cum[3] = 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
  for (std::size_t i = 4; i < n; ++i)
    cum[i] = cum[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
  return cum;
}

}  // namespace diag_detail

// Relative defect of E(t) + int_0^t (diss_u + diss_b) = E(0), one value per
// sample. Exact for the semidiscrete flow; the reported size is set by the
// time integrator and the quadrature of the flux history.
inline std::vector<double> energy_balance_residuals(
    const std::vector<DiagnosticsRecord>& recs) {
  const std::size_t n = recs.size();
  std::vector<double> t(n), f(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = recs[i].t;
    f[i] = recs[i].diss_u + recs[i].diss_b;
  }
  std::vector<double> cum = diag_detail::cumulative_integral(t, f);
  std::vector<double> r(n, 0.0);
  if (n == 0) return r;
  const double e0 = recs[0].e_alpha;
  const double denom = e0 != 0.0 ? e0 : 1.0;
  for (std::size_t i = 0; i < n; ++i)
    r[i] = (recs[i].e_alpha + cum[i] - e0) / denom;
  return r;
}

// ---- shell spectrum ---------------------------------------------------------

// Energy per wavenumber shell: shell(k) = floor(|k| / k1(axis 0)), value is
// the Parseval sum of w(|k|^2) |f_k|^2 / 2 over the shell. Shells sum to the
// corresponding quadratic diagnostic.
template <class Real, class W>
inline std::vector<double> energy_spectrum(const SpectralField<Real>& f, W w) {
  const PeriodicGrid& g = *f.grid;
  const int d = g.dim();
  double k2max = 0.0;
  for (int a = 0; a < d; ++a) {
    const double km = g.k1(a) * (g.size(a) / 2);
    k2max += km * km;
  }
  const double kunit = g.k1(0);
  const int nshell = static_cast<int>(std::sqrt(k2max) / kunit) + 2;
  std::vector<double> spec(static_cast<std::size_t>(nshell), 0.0);
  const double scale =
      g.volume() / (static_cast<double>(g.physical_count()) *
                    static_cast<double>(g.physical_count()));
  for (int c = 0; c < f.ncomp; ++c) {
    const auto* a = f.comp(c);
    for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
      double k2 = g.kphys(0, i0) * g.kphys(0, i0);
      if (d > 1) k2 += g.kphys(1, i1) * g.kphys(1, i1);
      if (d > 2) k2 += g.kphys(2, i2) * g.kphys(2, i2);
      const int ilast = d == 1 ? i0 : (d == 2 ? i1 : i2);
      const int shell = static_cast<int>(std::sqrt(k2) / kunit);
      const double e2 = static_cast<double>(a[flat].real()) * a[flat].real() +
                        static_cast<double>(a[flat].imag()) * a[flat].imag();
      spec[static_cast<std::size_t>(shell)] +=
          0.5 * g.hermitian_weight(ilast) * w(k2) * e2 * scale;
    });
  }
  return spec;
}

template <class Real>
inline std::vector<double> energy_spectrum(const SpectralField<Real>& f) {
  return energy_spectrum(f, [](double) { return 1.0; });
}

// Shell spectra of the model energy: together they sum to e_alpha.
template <class Real>
inline std::vector<double> energy_spectrum_u(const ModelSpec& spec,
                                             const SpectralField<Real>& u) {
  return energy_spectrum(
      u, [&](double k2) { return diag_detail::energy_weight_u(spec, k2); });
}

template <class Real>
inline std::vector<double> energy_spectrum_b(const ModelSpec& spec,
                                             const SpectralField<Real>& b) {
  return energy_spectrum(
      b, [&](double k2) { return diag_detail::energy_weight_b(spec, k2); });
}

// ---- series output ----------------------------------------------------------

// One comment line of key=value metadata, one header line, then %.17g rows.
inline void write_series_csv(const std::string& path, const ModelSpec& spec,
                             const PeriodicGrid& g,
                             const std::vector<DiagnosticsRecord>& recs,
                             const std::string& extra_meta = "") {
  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# model=" << model_name(spec.model) << " dim=" << g.dim() << " n=";
  for (int a = 0; a < g.dim(); ++a) out << (a ? "x" : "") << g.size(a);
  out << " alpha=" << format_g17(spec.alpha)
      << " alpha_m=" << format_g17(spec.alpha_m)
      << " nu=" << format_g17(spec.nu) << " eta=" << format_g17(spec.eta)
      << " conserved=";
  const auto names = conserved_names(spec.model);
  for (std::size_t i = 0; i < names.size(); ++i)
    out << (i ? "+" : "") << names[i];
  if (!extra_meta.empty()) out << ' ' << extra_meta;
  out << '\n' << kSeriesColumns << '\n';
  for (const auto& r : recs) {
    out << format_g17(r.t) << ',' << format_g17(r.e_alpha) << ','
        << format_g17(r.h_c) << ',' << format_g17(r.h_m_b) << ','
        << format_g17(r.h_m_bs) << ',' << format_g17(r.a_msq) << ','
        << format_g17(r.diss_u) << ',' << format_g17(r.diss_b) << ','
        << format_g17(r.enstrophy) << ',' << format_g17(r.div_u_rel) << ','
        << format_g17(r.div_b_rel) << ',' << format_g17(r.mean_u_rel) << ','
        << format_g17(r.mean_b_rel) << ',' << format_g17(r.u_scale) << ','
        << format_g17(r.b_scale) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace alphamhd
