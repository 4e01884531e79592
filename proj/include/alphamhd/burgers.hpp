// 1D periodic testbeds: filtered advection (velocity smoothed by an inverse
// Helmholtz filter) and viscous advection, plus a first-order finite-volume
// entropy reference and a characteristics oracle for the smooth regime.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "alphamhd/common.hpp"
#include "alphamhd/fft.hpp"
#include "alphamhd/field.hpp"
#include "alphamhd/grid.hpp"
#include "alphamhd/operators.hpp"

namespace alphamhd {

// Evolved variable is v; the transport velocity u = (1 + alpha^2 k^2)^{-1} v
// in the filtered model and u = v in the viscous one. The mean of v is a
// conserved integral, so it is kept, not pinned.
struct Burgers1DState {
  double t = 0.0;
  SpectralField<double> v;

  explicit Burgers1DState(GridPtr g) : v(std::move(g), 1, false) {
    if (v.grid->dim() != 1)
      throw ConfigError("burgers: a 1D grid is required");
    if (v.grid->size(0) < 16)
      throw ConfigError("burgers: need at least 16 points");
  }
};

inline Burgers1DState burgers_state_from(
    GridPtr g, const std::function<double(double)>& ic) {
  Burgers1DState s(std::move(g));
  PhysicalField<double> p(s.v.grid, 1);
  const PeriodicGrid& grid = *s.v.grid;
  const double dx = grid.dx(0);
  for (std::int64_t i = 0; i < grid.physical_count(); ++i)
    p.comp(0)[i] = ic(static_cast<double>(i) * dx);
  forward_transform(p, s.v);
  dealias(s.v);
  return s;
}

// Integral of v over the box; conserved by both flows.
inline double mean_integral(const SpectralField<double>& v) {
  return v.comp(0)[0].real() / static_cast<double>(v.grid->physical_count()) *
         v.grid->length(0);
}

namespace burgers_detail {

// dealias F[a_phys * (d/dx c)_phys]
inline SpectralField<double> advect_1d(const SpectralField<double>& a,
                                       const SpectralField<double>& c) {
  const PeriodicGrid& g = *a.grid;
  PhysicalField<double> ap(a.grid, 1), dp(a.grid, 1);
  SpectralField<double> dc(a.grid, 1, false);
  op_detail::apply_ik(g, 0, c.comp(0), dc.comp(0));
  inverse_comp(g, a.comp(0), ap.comp(0));
  inverse_comp(g, dc.comp(0), dp.comp(0));
  for (std::int64_t i = 0; i < g.physical_count(); ++i)
    ap.comp(0)[i] *= dp.comp(0)[i];
  SpectralField<double> out(a.grid, 1, false);
  forward_comp(g, ap.comp(0), out.comp(0));
  dealias(out);
  return out;
}

}  // namespace burgers_detail

// dv/dt = -u dv/dx with u the filtered velocity
inline SpectralField<double> burgers_alpha_rhs(const SpectralField<double>& v,
                                               double alpha) {
  SpectralField<double> u = v;
  helmholtz_invert(u, alpha);
  SpectralField<double> out = burgers_detail::advect_1d(u, v);
  out.scale(-1.0);
  return out;
}

// Classic fourth-order step; the model has no stiff part.
inline void burgers_alpha_step(Burgers1DState& s, double alpha, double dt) {
  try {
    SpectralField<double> y = s.v;
    SpectralField<double> k1 = burgers_alpha_rhs(y, alpha);
    SpectralField<double> y2 = y;
    y2.axpy(0.5 * dt, k1);
    SpectralField<double> k2 = burgers_alpha_rhs(y2, alpha);
    SpectralField<double> y3 = y;
    y3.axpy(0.5 * dt, k2);
    SpectralField<double> k3 = burgers_alpha_rhs(y3, alpha);
    SpectralField<double> y4 = y;
    y4.axpy(dt, k3);
    SpectralField<double> k4 = burgers_alpha_rhs(y4, alpha);
    s.v.axpy(dt / 6.0, k1);
    s.v.axpy(dt / 3.0, k2);
    s.v.axpy(dt / 3.0, k3);
    s.v.axpy(dt / 6.0, k4);
  } catch (const NonFiniteError&) {
    throw BlowUpError(s.t);
  }
  if (!s.v.finite()) throw BlowUpError(s.t);
  s.t += dt;
}

// dv/dt = -v dv/dx + eps^2 d2v/dx2, diffusion handled by the exact
// exponential factor so the step is fourth order in the nonlinearity alone.
inline void viscous_burgers_step(Burgers1DState& s, double eps, double dt) {
  const PeriodicGrid& g = *s.v.grid;
  const std::int64_t nm = g.spectral_count();
  std::vector<double> e1(static_cast<std::size_t>(nm)), eh(e1.size());
  for (std::int64_t m = 0; m < nm; ++m) {
    const double k = g.kphys(0, static_cast<int>(m));
    const double sig = eps * eps * k * k;
    e1[static_cast<std::size_t>(m)] = std::exp(-sig * dt);
    eh[static_cast<std::size_t>(m)] = std::exp(-sig * dt * 0.5);
  }
  auto nonlin = [](const SpectralField<double>& y) {
    SpectralField<double> out = burgers_detail::advect_1d(y, y);
    out.scale(-1.0);
    return out;
  };
  auto damp = [&](SpectralField<double>& f, const std::vector<double>& e) {
    for (std::int64_t m = 0; m < nm; ++m)
      f.comp(0)[m] *= e[static_cast<std::size_t>(m)];
  };

  try {
    SpectralField<double> y = s.v;
    SpectralField<double> k1 = nonlin(y);
    SpectralField<double> t1 = y;
    t1.axpy(0.5 * dt, k1);
    damp(t1, eh);
    SpectralField<double> k2 = nonlin(t1);
    SpectralField<double> yh = y;
    damp(yh, eh);
    SpectralField<double> t2 = yh;
    t2.axpy(0.5 * dt, k2);
    SpectralField<double> k3 = nonlin(t2);
    SpectralField<double> t3 = y;
    damp(t3, e1);
    SpectralField<double> k3d = k3;
    damp(k3d, eh);
    t3.axpy(dt, k3d);
    SpectralField<double> k4 = nonlin(t3);

    damp(k1, e1);
    damp(k2, eh);
    damp(k3, eh);
    damp(s.v, e1);
    s.v.axpy(dt / 6.0, k1);
    s.v.axpy(dt / 3.0, k2);
    s.v.axpy(dt / 3.0, k3);
    s.v.axpy(dt / 6.0, k4);
  } catch (const NonFiniteError&) {
    throw BlowUpError(s.t);
  }
  if (!s.v.finite()) throw BlowUpError(s.t);
  s.t += dt;
}

inline double burgers_cfl_dt(const SpectralField<double>& v, double safety) {
  PhysicalField<double> p = to_physical(v);
  const double vmax = std::max(p.max_abs(), 1e-8);
  return safety * v.grid->dx(0) / vmax;
}

// ---- finite-volume entropy reference ---------------------------------------

struct FiniteVolumeSolution {
  double t = 0.0;
  double dx = 0.0;
  std::vector<double> cells;

  double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx; }
};

// Exact Riemann flux for the quadratic flux u^2/2, sonic case included.
inline double godunov_flux(double a, double b) {
  if (a > b) {  // shock, upwind by its speed
    return 0.5 * (a + b) > 0.0 ? 0.5 * a * a : 0.5 * b * b;
  }
  if (a >= 0.0) return 0.5 * a * a;
  if (b <= 0.0) return 0.5 * b * b;
  return 0.0;  // transonic rarefaction straddles u = 0
}

inline FiniteVolumeSolution entropy_reference(
    const std::function<double(double)>& ic, double box, int ncells,
    double t_end, double cfl = 0.45) {
  if (ncells < 16) throw ConfigError("entropy reference: need at least 16 cells");
  if (!(box > 0.0) || t_end < 0.0)
    throw ConfigError("entropy reference: bad box or time");
  FiniteVolumeSolution s;
  s.dx = box / ncells;
  s.cells.resize(static_cast<std::size_t>(ncells));
  for (std::size_t i = 0; i < s.cells.size(); ++i) s.cells[i] = ic(s.center(i));

  std::vector<double> flux(s.cells.size() + 1);
  while (s.t < t_end) {
    const double remaining = t_end - s.t;
    if (remaining <= 1e-14 * (t_end + 1.0)) break;
    double umax = 1e-8;
    for (double u : s.cells) umax = std::max(umax, std::fabs(u));
    double dt = cfl * s.dx / umax;
    dt = std::min(dt, remaining);
    const std::size_t n = s.cells.size();
    for (std::size_t i = 0; i <= n; ++i) {
      const double a = s.cells[(i + n - 1) % n];
      const double b = s.cells[i % n];
      flux[i] = godunov_flux(a, b);
    }
    const double lam = dt / s.dx;
    for (std::size_t i = 0; i < n; ++i)
      s.cells[i] -= lam * (flux[i + 1] - flux[i]);
    s.t += dt;
    if (dt <= 0.0) break;
  }
  return s;
}

// Location where the profile crosses (hi + lo) / 2 going down; linear
// interpolation between cell centers. Returns the steepest such crossing.
inline double shock_position(const FiniteVolumeSolution& s, double lo, double hi) {
  const double level = 0.5 * (lo + hi);
  const std::size_t n = s.cells.size();
  double best_x = -1.0, best_drop = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = s.cells[i], b = s.cells[i + 1];
    if (a >= level && b < level && a > b) {
      const double drop = a - b;
      if (drop > best_drop) {
        best_drop = drop;
        best_x = s.center(i) + s.dx * (a - level) / (a - b);
      }
    }
  }
  if (best_x < 0.0) throw ConfigError("shock_position: no downward crossing found");
  return best_x;
}

// Trigonometric interpolation of v onto the centers of nfine uniform cells.
inline std::vector<double> sample_at_centers(const SpectralField<double>& v,
                                             int nfine) {
  const PeriodicGrid& g = *v.grid;
  const int n = g.size(0);
  if (nfine < n || nfine % 2 != 0)
    throw ConfigError("sample_at_centers: fine grid must be even and >= source");
  GridPtr gf = make_grid({nfine}, {g.length(0)});
  SpectralField<double> vf(gf, 1, false);
  const double ratio = static_cast<double>(nfine) / n;
  const double half = 0.5 * gf->dx(0);
  for (int m = 0; m <= n / 2; ++m) {
    const double ph = g.kphys(0, m) * half;
    const std::complex<double> shift(std::cos(ph), std::sin(ph));
    vf.comp(0)[m] = v.comp(0)[m] * ratio * shift;
  }
  PhysicalField<double> p(gf, 1);
  inverse_transform(vf, p);
  return std::vector<double>(p.data.begin(), p.data.end());
}

inline double l1_distance(const SpectralField<double>& v,
                          const FiniteVolumeSolution& ref) {
  const std::vector<double> fine =
      sample_at_centers(v, static_cast<int>(ref.cells.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i)
    acc += std::fabs(fine[i] - ref.cells[i]);
  return acc * ref.dx;
}

// Smooth-regime oracle: solve xi + t v0(xi) = x for the foot point, then
// v(x, t) = v0(xi). Valid strictly before characteristics cross.
inline double characteristics_value(const std::function<double(double)>& v0,
                                    const std::function<double(double)>& dv0,
                                    double x, double t) {
  double xi = x;
  for (int it = 0; it < 200; ++it) {
    const double f = xi + t * v0(xi) - x;
    const double fp = 1.0 + t * dv0(xi);
    if (fp <= 1e-12)
      throw ConfigError("characteristics_value: map is not invertible here");
    const double step = f / fp;
    xi -= step;
    if (std::fabs(step) < 1e-14 * (1.0 + std::fabs(x))) return v0(xi);
  }
  throw ConfigError("characteristics_value: no convergence");
}

}  // namespace alphamhd
