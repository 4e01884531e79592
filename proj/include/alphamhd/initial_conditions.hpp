#pragma once
// Named initial states. All fields are built in physical space from closed
// forms, transformed, then dealiased / projected / pinned so the state is
// exactly clean on entry to the solver.
//
//   tg      3D Taylor-Green velocity, zero magnetic field
//   abc     Beltrami flow (curl w = w) in both fields; its magnetic
//           helicity is |B|^2 / 2 = 3 V amp^2 / 2 exactly
//   tg-mhd  Taylor-Green velocity against a mixed Beltrami + Taylor-Green
//           magnetic field (plus optional solenoidal noise), chosen so the
//           energy, cross-helicity and magnetic-helicity denominators of
//           relative-drift tests are all away from zero
//   ot      2D vortex pair u = (-sin y, sin x) against b = (-sin y, sin 2x)
//   random  seeded solenoidal fields with a low-|m| spectrum envelope
//
// On 2D grids tg, abc and tg-mhd all map to ot.

#include "alphamhd/random_fields.hpp"
#include "alphamhd/models.hpp"

namespace alphamhd {

struct IcParams {
  std::string name = "tg-mhd";
  double amp_u = 1.0;
  double amp_b = 1.0;
  double noise = 0.0;        // L2 norm of the added solenoidal noise
  std::uint64_t seed = 1;

  void validate() const {
    if (name != "tg" && name != "abc" && name != "tg-mhd" && name != "ot" &&
        name != "random")
      throw ConfigError("ic: unknown initial condition '" + name + "'");
    if (noise < 0.0) throw ConfigError("ic: noise must be >= 0");
  }
};

namespace ic_detail {

template <class Real, class F>
inline SpectralField<Real> from_closed_form(GridPtr grid, F&& fill) {
  PhysicalField<Real> p(grid, grid->dim());
  for_each_point(*grid, [&](std::int64_t flat, double x, double y, double z) {
    fill(p, flat, x, y, z);
  });
  SpectralField<Real> f = to_spectral(p, true);
  dealias(f);
  leray_project(f);
  f.pin_zero_mean();
  return f;
}

template <class Real>
inline SpectralField<Real> taylor_green(GridPtr grid, double amp) {
  return from_closed_form<Real>(
      grid, [amp](PhysicalField<Real>& p, std::int64_t i, double x, double y,
                  double z) {
        p.comp(0)[i] = Real(amp * std::sin(x) * std::cos(y) * std::cos(z));
        p.comp(1)[i] = Real(-amp * std::cos(x) * std::sin(y) * std::cos(z));
        p.comp(2)[i] = Real(0);
      });
}

// curl w = w for equal coefficients on the unit box
template <class Real>
inline SpectralField<Real> abc_flow(GridPtr grid, double amp) {
  return from_closed_form<Real>(
      grid, [amp](PhysicalField<Real>& p, std::int64_t i, double x, double y,
                  double z) {
        p.comp(0)[i] = Real(amp * (std::sin(z) + std::cos(y)));
        p.comp(1)[i] = Real(amp * (std::sin(x) + std::cos(z)));
        p.comp(2)[i] = Real(amp * (std::sin(y) + std::cos(x)));
      });
}

template <class Real>
inline SpectralField<Real> vortex_2d(GridPtr grid, double amp) {
  return from_closed_form<Real>(
      grid, [amp](PhysicalField<Real>& p, std::int64_t i, double x, double y,
                  double) {
        p.comp(0)[i] = Real(-amp * std::sin(y));
        p.comp(1)[i] = Real(amp * std::sin(x));
      });
}

template <class Real>
inline SpectralField<Real> ot_magnetic_2d(GridPtr grid, double amp) {
  return from_closed_form<Real>(
      grid, [amp](PhysicalField<Real>& p, std::int64_t i, double x, double y,
                  double) {
        p.comp(0)[i] = Real(-amp * std::sin(y));
        p.comp(1)[i] = Real(amp * std::sin(2.0 * x));
      });
}

}  // namespace ic_detail

template <class Real>
inline SolverState<Real> make_initial_state(GridPtr grid,
                                            const IcParams& ic) {
  ic.validate();
  SolverState<Real> s(grid);
  const int d = grid->dim();
  if (d == 2) {
    if (ic.name == "random") {
      s.u = random_solenoidal<Real>(grid, ic.seed, ic.amp_u);
      s.b = random_solenoidal<Real>(grid, ic.seed + 1, ic.amp_b);
    } else {
      s.u = ic_detail::vortex_2d<Real>(grid, ic.amp_u);
      s.b = ic_detail::ot_magnetic_2d<Real>(grid, ic.amp_b);
    }
  } else if (d == 3) {
    if (ic.name == "tg") {
      s.u = ic_detail::taylor_green<Real>(grid, ic.amp_u);
    } else if (ic.name == "abc") {
      s.u = ic_detail::abc_flow<Real>(grid, ic.amp_u);
      s.b = ic_detail::abc_flow<Real>(grid, ic.amp_b);
    } else if (ic.name == "tg-mhd") {
      s.u = ic_detail::taylor_green<Real>(grid, ic.amp_u);
      s.b = ic_detail::abc_flow<Real>(grid, 0.5 * ic.amp_b);
      s.b.axpy(Real(1), ic_detail::taylor_green<Real>(grid, 0.5 * ic.amp_b));
    } else if (ic.name == "random") {
      s.u = random_solenoidal<Real>(grid, ic.seed, ic.amp_u);
      s.b = random_solenoidal<Real>(grid, ic.seed + 1, ic.amp_b);
    } else {
      throw ConfigError("ic: '" + ic.name + "' is not defined in 3D");
    }
  } else {
    throw ConfigError("ic: named states need a 2D or 3D grid");
  }
  if (ic.noise > 0.0) {
    s.b.axpy(Real(1), random_solenoidal<Real>(grid, ic.seed + 7, ic.noise));
    s.b.pin_zero_mean();
  }
  return s;
}

}  // namespace alphamhd
