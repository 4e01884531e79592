#pragma once
// Model family on the periodic box, pressure eliminated by Leray projection.
// The evolved velocity variable is always the smoothed field u with
// v = (1 + alpha^2 |k|^2) u applied per mode; baseline mhd is the alpha = 0
// member of the same family. The evolved magnetic variable is B except for
// lamhd_alpha, which evolves the smoothed field Bs with
// B = (1 + alpha_m^2 |k|^2) Bs; the magnetic diffusion then acts on Bs
// through the stiff symbol eta |k|^2 (1 + alpha_m^2 |k|^2).
//
// Nonlinear terms per model, all dealiased, Leray projected and written in
// u-form (the inverse velocity filter is applied analytically per mode):
//   mhd, mhd_alpha : du = Hinv[-Bt(u,v) + Bt(B,B)],   db = curl(u x B)
//   lamhd_alpha    : du = Hinv[-Bt(u,v) + Bt(Bs,B)],  dbs = curl(u x Bs)
//   leray_alpha_3d : du = Hinv[-B(u,v) + Bt(B,B)],    db = -B(u,B) + B(B,v)
//   ml_alpha_mhd   : du = Hinv[-B(v,u) + Bt(B,B)],    db = curl(u x B)
//   leray_alpha_2d : du = Hinv[-B(u,v) + B(B,B)],     db = curl(u x B)
// with B(a,c) = P[(a.grad) c] and Bt(a,c) = P[(curl c) x a]. Under the
// projection Bt(B,B) = B(B,B) and curl(u x B) = -B(u,B) + B(B,u) hold
// identically for solenoidal inputs, so the curl forms above are the same
// truncated convolutions as the literal advective differences.

#include <string>

#include "alphamhd/operators.hpp"

namespace alphamhd {

enum class Model {
  mhd,
  mhd_alpha,
  lamhd_alpha,
  leray_alpha_mhd_3d,
  leray_alpha_mhd_2d,
  ml_alpha_mhd,
};

inline const char* model_name(Model m) {
  switch (m) {
    case Model::mhd: return "mhd";
    case Model::mhd_alpha: return "mhd_alpha";
    case Model::lamhd_alpha: return "lamhd_alpha";
    case Model::leray_alpha_mhd_3d: return "leray_alpha_mhd_3d";
    case Model::leray_alpha_mhd_2d: return "leray_alpha_mhd_2d";
    case Model::ml_alpha_mhd: return "ml_alpha_mhd";
  }
  return "?";
}

inline Model model_from_name(const std::string& s) {
  if (s == "mhd") return Model::mhd;
  if (s == "mhd_alpha") return Model::mhd_alpha;
  if (s == "lamhd_alpha") return Model::lamhd_alpha;
  if (s == "leray_alpha_mhd_3d") return Model::leray_alpha_mhd_3d;
  if (s == "leray_alpha_mhd_2d") return Model::leray_alpha_mhd_2d;
  if (s == "ml_alpha_mhd") return Model::ml_alpha_mhd;
  throw ConfigError("unknown model '" + s + "'");
}

inline int model_dim(Model m) {
  return m == Model::leray_alpha_mhd_2d ? 2 : 3;
}

struct ModelSpec {
  Model model = Model::mhd_alpha;
  double alpha = 0.0;    // velocity filter width
  double alpha_m = 0.0;  // magnetic filter width, lamhd_alpha only
  double nu = 0.0;
  double eta = 0.0;

  void validate() const {
    if (!(alpha >= 0.0) || !(alpha_m >= 0.0))
      throw ConfigError("model: filter widths must be >= 0");
    if (!(nu >= 0.0) || !(eta >= 0.0))
      throw ConfigError("model: nu and eta must be >= 0");
    if (model == Model::mhd && alpha != 0.0)
      throw ConfigError("model: mhd requires alpha = 0");
    if (alpha_m != 0.0 && model != Model::lamhd_alpha)
      throw ConfigError("model: alpha_m is only meaningful for lamhd_alpha");
  }
  bool magnetic_filtered() const {
    return model == Model::lamhd_alpha && alpha_m != 0.0;
  }
};

template <class Real>
struct SolverState {
  double t = 0.0;
  SpectralField<Real> u;  // smoothed velocity
  SpectralField<Real> b;  // B, or Bs for lamhd_alpha

  SolverState() = default;
  explicit SolverState(GridPtr g)
      : u(spectral_vector<Real>(g)), b(spectral_vector<Real>(g)) {}
};

template <class Real>
inline void validate_state(const ModelSpec& spec,
                           const SolverState<Real>& s) {
  spec.validate();
  const int d = s.u.grid->dim();
  if (d != model_dim(spec.model))
    throw ConfigError(std::string("state: ") + model_name(spec.model) +
                      " needs a " + std::to_string(model_dim(spec.model)) +
                      "D grid");
  if (s.u.ncomp != d || s.b.ncomp != d)
    throw ConfigError("state: fields must have dim components");
  if (!s.u.grid->same_shape(*s.b.grid))
    throw ConfigError("state: u and b live on different grids");
}

// ---- public bilinear forms ------------------------------------------------

// B(a, c) = P dealias[(a.grad) c]; a must be solenoidal and both inputs
// dealiased for the truncated-convolution identities to hold.
template <class Real>
inline SpectralField<Real> advective_bilinear(const SpectralField<Real>& a,
                                              const SpectralField<Real>& c) {
  const PeriodicGrid& g = *a.grid;
  const int d = g.dim();
  if (d < 2) throw ConfigError("advective_bilinear: dim must be 2 or 3");
  if (a.ncomp != d || c.ncomp != d)
    throw ConfigError("advective_bilinear: vector inputs required");
  PhysicalField<Real> ap = to_physical(a);
  PhysicalField<Real> dc(a.grid, 1);
  PhysicalField<Real> acc(a.grid, 1);
  SpectralField<Real> tmp(a.grid, 1, true);
  SpectralField<Real> out(a.grid, d, true);
  for (int i = 0; i < d; ++i) {
    Real* pacc = acc.comp(0);
    for (std::int64_t p = 0; p < acc.count(); ++p) pacc[p] = Real(0);
    for (int j = 0; j < d; ++j) {
      op_detail::apply_ik(g, j, c.comp(i), tmp.comp(0));
      inverse_comp(g, tmp.comp(0), dc.comp(0));
      const Real* paj = ap.comp(j);
      const Real* pdc = dc.comp(0);
      for (std::int64_t p = 0; p < acc.count(); ++p) pacc[p] += paj[p] * pdc[p];
    }
    forward_comp(g, acc.comp(0), out.comp(i));
  }
  dealias(out);
  leray_project(out);
  out.pin_zero_mean();
  return out;
}

// Bt(a, c) = P dealias[(curl c) x a]; 3D only (2D paths use the scalar curl)
template <class Real>
inline SpectralField<Real> rotational_bilinear(const SpectralField<Real>& a,
                                               const SpectralField<Real>& c) {
  const PeriodicGrid& g = *a.grid;
  if (g.dim() != 3)
    throw ConfigError("rotational_bilinear: dim 3 required (2D has its own forms)");
  if (a.ncomp != 3 || c.ncomp != 3)
    throw ConfigError("rotational_bilinear: vector inputs required");
  SpectralField<Real> q = curl(c);
  PhysicalField<Real> qp = to_physical(q);
  PhysicalField<Real> ap = to_physical(a);
  PhysicalField<Real> cr(a.grid, 3);
  for (std::int64_t p = 0; p < cr.count(); ++p) {
    const Real q0 = qp.comp(0)[p], q1 = qp.comp(1)[p], q2 = qp.comp(2)[p];
    const Real a0 = ap.comp(0)[p], a1 = ap.comp(1)[p], a2 = ap.comp(2)[p];
    cr.comp(0)[p] = q1 * a2 - q2 * a1;
    cr.comp(1)[p] = q2 * a0 - q0 * a2;
    cr.comp(2)[p] = q0 * a1 - q1 * a0;
  }
  SpectralField<Real> out = to_spectral(cr, true);
  dealias(out);
  leray_project(out);
  out.pin_zero_mean();
  return out;
}

// ---- stiff diagonal -------------------------------------------------------

template <class Real>
struct StiffSymbols {
  avector<Real> u, b;  // per-mode decay rates: d/dt y = N(y) - sigma y
};

// Per-mode decay rates of the linear part, in the evolved variables.
inline double stiff_sigma_u(const ModelSpec& spec, double k2) {
  return spec.nu * k2;
}

// For a filtered induction equation the diffusion of the unfiltered field
// becomes eta k^2 (1 + alpha_m^2 k^2) acting on the evolved one.
inline double stiff_sigma_b(const ModelSpec& spec, double k2) {
  if (spec.model == Model::lamhd_alpha)
    return spec.eta * k2 * (1.0 + spec.alpha_m * spec.alpha_m * k2);
  return spec.eta * k2;
}

template <class Real>
inline StiffSymbols<Real> stiff_symbols(const ModelSpec& spec,
                                        const PeriodicGrid& g) {
  StiffSymbols<Real> s;
  s.u.resize(g.spectral_count());
  s.b.resize(g.spectral_count());
  const int d = g.dim();
  for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int i2) {
    double k2 = g.kphys(0, i0) * g.kphys(0, i0);
    if (d > 1) k2 += g.kphys(1, i1) * g.kphys(1, i1);
    if (d > 2) k2 += g.kphys(2, i2) * g.kphys(2, i2);
    s.u[flat] = Real(stiff_sigma_u(spec, k2));
    s.b[flat] = Real(stiff_sigma_b(spec, k2));
  });
  return s;
}

// ---- fused nonlinear evaluation -------------------------------------------

template <class Real>
class RhsEvaluator {
 public:
  RhsEvaluator(ModelSpec spec, GridPtr grid)
      : spec_(spec),
        grid_(std::move(grid)),
        d_(grid_->dim()),
        up_(grid_, d_),
        bp_(grid_, d_),
        qp_(grid_, d_),
        jp_(grid_, d_),
        crp_(grid_, d_),
        sp_(grid_, 1),
        sacc_(grid_, 1),
        v_(grid_, d_, true),
        bf_(grid_, d_, true),
        stmp_(grid_, 1, true) {
    spec_.validate();
    if (d_ != model_dim(spec_.model))
      throw ConfigError("rhs: grid dim does not match model");
  }

  const ModelSpec& spec() const { return spec_; }
  const PeriodicGrid& grid() const { return *grid_; }

  // Nonlinear parts of du/dt and db/dt in u-form; outputs are dealiased,
  // divergence-free and zero-mean. Inputs must be clean states.
  void nonlinear(const SolverState<Real>& s, SpectralField<Real>& du,
                 SpectralField<Real>& db) {
    ensure_shape(du);
    ensure_shape(db);
    switch (spec_.model) {
      case Model::mhd:
      case Model::mhd_alpha:
      case Model::lamhd_alpha:
        rotational_family(s, du, db);
        break;
      case Model::ml_alpha_mhd:
        ml_family(s, du, db);
        break;
      case Model::leray_alpha_mhd_3d:
        leray3d(s, du, db);
        break;
      case Model::leray_alpha_mhd_2d:
        leray2d(s, du, db);
        break;
    }
  }

  // Same quantities assembled from the public bilinear helpers; slower
  // independent route used by tests.
  static void nonlinear_reference(const ModelSpec& spec,
                                  const SolverState<Real>& s,
                                  SpectralField<Real>& du,
                                  SpectralField<Real>& db) {
    SpectralField<Real> v = helmholtz_applied(s.u, spec.alpha);
    switch (spec.model) {
      case Model::mhd:
      case Model::mhd_alpha: {
        du = rotational_bilinear(s.b, s.b);
        du.axpy(Real(-1), rotational_bilinear(s.u, v));
        db = advective_bilinear(s.b, s.u);
        db.axpy(Real(-1), advective_bilinear(s.u, s.b));
        break;
      }
      case Model::lamhd_alpha: {
        SpectralField<Real> bf = helmholtz_applied(s.b, spec.alpha_m);
        du = rotational_bilinear(s.b, bf);
        du.axpy(Real(-1), rotational_bilinear(s.u, v));
        db = advective_bilinear(s.b, s.u);
        db.axpy(Real(-1), advective_bilinear(s.u, s.b));
        break;
      }
      case Model::leray_alpha_mhd_3d: {
        du = advective_bilinear(s.b, s.b);
        du.axpy(Real(-1), advective_bilinear(s.u, v));
        db = advective_bilinear(s.b, v);
        db.axpy(Real(-1), advective_bilinear(s.u, s.b));
        break;
      }
      case Model::ml_alpha_mhd: {
        du = advective_bilinear(s.b, s.b);
        du.axpy(Real(-1), advective_bilinear(v, s.u));
        db = advective_bilinear(s.b, s.u);
        db.axpy(Real(-1), advective_bilinear(s.u, s.b));
        break;
      }
      case Model::leray_alpha_mhd_2d: {
        du = advective_bilinear(s.b, s.b);
        du.axpy(Real(-1), advective_bilinear(s.u, v));
        db = advective_bilinear(s.b, s.u);
        db.axpy(Real(-1), advective_bilinear(s.u, s.b));
        break;
      }
    }
    helmholtz_invert(du, spec.alpha);
  }

 private:
  void ensure_shape(SpectralField<Real>& f) {
    if (!f.grid || !f.grid->same_shape(*grid_) || f.ncomp != d_)
      f = SpectralField<Real>(grid_, d_, true);
  }

  void hygiene(SpectralField<Real>& f) {
    dealias(f);
    leray_project(f);
    f.pin_zero_mean();
  }

  // cr = a x b pointwise
  void cross3(const PhysicalField<Real>& a, const PhysicalField<Real>& b,
              PhysicalField<Real>& cr) {
    const std::int64_t n = cr.count();
    const Real* a0 = a.comp(0);
    const Real* a1 = a.comp(1);
    const Real* a2 = a.comp(2);
    const Real* b0 = b.comp(0);
    const Real* b1 = b.comp(1);
    const Real* b2 = b.comp(2);
    Real* c0 = cr.comp(0);
    Real* c1 = cr.comp(1);
    Real* c2 = cr.comp(2);
    for (std::int64_t p = 0; p < n; ++p) {
      c0[p] = a1[p] * b2[p] - a2[p] * b1[p];
      c1[p] = a2[p] * b0[p] - a0[p] * b2[p];
      c2[p] = a0[p] * b1[p] - a1[p] * b0[p];
    }
  }

  // out_hat = transform of sum_j a_phys_j * d_j c_i, one component at a time
  void advect_into(const PhysicalField<Real>& a_phys,
                   const SpectralField<Real>& c, SpectralField<Real>& out) {
    const PeriodicGrid& g = *grid_;
    for (int i = 0; i < d_; ++i) {
      Real* acc = sacc_.comp(0);
      for (std::int64_t p = 0; p < sacc_.count(); ++p) acc[p] = Real(0);
      for (int j = 0; j < d_; ++j) {
        op_detail::apply_ik(g, j, c.comp(i), stmp_.comp(0));
        inverse_comp(g, stmp_.comp(0), sp_.comp(0));
        const Real* aj = a_phys.comp(j);
        const Real* dcp = sp_.comp(0);
        for (std::int64_t p = 0; p < sacc_.count(); ++p) acc[p] += aj[p] * dcp[p];
      }
      forward_comp(g, sacc_.comp(0), out.comp(i));
    }
  }

  // db = curl(u x bev), both physical inputs already available
  void induction_curl3(SpectralField<Real>& db) {
    cross3(up_, bp_, crp_);
    forward_transform(crp_, v_);  // reuse v_ as scratch spectral vector
    db = curl(v_);
    hygiene(db);
  }

  void rotational_family(const SolverState<Real>& s, SpectralField<Real>& du,
                         SpectralField<Real>& db) {
    // velocity: du = Hinv[-(curl v) x u + (curl B) x bev], induction in curl form
    v_ = s.u;
    helmholtz_apply(v_, spec_.alpha);
    inverse_transform(s.u, up_);
    inverse_transform(s.b, bp_);
    SpectralField<Real> q = curl(v_);
    inverse_transform(q, qp_);
    if (spec_.magnetic_filtered()) {
      bf_ = s.b;
      helmholtz_apply(bf_, spec_.alpha_m);
      q = curl(bf_);
    } else {
      q = curl(s.b);
    }
    inverse_transform(q, jp_);
    cross3(qp_, up_, crp_);      // (curl v) x u
    forward_transform(crp_, du);
    cross3(jp_, bp_, crp_);      // (curl B) x bev
    forward_transform(crp_, v_); // scratch
    du.scale(Real(-1));
    du.axpy(Real(1), v_);
    hygiene(du);
    helmholtz_invert(du, spec_.alpha);
    induction_curl3(db);
  }

  void ml_family(const SolverState<Real>& s, SpectralField<Real>& du,
                 SpectralField<Real>& db) {
    v_ = s.u;
    helmholtz_apply(v_, spec_.alpha);
    inverse_transform(s.u, up_);
    inverse_transform(s.b, bp_);
    inverse_transform(v_, qp_);  // v physical
    advect_into(qp_, s.u, du);   // (v.grad) u
    SpectralField<Real> j = curl(s.b);
    inverse_transform(j, jp_);
    cross3(jp_, bp_, crp_);
    forward_transform(crp_, v_);  // scratch: (curl B) x B
    du.scale(Real(-1));
    du.axpy(Real(1), v_);
    hygiene(du);
    helmholtz_invert(du, spec_.alpha);
    induction_curl3(db);
  }

  void leray3d(const SolverState<Real>& s, SpectralField<Real>& du,
               SpectralField<Real>& db) {
    v_ = s.u;
    helmholtz_apply(v_, spec_.alpha);
    inverse_transform(s.u, up_);
    inverse_transform(s.b, bp_);
    advect_into(up_, v_, du);  // (u.grad) v
    SpectralField<Real> j = curl(s.b);
    inverse_transform(j, jp_);
    cross3(jp_, bp_, crp_);
    forward_transform(crp_, bf_);  // scratch: (curl B) x B
    du.scale(Real(-1));
    du.axpy(Real(1), bf_);
    hygiene(du);
    helmholtz_invert(du, spec_.alpha);
    // induction: -(u.grad) B + (B.grad) v
    advect_into(up_, s.b, db);
    advect_into(bp_, v_, bf_);
    db.scale(Real(-1));
    db.axpy(Real(1), bf_);
    hygiene(db);
  }

  void leray2d(const SolverState<Real>& s, SpectralField<Real>& du,
               SpectralField<Real>& db) {
    v_ = s.u;
    helmholtz_apply(v_, spec_.alpha);
    inverse_transform(s.u, up_);
    inverse_transform(s.b, bp_);
    advect_into(up_, v_, du);  // (u.grad) v
    // magnetic force: jz * (-b1, b0) with jz the scalar curl of B
    SpectralField<Real> jz = scalar_curl(s.b);
    inverse_comp(*grid_, jz.comp(0), sp_.comp(0));
    const Real* jzp = sp_.comp(0);
    for (std::int64_t p = 0; p < crp_.count(); ++p) {
      crp_.comp(0)[p] = -jzp[p] * bp_.comp(1)[p];
      crp_.comp(1)[p] = jzp[p] * bp_.comp(0)[p];
    }
    forward_transform(crp_, bf_);
    du.scale(Real(-1));
    du.axpy(Real(1), bf_);
    hygiene(du);
    helmholtz_invert(du, spec_.alpha);
    // induction: curl(w zhat) with w = u0 b1 - u1 b0
    Real* w = sacc_.comp(0);
    for (std::int64_t p = 0; p < sacc_.count(); ++p)
      w[p] = up_.comp(0)[p] * bp_.comp(1)[p] - up_.comp(1)[p] * bp_.comp(0)[p];
    forward_comp(*grid_, sacc_.comp(0), stmp_.comp(0));
    const PeriodicGrid& g = *grid_;
    using C = std::complex<Real>;
    const C* wh = stmp_.comp(0);
    C* d0 = db.comp(0);
    C* d1 = db.comp(1);
    for_each_mode(g, [&](std::int64_t flat, int i0, int i1, int) {
      const Real k0 = Real(g.kphys(0, i0));
      const Real k1 = Real(g.kphys(1, i1));
      const C z = wh[flat];
      d0[flat] = C(-k1 * z.imag(), k1 * z.real());   // +i k1 w
      d1[flat] = C(k0 * z.imag(), -k0 * z.real());   // -i k0 w
    });
    hygiene(db);
  }

  ModelSpec spec_;
  GridPtr grid_;
  int d_;
  PhysicalField<Real> up_, bp_, qp_, jp_, crp_;  // vectors
  PhysicalField<Real> sp_, sacc_;                // scalars
  SpectralField<Real> v_, bf_;                   // spectral scratch vectors
  SpectralField<Real> stmp_;                     // spectral scratch scalar
};

}  // namespace alphamhd
