#pragma once
// Time integration of d/dt y = N(y) - sigma y with diagonal stiff symbol.
//
//   if_rk4     classic RK4 composed with the exact integrating factor
//              exp(-sigma h); the linear part is advanced exactly, so a pure
//              decay problem reproduces exp(-sigma h) per step to roundoff.
//   imex_cnab2 Crank-Nicolson on the linear part, Adams-Bashforth 2 on the
//              nonlinear part with variable-step weights (1 + r/2, -r/2),
//              r = h_n / h_{n-1}; the first step uses CN plus explicit Euler.
//
// Steps keep the state clean (dealiased, solenoidal, zero mean) and check
// finiteness; a non-finite state raises BlowUpError with the last good time.
// Time accumulates as repeated t += h so a bitwise-restored (t, dt) resumes
// on the exact step sequence of an uninterrupted run. The CNAB2 multistep
// history is not part of the state; a resume re-enters through the CN-Euler
// bootstrap, so bit-exact resume is a property of if_rk4.

#include <functional>

#include "alphamhd/models.hpp"

namespace alphamhd {

enum class Scheme { if_rk4, imex_cnab2 };

inline const char* scheme_name(Scheme s) {
  return s == Scheme::if_rk4 ? "if_rk4" : "imex_cnab2";
}

inline Scheme scheme_from_name(const std::string& s) {
  if (s == "if_rk4") return Scheme::if_rk4;
  if (s == "imex_cnab2") return Scheme::imex_cnab2;
  throw ConfigError("unknown scheme '" + s + "'");
}

struct StepperConfig {
  Scheme scheme = Scheme::if_rk4;
  double dt = 1e-3;
  bool adaptive = false;
  double cfl_safety = 0.3;
  double vmax_floor = 1e-8;  // keeps the CFL step finite for tiny states
  bool linear_only = false;  // drop N(y): pure decay, used by tests

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("stepper: dt must be positive");
    if (adaptive && !(cfl_safety > 0.0 && cfl_safety <= 1.0))
      throw ConfigError("stepper: cfl_safety must lie in (0, 1]");
    if (!(vmax_floor > 0.0))
      throw ConfigError("stepper: vmax_floor must be positive");
  }
};

template <class Real>
class Stepper {
 public:
  Stepper(ModelSpec spec, GridPtr grid, StepperConfig cfg)
      : rhs_(spec, grid),
        cfg_(cfg),
        grid_(std::move(grid)),
        sym_(stiff_symbols<Real>(spec, *grid_)),
        pu_(grid_, grid_->dim()),
        pb_(grid_, grid_->dim()) {
    cfg_.validate();
    const std::size_t n = static_cast<std::size_t>(grid_->spectral_count());
    eu_half_.resize(n);
    eu_full_.resize(n);
    eb_half_.resize(n);
    eb_full_.resize(n);
    cnu_prop_.resize(n);
    cnu_gain_.resize(n);
    cnb_prop_.resize(n);
    cnb_gain_.resize(n);
    const int d = grid_->dim();
    k1u_ = SpectralField<Real>(grid_, d, true);
    k1b_ = SpectralField<Real>(grid_, d, true);
    k2u_ = SpectralField<Real>(grid_, d, true);
    k2b_ = SpectralField<Real>(grid_, d, true);
    k3u_ = SpectralField<Real>(grid_, d, true);
    k3b_ = SpectralField<Real>(grid_, d, true);
    k4u_ = SpectralField<Real>(grid_, d, true);
    k4b_ = SpectralField<Real>(grid_, d, true);
    nu_prev_ = SpectralField<Real>(grid_, d, true);
    nb_prev_ = SpectralField<Real>(grid_, d, true);
    ws_.u = SpectralField<Real>(grid_, d, true);
    ws_.b = SpectralField<Real>(grid_, d, true);
  }

  RhsEvaluator<Real>& rhs() { return rhs_; }
  const StepperConfig& config() const { return cfg_; }
  const StiffSymbols<Real>& symbols() const { return sym_; }

  // CFL step from the max physical speed of the evolved fields
  double cfl_dt(const SolverState<Real>& s) {
    inverse_transform(s.u, pu_);
    inverse_transform(s.b, pb_);
    double vmax = pu_.max_abs();
    const double bmax = pb_.max_abs();
    if (bmax > vmax) vmax = bmax;
    if (vmax < cfg_.vmax_floor) vmax = cfg_.vmax_floor;
    return cfg_.cfl_safety * grid_->dx_min() / vmax;
  }

  // advance by h; state.t += h on success
  void step(SolverState<Real>& s, double h) {
    try {
      if (cfg_.scheme == Scheme::if_rk4)
        step_if_rk4(s, h);
      else
        step_cnab2(s, h);
    } catch (const NonFiniteError&) {
      throw BlowUpError(s.t);  // a stage went non-finite inside a transform
    }
    dealias(s.u);
    dealias(s.b);
    leray_project(s.u);
    leray_project(s.b);
    s.u.pin_zero_mean();
    s.b.pin_zero_mean();
    if (!s.u.finite() || !s.b.finite()) throw BlowUpError(s.t);
    s.t += h;
  }

  // forget multistep history (after a discontinuous state change)
  void reset_history() { have_prev_ = false; }
  bool has_history() const { return have_prev_; }

 private:
  void eval(const SolverState<Real>& s, SpectralField<Real>& du,
            SpectralField<Real>& db) {
    if (cfg_.linear_only) {
      du.set_zero();
      db.set_zero();
      return;
    }
    rhs_.nonlinear(s, du, db);
  }

  void refresh_exp(double h) {
    if (h == h_exp_) return;
    const std::size_t n = eu_half_.size();
    for (std::size_t i = 0; i < n; ++i) {
      eu_half_[i] = Real(std::exp(-0.5 * h * static_cast<double>(sym_.u[i])));
      eu_full_[i] = Real(std::exp(-h * static_cast<double>(sym_.u[i])));
      eb_half_[i] = Real(std::exp(-0.5 * h * static_cast<double>(sym_.b[i])));
      eb_full_[i] = Real(std::exp(-h * static_cast<double>(sym_.b[i])));
    }
    h_exp_ = h;
  }

  void refresh_cn(double h) {
    if (h == h_cn_) return;
    const std::size_t n = cnu_prop_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double su = static_cast<double>(sym_.u[i]);
      const double sb = static_cast<double>(sym_.b[i]);
      cnu_prop_[i] = Real((1.0 - 0.5 * h * su) / (1.0 + 0.5 * h * su));
      cnu_gain_[i] = Real(h / (1.0 + 0.5 * h * su));
      cnb_prop_[i] = Real((1.0 - 0.5 * h * sb) / (1.0 + 0.5 * h * sb));
      cnb_gain_[i] = Real(h / (1.0 + 0.5 * h * sb));
    }
    h_cn_ = h;
  }

  // f_c[i] *= fac[i] for every component
  static void apply_diag(const avector<Real>& fac, SpectralField<Real>& f) {
    const std::int64_t n = f.count();
    for (int c = 0; c < f.ncomp; ++c) {
      auto* a = f.comp(c);
      for (std::int64_t i = 0; i < n; ++i) a[i] *= fac[i];
    }
  }

  // out = fac .* y + w k (k unfiltered)
  static void diag_axpy(const avector<Real>& fac, const SpectralField<Real>& y,
                        Real w, const SpectralField<Real>& k,
                        SpectralField<Real>& out) {
    const std::int64_t n = y.count();
    for (int c = 0; c < y.ncomp; ++c) {
      const auto* py = y.comp(c);
      const auto* pk = k.comp(c);
      auto* po = out.comp(c);
      for (std::int64_t i = 0; i < n; ++i) po[i] = fac[i] * py[i] + w * pk[i];
    }
  }

  // out = fac .* (y + w k)
  static void diag_shift(const avector<Real>& fac, const SpectralField<Real>& y,
                         Real w, const SpectralField<Real>& k,
                         SpectralField<Real>& out) {
    const std::int64_t n = y.count();
    for (int c = 0; c < y.ncomp; ++c) {
      const auto* py = y.comp(c);
      const auto* pk = k.comp(c);
      auto* po = out.comp(c);
      for (std::int64_t i = 0; i < n; ++i)
        po[i] = fac[i] * (py[i] + w * pk[i]);
    }
  }

  void step_if_rk4(SolverState<Real>& s, double h) {
    refresh_exp(h);
    const Real hh = Real(h);
    ws_.t = s.t;

    eval(s, k1u_, k1b_);  // k1 = N(y)

    // stage 2 state E2 (y + h/2 k1)
    diag_shift(eu_half_, s.u, hh / 2, k1u_, ws_.u);
    diag_shift(eb_half_, s.b, hh / 2, k1b_, ws_.b);
    eval(ws_, k2u_, k2b_);

    // stage 3 state E2 y + h/2 k2
    diag_axpy(eu_half_, s.u, hh / 2, k2u_, ws_.u);
    diag_axpy(eb_half_, s.b, hh / 2, k2b_, ws_.b);
    eval(ws_, k3u_, k3b_);

    // stage 4 state E1 y + h E2 k3; k3 stays filtered for the update
    apply_diag(eu_half_, k3u_);
    apply_diag(eb_half_, k3b_);
    diag_axpy(eu_full_, s.u, hh, k3u_, ws_.u);
    diag_axpy(eb_full_, s.b, hh, k3b_, ws_.b);
    eval(ws_, k4u_, k4b_);

    // y <- E1 y + h/6 (E1 k1 + 2 E2 k2 + 2 E2 k3 + k4)
    apply_diag(eu_full_, k1u_);
    apply_diag(eb_full_, k1b_);
    apply_diag(eu_half_, k2u_);
    apply_diag(eb_half_, k2b_);
    const Real w = hh / 6;
    const std::int64_t n = s.u.count();
    for (int c = 0; c < s.u.ncomp; ++c) {
      auto* pu = s.u.comp(c);
      auto* pb = s.b.comp(c);
      const auto* a1 = k1u_.comp(c);
      const auto* a2 = k2u_.comp(c);
      const auto* a3 = k3u_.comp(c);
      const auto* a4 = k4u_.comp(c);
      const auto* b1 = k1b_.comp(c);
      const auto* b2 = k2b_.comp(c);
      const auto* b3 = k3b_.comp(c);
      const auto* b4 = k4b_.comp(c);
      for (std::int64_t i = 0; i < n; ++i) {
        pu[i] = eu_full_[i] * pu[i] +
                w * (a1[i] + Real(2) * (a2[i] + a3[i]) + a4[i]);
        pb[i] = eb_full_[i] * pb[i] +
                w * (b1[i] + Real(2) * (b2[i] + b3[i]) + b4[i]);
      }
    }
  }

  void step_cnab2(SolverState<Real>& s, double h) {
    refresh_cn(h);
    eval(s, k1u_, k1b_);  // current N(y)
    const std::int64_t n = s.u.count();
    if (!have_prev_) {
      // CN on the linear part, explicit Euler on N
      for (int c = 0; c < s.u.ncomp; ++c) {
        auto* pu = s.u.comp(c);
        auto* pb = s.b.comp(c);
        const auto* fu = k1u_.comp(c);
        const auto* fb = k1b_.comp(c);
        for (std::int64_t i = 0; i < n; ++i) {
          pu[i] = cnu_prop_[i] * pu[i] + cnu_gain_[i] * fu[i];
          pb[i] = cnb_prop_[i] * pb[i] + cnb_gain_[i] * fb[i];
        }
      }
    } else {
      const double r = h / h_prev_;
      const Real w0 = Real(1.0 + 0.5 * r);
      const Real w1 = Real(-0.5 * r);
      for (int c = 0; c < s.u.ncomp; ++c) {
        auto* pu = s.u.comp(c);
        auto* pb = s.b.comp(c);
        const auto* fu = k1u_.comp(c);
        const auto* fb = k1b_.comp(c);
        const auto* gu = nu_prev_.comp(c);
        const auto* gb = nb_prev_.comp(c);
        for (std::int64_t i = 0; i < n; ++i) {
          pu[i] =
              cnu_prop_[i] * pu[i] + cnu_gain_[i] * (w0 * fu[i] + w1 * gu[i]);
          pb[i] =
              cnb_prop_[i] * pb[i] + cnb_gain_[i] * (w0 * fb[i] + w1 * gb[i]);
        }
      }
    }
    std::swap(nu_prev_, k1u_);
    std::swap(nb_prev_, k1b_);
    h_prev_ = h;
    have_prev_ = true;
  }

  RhsEvaluator<Real> rhs_;
  StepperConfig cfg_;
  GridPtr grid_;
  StiffSymbols<Real> sym_;
  avector<Real> eu_half_, eu_full_, eb_half_, eb_full_;
  avector<Real> cnu_prop_, cnu_gain_, cnb_prop_, cnb_gain_;
  double h_exp_ = -1.0, h_cn_ = -1.0;
  SpectralField<Real> k1u_, k1b_, k2u_, k2b_, k3u_, k3b_, k4u_, k4b_;
  SpectralField<Real> nu_prev_, nb_prev_;
  SolverState<Real> ws_;
  PhysicalField<Real> pu_, pb_;
  double h_prev_ = 0.0;
  bool have_prev_ = false;
};

// ---- integration driver ----------------------------------------------------

template <class Real>
struct IntegrateOptions {
  double t_end = 0.0;
  std::int64_t sample_every = 1;      // steps between samples; 0 disables
  std::int64_t checkpoint_every = 0;  // steps between checkpoints; 0 disables
  std::function<void(const SolverState<Real>&)> on_sample;
  std::function<void(const SolverState<Real>&, std::int64_t)> on_checkpoint;
};

// Advances the state to t_end. dt is in/out: fixed-step runs keep it, the
// adaptive CFL controller rewrites it each step. The initial state is always
// sampled; the final state is sampled even off cadence. The final partial
// step shrinks to land on t_end; a leftover below dt * 1e-9 is treated as
// arrival so accumulated roundoff cannot create a denormal extra step.
template <class Real>
inline void integrate(Stepper<Real>& stepper, SolverState<Real>& state,
                      const IntegrateOptions<Real>& opts, double& dt) {
  if (opts.on_sample) opts.on_sample(state);
  std::int64_t step = 0;
  bool sampled_last = true;
  while (true) {
    if (stepper.config().adaptive) dt = stepper.cfl_dt(state);
    if (!(dt > 0.0)) throw ConfigError("integrate: nonpositive dt");
    const double remaining = opts.t_end - state.t;
    if (remaining <= dt * 1e-9) break;
    const double h = remaining < dt ? remaining : dt;
    stepper.step(state, h);
    ++step;
    sampled_last = false;
    if (opts.sample_every > 0 && step % opts.sample_every == 0) {
      if (opts.on_sample) opts.on_sample(state);
      sampled_last = true;
    }
    if (opts.checkpoint_every > 0 && step % opts.checkpoint_every == 0 &&
        opts.on_checkpoint)
      opts.on_checkpoint(state, step);
  }
  if (!sampled_last && opts.on_sample) opts.on_sample(state);
}

}  // namespace alphamhd
