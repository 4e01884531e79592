// Command line front end: run / study / verify / inspect. Kept in a header so
// tests can drive run_cli in process and check exit codes.
//
// Exit codes: 0 success, 1 run failure, 2 config or usage error,
// 3 verification failure.
#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "alphamhd/checkpoint.hpp"
#include "alphamhd/config.hpp"
#include "alphamhd/diagnostics.hpp"
#include "alphamhd/galerkin.hpp"
#include "alphamhd/initial_conditions.hpp"
#include "alphamhd/models.hpp"
#include "alphamhd/operators.hpp"
#include "alphamhd/random_fields.hpp"
#include "alphamhd/study.hpp"
#include "alphamhd/timestepper.hpp"

namespace alphamhd {

// ---- conserved-rate checks ------------------------------------------------

// One instantaneous invariant: the ideal nonlinear term must not feed the
// quantity. residual is |rate| normalized by the pairing scale.
struct RateCheck {
  std::string model;
  std::string quantity;
  int trials = 0;
  double residual = 0.0;
};

namespace cli_detail {

inline double rate_of(double raw, double scale) {
  return scale > 0.0 ? std::fabs(raw) / scale : std::fabs(raw);
}

}  // namespace cli_detail

// For every model, checks that the ideal right hand side is orthogonal to the
// gradients of that model's conserved quantities on random solenoidal states.
inline std::vector<RateCheck> conserved_rate_checks(int n, int trials,
                                                    std::uint64_t seed) {
  std::vector<RateCheck> out;
  const Model models[] = {Model::mhd,           Model::mhd_alpha,
                          Model::lamhd_alpha,   Model::leray_alpha_mhd_3d,
                          Model::ml_alpha_mhd,  Model::leray_alpha_mhd_2d};
  for (Model m : models) {
    ModelSpec spec;
    spec.model = m;
    spec.alpha = (m == Model::mhd) ? 0.0 : 0.35;
    spec.alpha_m = (m == Model::lamhd_alpha) ? 0.25 : 0.0;
    spec.nu = 0.0;
    spec.eta = 0.0;
    GridPtr g = make_cube(model_dim(m), n);
    RhsEvaluator<double> rhs(spec, g);

    std::map<std::string, double> worst;
    for (int tr = 0; tr < trials; ++tr) {
      SolverState<double> s(g);
      s.u = random_solenoidal<double>(g, seed + 17 * static_cast<std::uint64_t>(tr));
      s.b = random_solenoidal<double>(g, seed + 17 * static_cast<std::uint64_t>(tr) + 5);
      SpectralField<double> du = spectral_vector<double>(g);
      SpectralField<double> db = spectral_vector<double>(g);
      rhs.nonlinear(s, du, db);

      auto wu = [&](double k2) { return diag_detail::energy_weight_u(spec, k2); };
      auto wb = [&](double k2) { return diag_detail::energy_weight_b(spec, k2); };
      const double rate_e = spectral_pairing(s.u, du, wu) +
                            spectral_pairing(s.b, db, wb);
      const double scale_e =
          std::sqrt(spectral_pairing(s.u, s.u, wu) *
                    spectral_pairing(du, du, wu)) +
          std::sqrt(spectral_pairing(s.b, s.b, wb) *
                    spectral_pairing(db, db, wb));
      worst["e_alpha"] = std::max(worst["e_alpha"],
                                  cli_detail::rate_of(rate_e, scale_e));

      if (m == Model::mhd || m == Model::mhd_alpha ||
          m == Model::leray_alpha_mhd_3d) {
        // cross helicity pairs the filtered momentum with b
        SpectralField<double> v = helmholtz_applied(s.u, spec.alpha);
        SpectralField<double> dv = helmholtz_applied(du, spec.alpha);
        const double rate = inner(dv, s.b) + inner(v, db);
        const double scale = l2_norm(dv) * l2_norm(s.b) +
                             l2_norm(v) * l2_norm(db);
        worst["h_c"] = std::max(worst["h_c"],
                                cli_detail::rate_of(rate, scale));
      }
      if (m == Model::mhd || m == Model::mhd_alpha ||
          m == Model::ml_alpha_mhd || m == Model::lamhd_alpha) {
        // magnetic helicity built from the evolved magnetic state
        SpectralField<double> a = vector_potential(s.b);
        const double rate = inner(a, db);
        const double scale = l2_norm(a) * l2_norm(db);
        const char* key = (m == Model::lamhd_alpha) ? "h_m_bs" : "h_m_b";
        worst[key] = std::max(worst[key], cli_detail::rate_of(rate, scale));
      }
      if (m == Model::leray_alpha_mhd_2d) {
        SpectralField<double> a = streamfunction(s.b);
        SpectralField<double> da = streamfunction(db);
        const double rate = inner(a, da);
        const double scale = l2_norm(a) * l2_norm(da);
        worst["a_msq"] = std::max(worst["a_msq"],
                                  cli_detail::rate_of(rate, scale));
      }
    }
    for (const auto& [q, r] : worst)
      out.push_back({model_name(m), q, trials, r});
  }
  return out;
}

// ---- subcommand implementations --------------------------------------------

namespace cli_detail {

struct RunOpts {
  std::string config_path, out = "out", resume_from;
  std::string model = "mhd_alpha", scheme = "if_rk4", precision = "f64";
  std::string ic_name;  // empty: tg-mhd in 3d, ot in 2d
  double alpha = 0.0, alpha_m = 0.0, nu = 0.0, eta = 0.0;
  int n = 32;
  double box = 2.0 * kPi;
  double dt = 1e-3, t_end = 1.0, cfl = 0.0;
  double amp_u = 1.0, amp_b = 1.0, noise = 0.0;
  std::int64_t seed = 1, sample_every = 10, checkpoint_every = 0;
};

template <class Real>
int run_typed(const RunOpts& o) {
  namespace fs = std::filesystem;
  ModelSpec spec;
  GridPtr g;
  SolverState<Real> state;
  double dt = o.dt;
  Scheme scheme = scheme_from_name(o.scheme);

  if (!o.resume_from.empty()) {
    CheckpointInfo info;
    state = read_checkpoint<Real>(o.resume_from, info);
    spec = info.spec;
    g = state.u.grid;
    dt = info.dt;
    scheme = scheme_from_name(info.scheme);
    std::printf("resumed %s at t=%s dt=%s\n", o.resume_from.c_str(),
                format_g17(state.t).c_str(), format_g17(dt).c_str());
  } else {
    spec.model = model_from_name(o.model);
    spec.alpha = o.alpha;
    spec.alpha_m = o.alpha_m;
    spec.nu = o.nu;
    spec.eta = o.eta;
    spec.validate();
    g = make_cube(model_dim(spec.model), o.n, o.box);
    IcParams ic;
    ic.name = o.ic_name.empty() ? (g->dim() == 2 ? "ot" : "tg-mhd") : o.ic_name;
    ic.amp_u = o.amp_u;
    ic.amp_b = o.amp_b;
    ic.noise = o.noise;
    ic.seed = static_cast<std::uint64_t>(o.seed);
    state = make_initial_state<Real>(g, ic);
  }

  StepperConfig scfg;
  scfg.scheme = scheme;
  scfg.dt = dt;
  if (o.cfl > 0.0) {
    scfg.adaptive = true;
    scfg.cfl_safety = o.cfl;
  }
  scfg.validate();
  Stepper<Real> stepper(spec, g, scfg);

  fs::create_directories(o.out);
  std::vector<DiagnosticsRecord> recs;
  IntegrateOptions<Real> opts;
  opts.t_end = o.t_end;
  opts.sample_every = o.sample_every;
  opts.checkpoint_every = o.checkpoint_every;
  opts.on_sample = [&](const SolverState<Real>& s) {
    recs.push_back(compute_diagnostics(spec, s));
  };
  opts.on_checkpoint = [&](const SolverState<Real>& s, std::int64_t step) {
    write_checkpoint(o.out + "/ckpt_" + std::to_string(step) + ".ckpt", spec,
                     s, dt, scheme_name(scheme));
  };
  integrate(stepper, state, opts, dt);

  write_series_csv(o.out + "/series.csv", spec, *g, recs,
                   "precision=" + o.precision);
  write_checkpoint(o.out + "/final.ckpt", spec, state, dt,
                   scheme_name(scheme));

  std::printf("run complete: model=%s t=%s samples=%zu out=%s\n",
              model_name(spec.model), format_g17(state.t).c_str(), recs.size(),
              o.out.c_str());
  if (recs.size() >= 2) {
    for (const auto& name : conserved_names(spec.model)) {
      const double q0 = record_field(recs.front(), name);
      const double q1 = record_field(recs.back(), name);
      const double rel = std::fabs(q1 - q0) /
                         std::max(std::fabs(q0), 1e-300);
      std::printf("  %-8s %s -> %s (relative drift %.3e)\n", name.c_str(),
                  format_g17(q0).c_str(), format_g17(q1).c_str(), rel);
    }
  }
  return 0;
}

// File values apply only where the flag was not given on the command line.
inline void apply_config(const CLI::App& cmd, RunOpts& o) {
  if (o.config_path.empty()) return;
  const Config cfg = Config::parse_file(o.config_path);
  KvMap merged = cfg.globals;
  for (const auto& sec : cfg.sections)
    if (sec.name == "run")
      for (const auto& [k, v] : sec.values.kv) merged.kv[k] = v;

  auto unset = [&](const std::string& flag) {
    return cmd.count(flag) == 0;
  };
  if (unset("--model") && merged.has("model")) o.model = merged.str("model");
  if (unset("--alpha") && merged.has("alpha")) o.alpha = merged.num("alpha");
  if (unset("--alpha-m") && merged.has("alpha_m"))
    o.alpha_m = merged.num("alpha_m");
  if (unset("--nu") && merged.has("nu")) o.nu = merged.num("nu");
  if (unset("--eta") && merged.has("eta")) o.eta = merged.num("eta");
  if (unset("--n") && merged.has("n"))
    o.n = static_cast<int>(merged.integer("n"));
  if (unset("--box") && merged.has("box")) o.box = merged.num("box");
  if (unset("--dt") && merged.has("dt")) o.dt = merged.num("dt");
  if (unset("--t-end") && merged.has("t_end")) o.t_end = merged.num("t_end");
  if (unset("--cfl") && merged.has("cfl")) o.cfl = merged.num("cfl");
  if (unset("--scheme") && merged.has("scheme"))
    o.scheme = merged.str("scheme");
  if (unset("--ic") && merged.has("ic")) o.ic_name = merged.str("ic");
  if (unset("--amp-u") && merged.has("amp_u")) o.amp_u = merged.num("amp_u");
  if (unset("--amp-b") && merged.has("amp_b")) o.amp_b = merged.num("amp_b");
  if (unset("--noise") && merged.has("noise")) o.noise = merged.num("noise");
  if (unset("--seed") && merged.has("seed")) o.seed = merged.integer("seed");
  if (unset("--sample-every") && merged.has("sample_every"))
    o.sample_every = merged.integer("sample_every");
  if (unset("--checkpoint-every") && merged.has("checkpoint_every"))
    o.checkpoint_every = merged.integer("checkpoint_every");
  if (unset("--precision") && merged.has("precision"))
    o.precision = merged.str("precision");
}

inline int do_verify(int n, int order, int trials, std::int64_t seed,
                     const std::string& csv_out) {
  const double tol_identity = 1e-12;
  const double tol_rate = 1e-11;
  int failures = 0;
  std::vector<std::string> csv_rows;

  GalerkinSystem sys(3, order, {2.0 * kPi, 2.0 * kPi, 2.0 * kPi}, 10000000);
  const auto dense = identity_suite_dense(sys, trials,
                                          static_cast<std::uint64_t>(seed));
  std::cout << format_identity_report(dense, "dense");
  for (const auto& r : dense) {
    if (!(r.max_residual <= tol_identity)) ++failures;
    csv_rows.push_back("identity_dense," + r.name + ',' +
                       format_g17(r.max_residual));
  }

  GridPtr g = make_cube(3, n);
  const auto spectral = identity_suite_spectral<double>(
      g, trials, static_cast<std::uint64_t>(seed));
  std::cout << format_identity_report(spectral, "transform");
  for (const auto& r : spectral) {
    if (!(r.max_residual <= tol_identity)) ++failures;
    csv_rows.push_back("identity_transform," + r.name + ',' +
                       format_g17(r.max_residual));
  }

  const auto rates = conserved_rate_checks(
      n, trials, static_cast<std::uint64_t>(seed) + 101);
  std::cout << "conserved-rate checks (ideal nonlinear term, " << trials
            << " trials):\n";
  for (const auto& r : rates) {
    const bool ok = r.residual <= tol_rate;
    if (!ok) ++failures;
    std::printf("  %-20s %-8s max residual %.3e  %s\n", r.model.c_str(),
                r.quantity.c_str(), r.residual, ok ? "ok" : "FAIL");
    csv_rows.push_back("conserved_rate," + r.model + ':' + r.quantity + ',' +
                       format_g17(r.residual));
  }

  if (!csv_out.empty()) {
    std::ofstream out(csv_out, std::ios::binary);
    if (!out) throw IoError("cannot open '" + csv_out + "' for writing");
    out << "check,detail,max_residual\n";
    for (const auto& row : csv_rows) out << row << '\n';
  }

  if (failures) {
    std::cout << "verify: " << failures << " check(s) FAILED\n";
    return 3;
  }
  std::cout << "verify: all checks passed\n";
  return 0;
}

inline int do_inspect(const std::string& path) {
  const CheckpointInfo info = peek_checkpoint(path);
  std::printf("model      %s\n", model_name(info.spec.model));
  std::printf("alpha      %s\n", format_g17(info.spec.alpha).c_str());
  std::printf("alpha_m    %s\n", format_g17(info.spec.alpha_m).c_str());
  std::printf("nu         %s\n", format_g17(info.spec.nu).c_str());
  std::printf("eta        %s\n", format_g17(info.spec.eta).c_str());
  std::string nstr, lstr;
  for (std::size_t a = 0; a < info.n.size(); ++a) {
    nstr += (a ? "x" : "") + std::to_string(info.n[a]);
    lstr += (a ? " x " : "") + format_g17(info.length[a]);
  }
  std::printf("n          %s\n", nstr.c_str());
  std::printf("length     %s\n", lstr.c_str());
  std::printf("precision  %s\n", info.precision.c_str());
  std::printf("scheme     %s\n", info.scheme.c_str());
  std::printf("t          %s (bits 0x%016llx)\n", format_g17(info.t).c_str(),
              static_cast<unsigned long long>(info.t_bits));
  std::printf("dt         %s (bits 0x%016llx)\n", format_g17(info.dt).c_str(),
              static_cast<unsigned long long>(info.dt_bits));
  return 0;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"pseudospectral solver for regularized incompressible MHD"};
  app.require_subcommand(1);

  cli_detail::RunOpts ro;
  CLI::App* run = app.add_subcommand(
      "run", "integrate one configuration, write series.csv and checkpoints");
  run->add_option("--config", ro.config_path,
                  "key=value file; flags given here override it");
  run->add_option("--out", ro.out, "output directory");
  run->add_option("--model", ro.model,
                  "mhd | mhd_alpha | lamhd_alpha | leray_alpha_mhd_3d | "
                  "ml_alpha_mhd | leray_alpha_mhd_2d");
  run->add_option("--alpha", ro.alpha, "velocity filter width");
  run->add_option("--alpha-m", ro.alpha_m, "magnetic filter width");
  run->add_option("--nu", ro.nu, "viscosity");
  run->add_option("--eta", ro.eta, "resistivity");
  run->add_option("--n", ro.n, "grid points per axis");
  run->add_option("--box", ro.box, "box length");
  run->add_option("--dt", ro.dt, "time step");
  run->add_option("--t-end", ro.t_end, "end time");
  run->add_option("--cfl", ro.cfl, "adaptive step safety factor; 0 = fixed dt");
  run->add_option("--scheme", ro.scheme, "if_rk4 | imex_cnab2");
  run->add_option("--ic", ro.ic_name, "tg | abc | tg-mhd | ot | random");
  run->add_option("--amp-u", ro.amp_u, "velocity amplitude");
  run->add_option("--amp-b", ro.amp_b, "magnetic amplitude");
  run->add_option("--noise", ro.noise, "solenoidal noise L2 norm added to b");
  run->add_option("--seed", ro.seed, "random seed");
  run->add_option("--sample-every", ro.sample_every, "steps between samples");
  run->add_option("--checkpoint-every", ro.checkpoint_every,
                  "steps between checkpoints; 0 = final only");
  run->add_option("--precision", ro.precision, "f32 | f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  run->add_option("--resume-from", ro.resume_from,
                  "checkpoint to continue from (model comes from its header)");

  std::string st_config, st_out = "out/campaign";
  int st_workers = 1;
  CLI::App* study = app.add_subcommand(
      "study", "run the studies in a config file and write a manifest");
  study->add_option("--config", st_config, "campaign config file")
      ->required();
  study->add_option("--out", st_out, "campaign output directory");
  study->add_option("--workers", st_workers, "parallel runs");

  int vf_n = 16, vf_order = 3, vf_trials = 20;
  std::int64_t vf_seed = 12345;
  std::string vf_out;
  CLI::App* verify = app.add_subcommand(
      "verify", "bilinear identity and conserved-rate self checks");
  verify->add_option("--n", vf_n, "transform-route grid points per axis");
  verify->add_option("--order", vf_order, "dense-route mode cutoff");
  verify->add_option("--trials", vf_trials, "random states per check");
  verify->add_option("--seed", vf_seed, "random seed");
  verify->add_option("--out", vf_out, "also write results as CSV");

  std::string in_path;
  CLI::App* inspect =
      app.add_subcommand("inspect", "print a checkpoint header");
  inspect->add_option("path", in_path, "checkpoint file")->required();

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      cli_detail::apply_config(*run, ro);
      if (ro.precision == "f32") return cli_detail::run_typed<float>(ro);
      return cli_detail::run_typed<double>(ro);
    }
    if (study->parsed()) {
      std::ifstream in(st_config, std::ios::binary);
      if (!in) throw ConfigError("cannot open config '" + st_config + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      const CampaignResult res = run_campaign(ss.str(), st_out, st_workers);
      std::printf("campaign complete: %d studies, %d failed, out=%s\n",
                  res.studies, res.failed_studies, st_out.c_str());
      for (const auto& f : res.failures)
        std::printf("  failed: %s\n", f.c_str());
      return res.failed_studies == 0 ? 0 : 1;
    }
    if (verify->parsed())
      return cli_detail::do_verify(vf_n, vf_order, vf_trials, vf_seed, vf_out);
    if (inspect->parsed()) return cli_detail::do_inspect(in_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const BlowUpError& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace alphamhd
