// Serialization: bit-exact checkpoints, resume equivalence, deterministic
// CSV and manifest output, and the config grammar.
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "alphamhd/checkpoint.hpp"
#include "alphamhd/config.hpp"
#include "alphamhd/diagnostics.hpp"
#include "alphamhd/galerkin.hpp"
#include "alphamhd/initial_conditions.hpp"
#include "alphamhd/manifest.hpp"
#include "alphamhd/random_fields.hpp"
#include "alphamhd/study.hpp"
#include "alphamhd/timestepper.hpp"

using namespace alphamhd;
namespace fs = std::filesystem;

namespace {

std::string tmpdir() {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("alphamhd_io_test_" + std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("checkpoints round trip bit for bit") {
  const std::string dir = tmpdir();
  GridPtr g = make_cube(3, 8);
  SolverState<double> s(g);
  s.u = random_solenoidal<double>(g, 5);
  s.b = random_solenoidal<double>(g, 6);
  s.t = 0.30000000000000004;  // not representable as a round decimal
  ModelSpec spec;
  spec.model = Model::lamhd_alpha;
  spec.alpha = 0.2;
  spec.alpha_m = 0.1;
  spec.nu = 1e-3;
  spec.eta = 2e-3;
  write_checkpoint(dir + "/a.ckpt", spec, s, 0.1 / 3.0, "imex_cnab2");

  CheckpointInfo info;
  SolverState<double> r = read_checkpoint<double>(dir + "/a.ckpt", info);
  CHECK(double_bits(r.t) == double_bits(s.t));
  CHECK(info.spec.model == spec.model);
  CHECK(info.spec.alpha == spec.alpha);
  CHECK(info.spec.alpha_m == spec.alpha_m);
  CHECK(info.spec.nu == spec.nu);
  CHECK(info.spec.eta == spec.eta);
  CHECK(info.scheme == "imex_cnab2");
  CHECK(info.precision == "f64");
  CHECK(double_bits(info.dt) == double_bits(0.1 / 3.0));
  for (std::size_t i = 0; i < s.u.data.size(); ++i) {
    CHECK(double_bits(r.u.data[i].real()) == double_bits(s.u.data[i].real()));
    CHECK(double_bits(r.u.data[i].imag()) == double_bits(s.u.data[i].imag()));
    CHECK(double_bits(r.b.data[i].real()) == double_bits(s.b.data[i].real()));
    CHECK(double_bits(r.b.data[i].imag()) == double_bits(s.b.data[i].imag()));
  }

  const CheckpointInfo peek = peek_checkpoint(dir + "/a.ckpt");
  CHECK(peek.t_bits == double_bits(s.t));
  CHECK(peek.n.size() == 3);
  CHECK(peek.n[0] == 8);
}

TEST_CASE("reading with the wrong precision is rejected") {
  const std::string dir = tmpdir();
  GridPtr g = make_cube(2, 8);
  SolverState<double> s(g);
  ModelSpec spec;
  spec.model = Model::leray_alpha_mhd_2d;
  write_checkpoint(dir + "/p.ckpt", spec, s, 0.1);
  CheckpointInfo info;
  CHECK_THROWS_AS(read_checkpoint<float>(dir + "/p.ckpt", info), IoError);
}

TEST_CASE("resume from a checkpoint equals the uninterrupted run") {
  const std::string dir = tmpdir();
  ModelSpec spec;
  spec.model = Model::mhd_alpha;
  spec.alpha = 0.2;
  spec.nu = 0.01;
  spec.eta = 0.01;
  GridPtr g = make_cube(3, 16);
  IcParams ic;
  ic.name = "tg-mhd";
  const double dt = 1e-2;
  StepperConfig cfg;
  cfg.dt = dt;

  SolverState<double> full = make_initial_state<double>(g, ic);
  Stepper<double> st_full(spec, g, cfg);
  for (int k = 0; k < 20; ++k) st_full.step(full, dt);

  SolverState<double> half = make_initial_state<double>(g, ic);
  Stepper<double> st_a(spec, g, cfg);
  for (int k = 0; k < 10; ++k) st_a.step(half, dt);
  write_checkpoint(dir + "/mid.ckpt", spec, half, dt);

  CheckpointInfo info;
  SolverState<double> resumed = read_checkpoint<double>(dir + "/mid.ckpt", info);
  Stepper<double> st_b(info.spec, resumed.u.grid, cfg);
  for (int k = 0; k < 10; ++k) st_b.step(resumed, dt);

  for (std::size_t i = 0; i < full.u.data.size(); ++i) {
    CHECK(double_bits(full.u.data[i].real()) ==
          double_bits(resumed.u.data[i].real()));
    CHECK(double_bits(full.b.data[i].imag()) ==
          double_bits(resumed.b.data[i].imag()));
  }
  CHECK(double_bits(full.t) == double_bits(resumed.t));
}

TEST_CASE("series csv output is deterministic and carries metadata") {
  const std::string dir = tmpdir();
  ModelSpec spec;
  spec.model = Model::mhd;
  spec.nu = 0.01;
  GridPtr g = make_cube(3, 8);
  SolverState<double> s(g);
  s.u = random_solenoidal<double>(g, 4);
  std::vector<DiagnosticsRecord> recs{compute_diagnostics(spec, s)};
  s.t = 0.5;
  recs.push_back(compute_diagnostics(spec, s));
  write_series_csv(dir + "/s1.csv", spec, *g, recs, "extra=1");
  write_series_csv(dir + "/s2.csv", spec, *g, recs, "extra=1");
  const std::string a = slurp(dir + "/s1.csv");
  CHECK(a == slurp(dir + "/s2.csv"));
  CHECK(a.rfind("# model=mhd", 0) == 0);
  CHECK(a.find("extra=1") != std::string::npos);
  CHECK(a.find("\r") == std::string::npos);
  CHECK(a.find("t,e_alpha") != std::string::npos);
}

TEST_CASE("integrating to the start time emits exactly one sample") {
  ModelSpec spec;
  spec.model = Model::mhd;
  GridPtr g = make_cube(3, 8);
  SolverState<double> s(g);
  s.u = random_solenoidal<double>(g, 4);
  StepperConfig cfg;
  cfg.dt = 0.1;
  Stepper<double> st(spec, g, cfg);
  int samples = 0;
  IntegrateOptions<double> opts;
  opts.t_end = 0.0;
  opts.on_sample = [&](const SolverState<double>&) { ++samples; };
  double dt = cfg.dt;
  integrate(st, s, opts, dt);
  CHECK(samples == 1);
  CHECK(s.t == 0.0);
}

TEST_CASE("config grammar: sections, comments, lists, and errors") {
  const std::string text =
      "# top comment\n"
      "seed = 42\n"
      "workers = 3\n"
      "\n"
      "[first]\n"
      "kind = alpha_convergence\n"
      "alphas = 0.2, 0.1, 0.05\n"
      "flag = yes\n"
      "\n"
      "[second]\n"
      "kind = perturbation\n"
      "delta = 1e-6\n";
  Config cfg = Config::parse_string(text);
  CHECK(cfg.globals.integer("seed") == 42);
  REQUIRE(cfg.sections.size() == 2);
  CHECK(cfg.sections[0].name == "first");
  const auto alphas = cfg.sections[0].values.num_list("alphas");
  REQUIRE(alphas.size() == 3);
  CHECK(alphas[1] == 0.1);
  CHECK(cfg.sections[0].values.flag_or("flag", false));
  CHECK(cfg.sections[1].values.num("delta") == 1e-6);
  CHECK(cfg.sections[1].values.num_or("missing", 7.0) == 7.0);
  CHECK_THROWS_AS(cfg.sections[1].values.str("absent"), ConfigError);

  CHECK_THROWS_AS(Config::parse_string("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("[s]\n[s]\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("novalue\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("x = notanumber\n").globals.num("x"),
                  ConfigError);
}

TEST_CASE("manifest is deterministic, sorted, and excludes itself") {
  const std::string dir = tmpdir();
  {
    std::ofstream(dir + "/b.txt", std::ios::binary) << "bee\n";
    fs::create_directories(dir + "/sub");
    std::ofstream(dir + "/sub/a.txt", std::ios::binary) << "ay\n";
  }
  write_manifest(dir, {"zeta failed", "alpha failed"});
  const std::string one = slurp(dir + "/manifest.txt");
  write_manifest(dir, {"zeta failed", "alpha failed"});
  CHECK(one == slurp(dir + "/manifest.txt"));
  CHECK(one.find("manifest.txt") == std::string::npos);
  CHECK(one.find("b.txt") != std::string::npos);
  CHECK(one.find("sub/a.txt") != std::string::npos);
  CHECK(one.find("FAILED  alpha failed") != std::string::npos);
  // entries sorted by relative path: b.txt precedes sub/a.txt
  CHECK(one.find("b.txt") < one.find("sub/a.txt"));
}

TEST_CASE("identity reports serialize to csv") {
  const std::string dir = tmpdir();
  std::vector<IdentityReport> reps{{"advective_antisymmetry", 4, 1e-16},
                                   {"gradient_identity", 4, 2e-16}};
  write_identity_csv(dir + "/id.csv", reps);
  const std::string text = slurp(dir + "/id.csv");
  CHECK(text.rfind("identity,trials,max_residual", 0) == 0);
  CHECK(text.find("advective_antisymmetry,4,") != std::string::npos);
}

TEST_CASE("study specs validate their inputs") {
  StudySpec st;
  st.kind = "alpha_convergence";
  st.alphas = {0.2, 0.1};
  CHECK_THROWS_AS(st.validate(), ConfigError);  // needs at least 3
  st.alphas = {0.2, 0.1, 0.1};
  CHECK_THROWS_AS(st.validate(), ConfigError);  // strictly decreasing
  st.alphas = {0.4, 0.2, 0.1};
  st.validate();

  StudySpec pe;
  pe.kind = "perturbation";
  pe.deltas = {};
  CHECK_THROWS_AS(pe.validate(), ConfigError);
  pe.deltas = {0.0};
  CHECK_THROWS_AS(pe.validate(), ConfigError);  // zero perturbation
  pe.deltas = {1e-6, 5e-7};
  pe.validate();

  StudySpec bad;
  bad.kind = "unknown";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
