// Bilinear terms: golden closed-form cases, the fused evaluation against the
// literal reference, the dense convolution against hand values, and a quick
// pass of the identity suites on both routes.
#include <doctest.h>

#include <cmath>
#include <complex>

#include "alphamhd/fft.hpp"
#include "alphamhd/galerkin.hpp"
#include "alphamhd/initial_conditions.hpp"
#include "alphamhd/models.hpp"
#include "alphamhd/operators.hpp"
#include "alphamhd/random_fields.hpp"

using namespace alphamhd;

namespace {

SpectralField<double> field_3d(GridPtr g,
                               double (*fx)(double, double, double),
                               double (*fy)(double, double, double),
                               double (*fz)(double, double, double)) {
  return ic_detail::from_closed_form<double>(
      g, [&](PhysicalField<double>& p, std::int64_t i, double x, double y,
             double z) {
        p.comp(0)[i] = fx(x, y, z);
        p.comp(1)[i] = fy(x, y, z);
        p.comp(2)[i] = fz(x, y, z);
      });
}

double zero3(double, double, double) { return 0.0; }
double sinx(double x, double, double) { return std::sin(x); }
double siny(double, double y, double) { return std::sin(y); }

}  // namespace

TEST_CASE("golden advection: (u.grad)v for u = (0,sin x,0), v = (0,0,sin y)") {
  GridPtr g = make_cube(3, 16);
  SpectralField<double> u = field_3d(g, zero3, sinx, zero3);
  SpectralField<double> v = field_3d(g, zero3, zero3, siny);
  SpectralField<double> w = advective_bilinear(u, v);

  // sin x cos y is already solenoidal in z, so projection changes nothing
  PhysicalField<double> pw = to_physical(w);
  double worst = 0.0;
  for_each_point(*g, [&](std::int64_t i, double x, double y, double) {
    worst = std::max(worst, std::fabs(pw.comp(0)[i]));
    worst = std::max(worst, std::fabs(pw.comp(1)[i]));
    worst = std::max(worst,
                     std::fabs(pw.comp(2)[i] - std::sin(x) * std::cos(y)));
  });
  CHECK(worst < 1e-13);

  // continuum coefficient of e^{i(x+y)} in sin x cos y is -i/4
  const double ntot = static_cast<double>(g->physical_count());
  for_each_mode(*g, [&](std::int64_t flat, int i0, int i1, int i2) {
    if (g->mode(0, i0) == 1 && g->mode(1, i1) == 1 && g->mode(2, i2) == 0) {
      const std::complex<double> c = w.comp(2)[flat] / ntot;
      CHECK(std::abs(c - std::complex<double>(0.0, -0.25)) < 1e-14);
    }
  });
}

TEST_CASE("rotational form agrees with the advective form weakly") {
  GridPtr g = make_cube(3, 16);
  SpectralField<double> u = random_solenoidal<double>(g, 21);
  SpectralField<double> v = random_solenoidal<double>(g, 22);
  SpectralField<double> w = random_solenoidal<double>(g, 23);
  SpectralField<double> bt = rotational_bilinear(u, v);
  SpectralField<double> b_uv = advective_bilinear(u, v);
  SpectralField<double> b_wv = advective_bilinear(w, v);
  const double lhs = inner(bt, w);
  const double rhs = inner(b_uv, w) - inner(b_wv, u);
  const double scale = l2_norm(u) * l2_norm(v) * l2_norm(w);
  CHECK(std::fabs(lhs - rhs) < 1e-12 * scale);
  // and it never feeds the advected field's carrier
  CHECK(std::fabs(inner(bt, u)) < 1e-12 * l2_norm(u) * l2_norm(u) * l2_norm(v));
}

TEST_CASE("self-advection is orthogonal to the field") {
  GridPtr g = make_cube(3, 16);
  SpectralField<double> u = random_solenoidal<double>(g, 31, 1.7);
  SpectralField<double> buu = advective_bilinear(u, u);
  CHECK(std::fabs(inner(buu, u)) < 1e-12 * std::pow(l2_norm(u), 3));
}

TEST_CASE("fused evaluation matches the literal reference for every model") {
  const Model models[] = {Model::mhd,           Model::mhd_alpha,
                          Model::lamhd_alpha,   Model::leray_alpha_mhd_3d,
                          Model::ml_alpha_mhd,  Model::leray_alpha_mhd_2d};
  for (Model m : models) {
    CAPTURE(model_name(m));
    ModelSpec spec;
    spec.model = m;
    spec.alpha = (m == Model::mhd) ? 0.0 : 0.3;
    spec.alpha_m = (m == Model::lamhd_alpha) ? 0.2 : 0.0;
    GridPtr g = make_cube(model_dim(m), 16);
    SolverState<double> s(g);
    s.u = random_solenoidal<double>(g, 61);
    s.b = random_solenoidal<double>(g, 62);
    RhsEvaluator<double> rhs(spec, g);
    SpectralField<double> du = spectral_vector<double>(g);
    SpectralField<double> db = spectral_vector<double>(g);
    rhs.nonlinear(s, du, db);
    SpectralField<double> du_ref = spectral_vector<double>(g);
    SpectralField<double> db_ref = spectral_vector<double>(g);
    RhsEvaluator<double>::nonlinear_reference(spec, s, du_ref, db_ref);
    double wu = 0.0, wb = 0.0;
    for (std::size_t i = 0; i < du.data.size(); ++i)
      wu = std::max(wu, std::abs(du.data[i] - du_ref.data[i]));
    for (std::size_t i = 0; i < db.data.size(); ++i)
      wb = std::max(wb, std::abs(db.data[i] - db_ref.data[i]));
    CHECK(wu < 1e-12 * (1.0 + du_ref.max_abs()));
    CHECK(wb < 1e-12 * (1.0 + db_ref.max_abs()));
  }
}

TEST_CASE("dense convolution: hand-built two-mode advection") {
  GalerkinSystem sys(3, 1);
  DenseField a = sys.make_field(3);
  DenseField c = sys.make_field(3);
  const std::int32_t ip = sys.lookup({1, 0, 0});
  const std::int32_t ipm = sys.lookup({-1, 0, 0});
  const std::int32_t iq = sys.lookup({0, 1, 0});
  const std::int32_t iqm = sys.lookup({0, -1, 0});
  REQUIRE(ip >= 0);
  REQUIRE(iq >= 0);
  a.comp(1)[ip] = {1.0, 0.0};   // a = (0,1,0) e^{ix} + c.c.
  a.comp(1)[ipm] = {1.0, 0.0};
  c.comp(2)[iq] = {1.0, 0.0};   // c = (0,0,1) e^{iy} + c.c.
  c.comp(2)[iqm] = {1.0, 0.0};

  DenseField out = sys.make_field(3);
  out.set_zero();
  sys.advective(a, c, out, false);  // i (a_p . q) c_q at p + q, unprojected
  auto expect = [&](int m0, int m1, int m2, std::complex<double> val) {
    const std::int32_t i = sys.lookup({m0, m1, m2});
    REQUIRE(i >= 0);
    CHECK(std::abs(out.comp(2)[i] - val) < 1e-15);
    CHECK(std::abs(out.comp(0)[i]) == 0.0);
    CHECK(std::abs(out.comp(1)[i]) == 0.0);
  };
  expect(1, 1, 0, {0.0, 1.0});
  expect(-1, 1, 0, {0.0, 1.0});
  expect(1, -1, 0, {0.0, -1.0});
  expect(-1, -1, 0, {0.0, -1.0});
  // nothing lands anywhere else
  double total = 0.0;
  for (std::int64_t i = 0; i < sys.nmodes(); ++i)
    for (int cc = 0; cc < 3; ++cc) total += std::abs(out.comp(cc)[i]);
  CHECK(total == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("dense oracle equals the transform evaluation on one state") {
  ModelSpec spec;
  spec.model = Model::mhd_alpha;
  spec.alpha = 0.25;
  GridPtr g = make_cube(3, 8);
  GalerkinSystem sys(3, g->dealias_cutoff(0));
  SolverState<double> s(g);
  s.u = random_solenoidal<double>(g, 71);
  s.b = random_solenoidal<double>(g, 72);
  RhsEvaluator<double> rhs(spec, g);
  SpectralField<double> du = spectral_vector<double>(g);
  SpectralField<double> db = spectral_vector<double>(g);
  rhs.nonlinear(s, du, db);

  DenseField ud = dense_from_spectral(sys, s.u);
  DenseField bd = dense_from_spectral(sys, s.b);
  DenseField dud = sys.make_field(3), dbd = sys.make_field(3);
  sys.oracle_nonlinear(spec, ud, bd, dud, dbd);
  SpectralField<double> du_o = spectral_vector<double>(g);
  SpectralField<double> db_o = spectral_vector<double>(g);
  dense_to_spectral(sys, dud, du_o);
  dense_to_spectral(sys, dbd, db_o);
  double wu = 0.0, wb = 0.0;
  for (std::size_t i = 0; i < du.data.size(); ++i)
    wu = std::max(wu, std::abs(du.data[i] - du_o.data[i]));
  for (std::size_t i = 0; i < db.data.size(); ++i)
    wb = std::max(wb, std::abs(db.data[i] - db_o.data[i]));
  CHECK(wu < 1e-12 * (1.0 + du.max_abs()));
  CHECK(wb < 1e-12 * (1.0 + db.max_abs()));
}

TEST_CASE("identity suites stay at roundoff on both routes") {
  GalerkinSystem sys(3, 2);
  for (const auto& rep : identity_suite_dense(sys, 3, 1234)) {
    CAPTURE(rep.name);
    CHECK(rep.max_residual < 1e-12);
  }
  GridPtr g = make_cube(3, 16);
  for (const auto& rep : identity_suite_spectral<double>(g, 3, 1234)) {
    CAPTURE(rep.name);
    CHECK(rep.max_residual < 1e-12);
  }
}
