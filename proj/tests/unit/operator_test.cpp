// Spectral operators: Helmholtz filter, Leray projection, differential
// operators, and dealiasing, pinned against hand-computed mode values.
#include <doctest.h>

#include <cmath>
#include <complex>

#include "alphamhd/fft.hpp"
#include "alphamhd/initial_conditions.hpp"
#include "alphamhd/models.hpp"
#include "alphamhd/operators.hpp"
#include "alphamhd/random_fields.hpp"

using namespace alphamhd;

namespace {

// single signed mode (m0,m1,m2) with a given vector coefficient, mirrored
SpectralField<double> single_mode(GridPtr g, int m0, int m1, int m2,
                                  std::complex<double> c0,
                                  std::complex<double> c1,
                                  std::complex<double> c2) {
  SpectralField<double> f(g, 3, false);
  const std::complex<double> cs[3] = {c0, c1, c2};
  for_each_mode(*g, [&](std::int64_t flat, int i0, int i1, int i2) {
    const int mm0 = g->mode(0, i0), mm1 = g->mode(1, i1), mm2 = g->mode(2, i2);
    for (int c = 0; c < 3; ++c) {
      if (mm0 == m0 && mm1 == m1 && mm2 == m2) f.comp(c)[flat] = cs[c];
      if (mm0 == -m0 && mm1 == -m1 && mm2 == -m2 && (m2 != 0 ? false : true) &&
          !(mm0 == m0 && mm1 == m1 && mm2 == m2))
        f.comp(c)[flat] = std::conj(cs[c]);
    }
  });
  return f;
}

}  // namespace

TEST_CASE("helmholtz symbol at |k| = 1 with alpha = 0.5 is 1.25 exactly") {
  GridPtr g = make_cube(3, 16);
  SpectralField<double> f =
      single_mode(g, 1, 0, 0, {0.0, 0.0}, {1.0, 2.0}, {0.0, 0.0});
  SpectralField<double> h = helmholtz_applied(f, 0.5);
  for_each_mode(*g, [&](std::int64_t flat, int i0, int i1, int i2) {
    const int m0 = g->mode(0, i0), m1 = g->mode(1, i1), m2 = g->mode(2, i2);
    if (m0 == 1 && m1 == 0 && m2 == 0) {
      CHECK(h.comp(1)[flat].real() == 1.25);
      CHECK(h.comp(1)[flat].imag() == 2.5);
    }
  });
}

TEST_CASE("helmholtz with alpha = 0 is the identity, bit for bit") {
  GridPtr g = make_cube(3, 8);
  SpectralField<double> f = random_solenoidal<double>(g, 11);
  SpectralField<double> h = f;
  helmholtz_apply(h, 0.0);
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    CHECK(double_bits(h.data[i].real()) == double_bits(f.data[i].real()));
    CHECK(double_bits(h.data[i].imag()) == double_bits(f.data[i].imag()));
  }
}

TEST_CASE("helmholtz invert then apply recovers the field") {
  GridPtr g = make_cube(3, 8);
  SpectralField<double> f = random_solenoidal<double>(g, 12);
  SpectralField<double> h = f;
  helmholtz_apply(h, 0.3);
  helmholtz_invert(h, 0.3);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.data.size(); ++i)
    worst = std::max(worst, std::abs(h.data[i] - f.data[i]));
  CHECK(worst < 1e-14 * f.max_abs());
}

TEST_CASE("magnetic stiff symbol of the double-filtered model at |k| = 1") {
  ModelSpec spec;
  spec.model = Model::lamhd_alpha;
  spec.eta = 0.1;
  spec.alpha_m = 0.5;
  CHECK(stiff_sigma_b(spec, 1.0) == 0.125);
  spec.model = Model::mhd_alpha;
  CHECK(stiff_sigma_b(spec, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("projection removes the parallel part: hand value at k = (1,1,0)") {
  GridPtr g = make_cube(3, 16);
  SpectralField<double> f =
      single_mode(g, 1, 1, 0, {1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0});
  leray_project(f);
  for_each_mode(*g, [&](std::int64_t flat, int i0, int i1, int i2) {
    const int m0 = g->mode(0, i0), m1 = g->mode(1, i1), m2 = g->mode(2, i2);
    if (m0 == 1 && m1 == 1 && m2 == 0) {
      CHECK(f.comp(0)[flat].real() == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(f.comp(1)[flat].real() == doctest::Approx(-0.5).epsilon(1e-15));
      CHECK(std::abs(f.comp(2)[flat]) == 0.0);
    }
  });
}

TEST_CASE("projection is idempotent and kills gradients") {
  GridPtr g = make_cube(3, 16);
  SpectralField<double> f(g, 3, true);
  Rng rng(5);
  for (auto& z : f.data)
    z = std::complex<double>(rng.symmetric(), rng.symmetric());
  enforce_hermitian(f);
  f.pin_zero_mean();
  SpectralField<double> once = f;
  leray_project(once);
  SpectralField<double> twice = once;
  leray_project(twice);
  double worst = 0.0;
  for (std::size_t i = 0; i < once.data.size(); ++i)
    worst = std::max(worst, std::abs(once.data[i] - twice.data[i]));
  CHECK(worst < 1e-14 * once.max_abs());

  // a pure gradient projects to zero
  SpectralField<double> chi(g, 1, true);
  Rng rng2(6);
  for (auto& z : chi.data)
    z = std::complex<double>(rng2.symmetric(), rng2.symmetric());
  enforce_hermitian(chi);
  chi.pin_zero_mean();
  SpectralField<double> gchi = gradient(chi);
  const double before = l2_norm(gchi);
  leray_project(gchi);
  CHECK(l2_norm(gchi) < 1e-14 * before);
}

TEST_CASE("curl of (0, sin x, 0) is (0, 0, cos x)") {
  GridPtr g = make_cube(3, 16);
  SpectralField<double> u = ic_detail::from_closed_form<double>(
      g, [](PhysicalField<double>& p, std::int64_t i, double x, double,
            double) {
        p.comp(0)[i] = 0.0;
        p.comp(1)[i] = std::sin(x);
        p.comp(2)[i] = 0.0;
      });
  PhysicalField<double> w = to_physical(curl(u));
  double worst = 0.0;
  for_each_point(*g, [&](std::int64_t i, double x, double, double) {
    worst = std::max(worst, std::fabs(w.comp(0)[i]));
    worst = std::max(worst, std::fabs(w.comp(1)[i]));
    worst = std::max(worst, std::fabs(w.comp(2)[i] - std::cos(x)));
  });
  CHECK(worst < 1e-13);
}

TEST_CASE("divergence of a curl vanishes") {
  GridPtr g = make_cube(3, 8);
  SpectralField<double> w(g, 3, true);
  Rng rng(9);
  for (auto& z : w.data)
    z = std::complex<double>(rng.symmetric(), rng.symmetric());
  enforce_hermitian(w);
  w.pin_zero_mean();
  SpectralField<double> c = curl(w);
  CHECK(max_divergence(c) < 1e-13 * (1.0 + c.max_abs()));
}

TEST_CASE("gradient energies scale with the mode wavenumber") {
  GridPtr g = make_cube(3, 16);
  SpectralField<double> f =
      single_mode(g, 1, 1, 1, {0.0, 0.0}, {1.0, -1.0}, {0.5, 0.0});
  CHECK(grad_norm2(f) == doctest::Approx(3.0 * norm2(f)).epsilon(1e-13));
  CHECK(lap_norm2(f) == doctest::Approx(9.0 * norm2(f)).epsilon(1e-13));
}

TEST_CASE("dealias zeroes modes beyond the cutoff and keeps the rest") {
  GridPtr g = make_cube(3, 16);  // cutoff 5
  SpectralField<double> hi =
      single_mode(g, 6, 0, 0, {0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0});
  dealias(hi);
  CHECK(hi.max_abs() == 0.0);
  SpectralField<double> lo =
      single_mode(g, 5, 0, 0, {0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0});
  SpectralField<double> kept = lo;
  dealias(kept);
  for (std::size_t i = 0; i < lo.data.size(); ++i)
    CHECK(kept.data[i] == lo.data[i]);
}

TEST_CASE("2d: perp gradient and scalar curl compose to the laplacian") {
  GridPtr g = make_cube(2, 16);
  // psi = sin x: b = perp_grad psi = (0, cos x), scalar_curl b = -sin x
  PhysicalField<double> p(g, 1);
  for_each_point(*g, [&](std::int64_t i, double x, double, double) {
    p.comp(0)[i] = std::sin(x);
  });
  SpectralField<double> psi = to_spectral(p, true);
  SpectralField<double> b = perp_gradient(psi);
  PhysicalField<double> pb = to_physical(b);
  double worst = 0.0;
  for_each_point(*g, [&](std::int64_t i, double x, double, double) {
    worst = std::max(worst, std::fabs(pb.comp(0)[i]));
    worst = std::max(worst, std::fabs(pb.comp(1)[i] - std::cos(x)));
  });
  CHECK(worst < 1e-13);
  PhysicalField<double> pc = to_physical(scalar_curl(b));
  worst = 0.0;
  for_each_point(*g, [&](std::int64_t i, double x, double, double) {
    worst = std::max(worst, std::fabs(pc.comp(0)[i] + std::sin(x)));
  });
  CHECK(worst < 1e-13);
}
