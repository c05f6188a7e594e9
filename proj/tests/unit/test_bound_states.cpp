#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ladderqed/band_structure.hpp"
#include "ladderqed/bound_states.hpp"
#include "ladderqed/errors.hpp"

using namespace ladderqed;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr Complex I{0.0, 1.0};

LadderParams fig6_model() {
  LadderParams p;
  p.N = 400;
  return p;
}

EmitterSpec giant(int d_s, double g = 0.1, double dq = -4.2) {
  return EmitterSpec::giant(dq, g, Site{200, Leg::A}, d_s);
}

// Effective-mass pole from an independent bracketing of
// y^2 alpha (Delta_0 + y) = (|G|^2/2)^2.
double pole_oracle(double G2, double alpha, double d0) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * alpha * (d0 + mid) < 0.25 * G2 * G2 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("structure factor of a giant atom") {
  const auto e = giant(3);
  const double k = 1.1;
  CHECK(std::abs(structure_factor(e, k)) == doctest::Approx(2 * 0.1 * std::abs(std::cos(1.5 * k))));
  CHECK(std::abs(structure_factor(giant(0), 0.7)) == doctest::Approx(0.2));
}

TEST_CASE("effective coupling equals |G(k_min)|^2 for single-leg points") {
  const auto p = fig6_model();
  const double k = find_band_minima(p).k_min;
  for (int d : {0, 1, 2, 3, 7}) {
    const auto e = giant(d);
    const double G = 0.2 * std::abs(std::cos(0.5 * d * k));
    CHECK(effective_coupling_squared(p, e) == doctest::Approx(G * G).epsilon(1e-12));
  }
  CHECK(std::sqrt(effective_coupling_squared(p, giant(3))) == doctest::Approx(0.00712045).epsilon(1e-5));
}

TEST_CASE("closed-form self-energy on the imaginary axis") {
  const auto p = fig6_model();
  const auto e = giant(0);
  const auto m = find_band_minima(p);
  const double d0 = m.E_min + 4.2;
  for (double y : {0.0, 0.01, 0.1}) {
    const Complex s = self_energy_closed_form(p, e, I * y);
    CHECK(std::abs(s.real()) < 1e-15);
    CHECK(s.imag() == doctest::Approx(-0.04 / (2 * std::sqrt(m.alpha * (d0 + y)))));
    const Complex ds = self_energy_closed_form_derivative(p, e, I * y);
    const double h = 1e-6;
    const Complex fd = (self_energy_closed_form(p, e, I * y + h) - self_energy_closed_form(p, e, I * y - h)) / (2 * h);
    CHECK(std::abs(ds - fd) < 1e-6 * std::abs(ds));
    CHECK(ds.real() > 0.0);
    CHECK(std::abs(ds.imag()) < 1e-14);
  }
  CHECK_THROWS_AS(self_energy_closed_form(p, giant(0, 0.1, -3.0), 0.0), RegimeError);
}

TEST_CASE("quadrature self-energy") {
  const auto p = fig6_model();
  const auto e = giant(0);
  const Complex s0 = self_energy_quadrature(p, e, I * 0.02);
  CHECK(std::abs(s0.real()) < 1e-12);
  CHECK(s0.imag() < 0.0);
  // resolution independence
  QuadratureOptions fine;
  fine.points = 40001;
  CHECK(std::abs(self_energy_quadrature(p, e, I * 0.02, fine) - s0) < 1e-9);
  // large |s|: Sigma ~ <|G_k|^2> / s with the average over the zone
  const Complex big = 1e4;
  const Complex asym = self_energy_quadrature(p, e, big) * big;
  CHECK(asym.real() == doctest::Approx(0.04 * 0.5).epsilon(1e-3));
  // derivative against finite differences along the real direction
  const double h = 1e-5;
  const Complex s = 0.05 + I * 0.02;
  const Complex fd = (self_energy_quadrature(p, e, s + h) - self_energy_quadrature(p, e, s - h)) / (2 * h);
  CHECK(std::abs(self_energy_quadrature_derivative(p, e, s) - fd) < 1e-6);
}

TEST_CASE("quadrature refuses the branch cut") {
  const auto p = fig6_model();
  const auto e = giant(0, 0.1, -2.0);
  CHECK_THROWS_AS(self_energy_quadrature(p, e, 0.0), ContractError);
  CHECK_NOTHROW(self_energy_quadrature(p, e, 0.1));
}

TEST_CASE("bound-state pole and steady population") {
  const auto p = fig6_model();
  const auto m = find_band_minima(p);
  const double d0 = m.E_min + 4.2;
  for (int d : {0, 2, 3, 5}) {
    const auto e = giant(d);
    const double G2 = effective_coupling_squared(p, e);
    const auto pole = bound_state_pole(p, e);
    CHECK(pole.y == doctest::Approx(pole_oracle(G2, m.alpha, d0)).epsilon(1e-10));
    CHECK(pole.y * std::sqrt(m.alpha * (d0 + pole.y)) == doctest::Approx(G2 / 2).epsilon(1e-10));
    const auto r = steady_population(p, e);
    CHECK(r.residue > 0.0);
    CHECK(r.residue <= 1.0);
    CHECK(r.steady_population == doctest::Approx(r.residue * r.residue));
    CHECK(r.delta_0 == doctest::Approx(d0));
  }
  const auto r0 = steady_population(p, giant(0));
  CHECK(r0.pole_y == doctest::Approx(0.0497702).epsilon(1e-6));
  CHECK(r0.steady_population == doctest::Approx(0.6029).epsilon(1e-4));
  CHECK(steady_population(p, giant(3)).steady_population > 0.99);
  CHECK_THROWS_AS(bound_state_pole(p, giant(0, 0.1, -4.0)), RegimeError);
  const auto off = bound_state_pole(p, giant(0, 0.0));
  CHECK(off.decoupled);
  CHECK(off.y == 0.0);
}

TEST_CASE("quadrature pole and lattice eigenvector agree") {
  const auto p = fig6_model();
  const auto e = giant(0);
  BoundStateOptions opts;
  opts.compute_quadrature = true;
  opts.compute_profile = true;
  const auto r = steady_population(p, e, opts);
  REQUIRE(r.profile);
  CHECK(r.profile->energy < find_band_minima(p).E_min);
  CHECK(r.profile->energy == doctest::Approx(-4.2 - r.pole_y_quadrature).epsilon(1e-3));
  // the lattice also couples through the upper band, so only loose agreement
  CHECK(r.profile->emitter_weight * r.profile->emitter_weight ==
        doctest::Approx(r.steady_population_quadrature).epsilon(0.05));
  const double field = r.profile->field.total();
  CHECK(field + r.profile->emitter_weight == doctest::Approx(1.0).epsilon(1e-10));
  // profile is exponentially localized around the emitter
  CHECK(r.profile->field.leg_A[200] > 1e3 * r.profile->field.leg_A[100]);
}

TEST_CASE("size sweep") {
  const auto p = fig6_model();
  const auto s = size_sweep(p, giant(1), 12);
  REQUIRE(s.points.size() == 13);
  CHECK(s.period == doctest::Approx(2 * kPi / find_band_minima(p).k_min));
  REQUIRE(s.local_maxima.size() >= 2);
  CHECK(s.local_maxima[0] == 3);
  CHECK(s.local_maxima[1] == 9);
  CHECK(s.local_minima.front() == 0);
  CHECK(s.contrast > 0.55);
  CHECK(s.contrast < 0.65);
  CHECK_THROWS_AS(size_sweep(p, EmitterSpec::small(-4.2, 0.1, {200, Leg::A}), 4), ParameterError);
}

TEST_CASE("dynamical plateau of a small emitter") {
  LadderParams p;
  p.N = 200;
  const auto e = EmitterSpec::giant(-4.2, 0.1, {100, Leg::A}, 0);
  const double plateau = trapped_population_dynamics(p, e, 400.0, 500.0, 1.0);
  CHECK(plateau == doctest::Approx(0.60).epsilon(0.05));
  CHECK_THROWS_AS(trapped_population_dynamics(p, e, 10.0, 5.0), ParameterError);
}
