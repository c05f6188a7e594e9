#include <doctest.h>

#include <cmath>
#include <random>

#include "ladderqed/chiral_theory.hpp"
#include "ladderqed/dynamics.hpp"
#include "ladderqed/errors.hpp"

using namespace ladderqed;

namespace {
LadderParams ladder(int N, double kappa = 0.0) {
  LadderParams p;
  p.N = N;
  p.kappa = kappa;
  return p;
}
}  // namespace

TEST_CASE("emitter specs") {
  const auto s = EmitterSpec::small(-2.0, 0.3, {4, Leg::B});
  CHECK(s.size() == 0);
  CHECK(s.center() == 4.0);
  const auto g = EmitterSpec::giant(-2.0, 0.3, {4, Leg::A}, 3);
  REQUIRE(g.points.size() == 2);
  CHECK(g.points[1].x == 7);
  CHECK(g.size() == 3);
  CHECK(g.center() == 5.5);
  CHECK_THROWS_AS(EmitterSpec::giant(-2.0, 0.3, {4, Leg::A}, -1), ParameterError);
  CHECK_NOTHROW(g.validate(8));
  CHECK_THROWS_AS(g.validate(7), IndexError);
  CHECK_THROWS_AS(EmitterSpec{}.validate(8), ParameterError);
}

TEST_CASE("assembly layout") {
  const auto p = ladder(10);
  const auto e = EmitterSpec::giant(-1.5, 0.2, {3, Leg::B}, 0);  // coincident points add
  const System sys = assemble_system(p, {e});
  CHECK(sys.dimension() == 21);
  CHECK(sys.emitter_index(0) == 20);
  CHECK_THROWS_AS(sys.emitter_index(1), IndexError);
  const auto& h = sys.hamiltonian();
  CHECK(h.entry(20, 20) == Complex(-1.5, 0.0));
  CHECK(std::abs(h.entry(20, site_index({3, Leg::B}, 10)) - 0.4) < 1e-15);
  CHECK(std::abs(h.entry(site_index({3, Leg::B}, 10), 20) - 0.4) < 1e-15);
  CHECK(h.hermiticity_defect() == 0.0);
  CHECK_FALSE(sys.lossy());
  CHECK_THROWS_AS(assemble_system(p, {}), AssemblyError);
  CHECK_THROWS_AS(assemble_system(p, {EmitterSpec::small(0, 0.1, {10, Leg::A})}), IndexError);
}

TEST_CASE("state vector round trip") {
  const System sys = assemble_system(ladder(6), {EmitterSpec::small(0.0, 0.1, {2, Leg::A})});
  auto s = SystemState::excited(sys);
  CHECK(s.norm_squared() == 1.0);
  CHECK(s.field_norm_squared() == 0.0);
  s.field[3] = Complex(0.5, 0.5);
  const auto back = SystemState::from_vector(sys, s.to_vector(), 2.0);
  CHECK(back.field[3] == s.field[3]);
  CHECK(back.c_e[0] == 1.0);
  CHECK(back.time == 2.0);
  CHECK_THROWS_AS(SystemState::from_vector(sys, Eigen::VectorXcd::Zero(3), 0.0), Error);
}

TEST_CASE("Taylor propagation matches the dense oracle") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> dq(-4.5, 0.5), gg(0.05, 1.0);
  std::uniform_int_distribution<int> xs(0, 20), ds(0, 6);
  for (int trial = 0; trial < 6; ++trial) {
    auto p = ladder(28, trial % 2 ? 0.05 : 0.0);
    p.boundary = trial % 3 ? Boundary::open : Boundary::periodic;
    const auto e = EmitterSpec::giant(dq(rng), gg(rng), {xs(rng), trial % 2 ? Leg::B : Leg::A}, ds(rng));
    const System sys = assemble_system(p, {e});
    const auto init = SystemState::excited(sys);
    const auto a = propagate(sys, init, 30.0, 0.0, Observer{});
    const auto b = dense_oracle_propagate(sys, init, 30.0);
    CHECK(sup_norm_difference(a, b) < 1e-10);
    CHECK(a.time == doctest::Approx(30.0));
  }
}

TEST_CASE("dense oracle size limit") {
  const System sys = assemble_system(ladder(30), {EmitterSpec::small(0, 0.1, {1, Leg::A})});
  CHECK_THROWS_AS(dense_oracle_propagate(sys, SystemState::excited(sys), 1.0, 20), OracleSizeError);
}

TEST_CASE("norm and energy conservation without loss") {
  const System sys = assemble_system(ladder(120), {EmitterSpec::giant(-2.0, 0.6, {50, Leg::A}, 4)});
  const auto init = SystemState::excited(sys);
  const double e0 = energy_expectation(sys, init);
  CHECK(e0 == doctest::Approx(-2.0));
  double worst_norm = 0.0, worst_energy = 0.0;
  propagate(sys, init, 60.0, 1.0, [&](const SystemState& s) {
    worst_norm = std::max(worst_norm, std::abs(1.0 - s.norm_squared()));
    worst_energy = std::max(worst_energy, std::abs(energy_expectation(sys, s) - e0));
  });
  CHECK(worst_norm < 1e-12);
  CHECK(worst_energy < 1e-11);
}

TEST_CASE("loss drains the norm monotonically") {
  const System sys = assemble_system(ladder(80, 0.05), {EmitterSpec::small(-2.0, 0.5, {40, Leg::A})});
  CHECK(sys.lossy());
  double last = 1.0;
  bool monotone = true;
  propagate(sys, SystemState::excited(sys), 40.0, 2.0, [&](const SystemState& s) {
    monotone &= s.norm_squared() <= last + 1e-14;
    last = s.norm_squared();
  });
  CHECK(monotone);
  CHECK(last < 0.9);
}

TEST_CASE("observer sees start, every stride and the end") {
  const System sys = assemble_system(ladder(8), {EmitterSpec::small(0, 0.1, {1, Leg::A})});
  std::vector<double> times;
  propagate(sys, SystemState::excited(sys), 2.5, 1.0, [&](const SystemState& s) { times.push_back(s.time); });
  REQUIRE(times.size() == 4);
  CHECK(times[0] == 0.0);
  CHECK(times[1] == doctest::Approx(1.0));
  CHECK(times[2] == doctest::Approx(2.0));
  CHECK(times[3] == doctest::Approx(2.5));
  const auto snaps = propagate(sys, SystemState::excited(sys), 2.0, 0.5);
  CHECK(snaps.size() == 5);
}

TEST_CASE("split propagation equals a single run") {
  const System sys = assemble_system(ladder(30), {EmitterSpec::small(-1.0, 0.4, {10, Leg::A})});
  const auto init = SystemState::excited(sys);
  const auto once = propagate(sys, init, 20.0, 0.0, Observer{});
  const auto half = propagate(sys, init, 7.0, 0.0, Observer{});
  const auto twice = propagate(sys, half, 13.0, 0.0, Observer{});
  CHECK(sup_norm_difference(once, twice) < 1e-12);
}

TEST_CASE("directional intensities") {
  FieldSnapshot f;
  f.leg_A = {1.0, 2.0, 3.0, 4.0};
  f.leg_B = {0.5, 0.5, 0.5, 0.5};
  const auto r = directional_intensities(f, 2);
  CHECK(r.phi_A_minus == 3.0);
  CHECK(r.phi_A_plus == 7.0);  // origin cell counts on the right
  CHECK(r.phi_B_plus == 1.0);
  CHECK(r.C_numeric == doctest::Approx(7.0 / 12.0));
  CHECK(f.total() == 12.0);
  CHECK(f.leg_total(Leg::B) == 2.0);
  FieldSnapshot empty;
  empty.leg_A = {0.0};
  empty.leg_B = {0.0};
  CHECK_THROWS_AS(directional_intensities(empty, 0), UndefinedChiralityError);
}

TEST_CASE("exponential fit") {
  std::vector<double> t, v;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(i);
    v.push_back(0.8 * std::exp(-0.03 * i));
  }
  CHECK(fit_exponential_rate(t, v, 5.0, 50.0) == doctest::Approx(0.03).epsilon(1e-12));
  CHECK_THROWS_AS(fit_exponential_rate(t, v, 100.0, 200.0), ParameterError);
}

TEST_CASE("weak-coupling emission decays at twice the Markovian rate") {
  LadderParams p = ladder(400);
  const auto e = EmitterSpec::small(-2.042, 0.4, {200, Leg::A});
  const auto run = emission_run(p, e, 60.0, 0.5, 5.0);
  const double expected = 2.0 * decay_rates(p, 2.1297158030084544, 0.4).total();
  CHECK(run.fitted_rate == doctest::Approx(expected).epsilon(0.05));
  CHECK(run.max_norm_drift < 1e-12);
  CHECK(run.chirality.C_numeric > 0.85);
}

TEST_CASE("reflection experiment preconditions") {
  auto p = ladder(100);
  const auto e = EmitterSpec::small(-2.042, 0.4, {50, Leg::A});
  p.boundary = Boundary::periodic;
  CHECK_THROWS_AS(reflection_experiment(p, e, 10.0, 0.0), ParameterError);
  p.boundary = Boundary::open;
  CHECK_THROWS_AS(reflection_experiment(p, e, 10.0, 0.0, {20.0}), ParameterError);
  const auto r = reflection_experiment(p, e, 30.0, 0.0, {10.0});
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[0].time == 10.0);
  CHECK(r.reached_wall == (30.0 >= r.wall_arrival_time));
}
