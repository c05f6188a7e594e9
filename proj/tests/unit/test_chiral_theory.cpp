#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ladderqed/band_structure.hpp"
#include "ladderqed/chiral_theory.hpp"
#include "ladderqed/errors.hpp"

using namespace ladderqed;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kKr = 2.1297158030084544;

// hand evaluation of the angular factors at k_r
struct Hand {
  double a_plus, a_minus, b;
};
Hand hand(const LadderParams& p, double k) {
  const double eta = p.eta();
  const double f = std::sin(p.phi) * std::sin(k);
  const double c = f / std::hypot(f, eta), s = eta / std::hypot(f, eta);
  return {std::pow((c + 1) / 2, 2), std::pow((1 - c) / 2, 2), std::pow(s / 2, 2)};
}
}  // namespace

TEST_CASE("rates at the fig. 2 operating point") {
  const LadderParams p;
  const auto r = decay_rates(p, kKr, 0.4);
  const auto w = angular_weights(p, kKr);
  const auto h = hand(p, kKr);
  CHECK(w.gamma_A_plus == doctest::Approx(h.a_plus).epsilon(1e-12));
  CHECK(w.gamma_A_minus == doctest::Approx(h.a_minus).epsilon(1e-12));
  CHECK(w.gamma_B_plus == doctest::Approx(h.b).epsilon(1e-12));
  CHECK(w.gamma_A_plus == doctest::Approx(0.9474).epsilon(1e-4));
  CHECK(w.gamma_A_minus == doctest::Approx(7.1e-4).epsilon(1e-2));
  CHECK(w.gamma_B_plus == doctest::Approx(0.0259).epsilon(1e-2));
  CHECK(r.v_g == doctest::Approx(3.435).epsilon(1e-3));
  CHECK(r.total() == doctest::Approx(0.0233).epsilon(1e-3));
  CHECK(r.total() == doctest::Approx(0.0232928154112062).epsilon(1e-12));
  CHECK(r.gamma_B_plus == doctest::Approx(r.gamma_B_minus).epsilon(1e-12));
}

TEST_CASE("rates scale with g squared") {
  const LadderParams p;
  const auto a = decay_rates(p, kKr, 0.2);
  const auto b = decay_rates(p, kKr, 0.4);
  CHECK(b.gamma_A_plus == doctest::Approx(4 * a.gamma_A_plus));
  CHECK(b.gamma_B_minus == doctest::Approx(4 * a.gamma_B_minus));
  CHECK(decay_rates(p, kKr, 0.0).total() == 0.0);
}

TEST_CASE("symmetric point has no chirality") {
  LadderParams q;
  q.phi = kPi;  // sin(phi) = 0, so f = 0 and theta = pi/2 everywhere
  const auto w = angular_weights(q, 1.0);
  CHECK(w.gamma_A_plus == doctest::Approx(w.gamma_A_minus));
  CHECK(w.gamma_A_plus == doctest::Approx(w.gamma_B_plus));
  CHECK(chiral_factor_from_rates(w) == doctest::Approx(0.25));
}

TEST_CASE("band edge error at vanishing group velocity") {
  const LadderParams p;
  CHECK_THROWS_AS(decay_rates(p, find_band_minima(p).k_min, 0.4), BandEdgeError);
}

TEST_CASE("chiral factor from rates") {
  DecayRates r;
  r.gamma_A_plus = 1.0;
  CHECK(chiral_factor_from_rates(r) == 1.0);
  r.gamma_A_minus = r.gamma_B_plus = r.gamma_B_minus = 1.0;
  CHECK(chiral_factor_from_rates(r) == 0.25);
  CHECK_THROWS_AS(chiral_factor_from_rates(DecayRates{}), UndefinedChiralityError);
  const LadderParams p;
  CHECK(chiral_factor_from_rates(angular_weights(p, 2.1298)) == doctest::Approx(0.947).epsilon(1e-3));
}

TEST_CASE("closed-form chiral factor") {
  const LadderParams p;
  const double c = chiral_factor_closed_form(p, 2.1298);
  CHECK(c == doctest::Approx(0.9452).epsilon(1e-4));
  const double f = std::sin(p.phi) * std::sin(2.1298);
  CHECK(c == doctest::Approx(1.0 / (1.0 + p.eta() * p.eta() / (2 * f * f))));
  CHECK(std::abs(c - chiral_factor_from_rates(angular_weights(p, 2.1298))) < 0.01);
  LadderParams neg = p;
  neg.phi = -p.phi;
  CHECK(chiral_factor_closed_form(neg, 2.1298) == 0.0);
  LadderParams thin = p;
  thin.t_prime = 1e-6;
  CHECK(chiral_factor_closed_form(thin, 2.1298) == doctest::Approx(1.0));
}

TEST_CASE("Markov validity") {
  const LadderParams p;
  const auto weak = decay_rates(p, kKr, 0.4);
  CHECK(markov_validity(p, weak, -2.042) < kMarkovThreshold);
  const auto strong = decay_rates(p, kKr, 3.0);
  CHECK(markov_validity(p, strong, -2.042) > 1.0);
  CHECK(markov_validity(p, decay_rates(p, kKr, 0.0), -2.042) == 0.0);
}

TEST_CASE("rate invariants over random momenta and lattices") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> k_dist(0.05, kPi - 0.05), phi_dist(0.1, kPi - 0.1), t_dist(0.3, 2.5);
  for (int trial = 0; trial < 300; ++trial) {
    LadderParams p;
    p.t = t_dist(rng);
    p.t_prime = t_dist(rng);
    p.phi = phi_dist(rng);
    const double k = k_dist(rng);
    if (std::abs(group_velocity(p, k)) < 1e-6) continue;
    const auto r = decay_rates(p, k, 0.3);
    CHECK(r.gamma_A_plus >= 0.0);
    CHECK(r.gamma_A_minus >= 0.0);
    CHECK(r.gamma_B_plus == doctest::Approx(r.gamma_B_minus).epsilon(1e-12));
    CHECK(r.v_g > 0.0);
    // the right-moving partner is the one with positive velocity
    const double k_right = group_velocity(p, k) > 0 ? k : -k;
    CHECK(group_velocity(p, k_right) > 0.0);
    if (k_right > 0.0) CHECK(r.gamma_A_plus >= r.gamma_A_minus);
    DecayRates scaled = r;
    scaled.gamma_A_plus *= 3;
    scaled.gamma_A_minus *= 3;
    scaled.gamma_B_plus *= 3;
    scaled.gamma_B_minus *= 3;
    CHECK(chiral_factor_from_rates(scaled) == doctest::Approx(chiral_factor_from_rates(r)));
  }
}

TEST_CASE("rate sweep skips band edges") {
  const LadderParams p;
  const auto rows = decay_rate_sweep(p, 0.0, kPi, 201);
  CHECK(rows.size() < 201);
  for (const auto& row : rows) {
    CHECK(std::abs(row.v_g) > 1e-9);
    CHECK(row.chiral_factor >= 0.0);
    CHECK(row.chiral_factor <= 1.0);
  }
  CHECK_THROWS_AS(decay_rate_sweep(p, 0.0, 1.0, 1), ParameterError);
}
