#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/tools/minima.hpp>

#include "ladderqed/band_structure.hpp"
#include "ladderqed/errors.hpp"

using namespace ladderqed;

namespace {
constexpr double kPi = std::numbers::pi;

// Independent value of the lower-band minimum: closed-form
// sin^2 k_min = sin^2 phi - eta^2 cot^2 phi evaluated separately in numpy.
constexpr double kKMin = 1.0234576938533464;
constexpr double kEMin = -4.163331998932265;
constexpr double kAlpha = 1.8681618;
}  // namespace

TEST_CASE("band minima at the operating point") {
  const LadderParams p;
  const auto m = find_band_minima(p);
  CHECK(m.two_minima);
  CHECK(m.k_min == doctest::Approx(kKMin).epsilon(1e-10));
  CHECK(m.E_min == doctest::Approx(kEMin).epsilon(1e-12));
  CHECK(m.alpha == doctest::Approx(kAlpha).epsilon(1e-7));
  CHECK(std::abs(group_velocity(p, m.k_min)) < 1e-9);
  CHECK(lower_band(p, -m.k_min) == doctest::Approx(m.E_min).epsilon(1e-14));

  // brute-force minimizer on (0, pi)
  auto [k, e] = boost::math::tools::brent_find_minima([&](double q) { return lower_band(p, q); }, 0.5, 1.5, 52);
  CHECK(k == doctest::Approx(m.k_min).epsilon(1e-7));
  CHECK(e == doctest::Approx(m.E_min).epsilon(1e-13));
}

TEST_CASE("closed-form minimum position") {
  const LadderParams p;
  const double s = std::sin(p.phi), cot = std::cos(p.phi) / s, eta = p.eta();
  const double k = std::asin(std::sqrt(s * s - eta * eta * cot * cot));
  CHECK(find_band_minima(p).k_min == doctest::Approx(k).epsilon(1e-12));
}

TEST_CASE("single minimum when the rung coupling dominates") {
  LadderParams p;
  p.t_prime = 6.0;
  const auto m = find_band_minima(p);
  CHECK_FALSE(m.two_minima);
  CHECK(m.k_min == 0.0);
  CHECK(m.E_min == doctest::Approx(-8.0));
  CHECK(m.alpha > 0.0);
}

TEST_CASE("group velocity and curvature match finite differences (random k and parameters)") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> k_dist(-3.0, 3.0), t_dist(0.5, 3.0), phi_dist(0.2, 1.4);
  for (int trial = 0; trial < 200; ++trial) {
    LadderParams p;
    p.t = t_dist(rng);
    p.t_prime = t_dist(rng);
    p.phi = phi_dist(rng);
    const double k = k_dist(rng);
    const double h = 1e-5;
    const double fd1 = (lower_band(p, k + h) - lower_band(p, k - h)) / (2 * h);
    const double fd2 = (lower_band(p, k + h) - 2 * lower_band(p, k) + lower_band(p, k - h)) / (h * h);
    CHECK(group_velocity(p, k) == doctest::Approx(fd1).epsilon(1e-6).scale(1.0));
    CHECK(lower_band_curvature(p, k) == doctest::Approx(fd2).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("eigenmode angle and spin texture") {
  const LadderParams p;
  CHECK(eigenmode_angle(p, 0.0) == doctest::Approx(kPi / 2));
  CHECK(spin_expectation(p, 0.0) == doctest::Approx(0.0).scale(1.0));
  const double k = 2.0;
  const double f = std::sin(p.phi) * std::sin(k);
  CHECK(spin_expectation(p, k) == doctest::Approx(f / std::sqrt(f * f + p.eta() * p.eta())));
  CHECK(spin_expectation(p, k, Band::upper) == doctest::Approx(-spin_expectation(p, k)));
  CHECK(spin_expectation(p, -k) == doctest::Approx(-spin_expectation(p, k)));
  LadderParams flat = p;
  flat.t_prime = 0.0;
  CHECK_THROWS_AS(eigenmode_angle(flat, 0.0), DegenerateAngleError);
  CHECK(eigenmode_angle(flat, 1.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("resonances in the chiral window") {
  const LadderParams p;
  const auto ks = resonant_momenta(p, -2.042);
  REQUIRE(ks.size() == 1);
  CHECK(ks[0] == doctest::Approx(2.1297158030084544).epsilon(1e-10));
  CHECK(lower_band(p, ks[0]) == doctest::Approx(-2.042).epsilon(1e-12));
  CHECK(group_velocity(p, ks[0]) == doctest::Approx(3.4345354388).epsilon(1e-9));

  // Between E_min and E(0) there are two resonances on the positive axis.
  const auto two = resonant_momenta(p, -3.5);
  REQUIRE(two.size() == 2);
  CHECK(two[0] < kKMin);
  CHECK(two[1] > kKMin);
  CHECK(resonant_momenta(p, -5.0).empty());
}

TEST_CASE("band edge detunings") {
  const LadderParams p;
  const auto d = band_edge_detunings(p, -2.042);
  CHECK(d.to_lower_edge == doctest::Approx(-2.042 + 3.0));
  CHECK(d.to_upper_edge == doctest::Approx(1.0 + 2.042));
  CHECK_THROWS_AS(band_edge_detunings(p, -4.2), RegimeError);
  CHECK_THROWS_AS(band_edge_detunings(p, 1.5), RegimeError);
  const auto e = lower_band_critical_energies(p);
  REQUIRE(e.size() == 3);
  CHECK(e.front() == doctest::Approx(kEMin));
  CHECK(e.back() == doctest::Approx(1.0));
}

TEST_CASE("band summary grid") {
  const LadderParams p;
  const auto s = summarize_bands(p, 101, -2.042);
  REQUIRE(s.k_grid.size() == 101);
  CHECK(s.k_grid.front() == doctest::Approx(-kPi));
  CHECK(s.k_grid.back() == doctest::Approx(kPi));
  for (std::size_t i = 0; i < s.k_grid.size(); ++i) {
    CHECK(s.E_minus[i] <= s.E_plus[i]);
    CHECK(s.E_minus[i] >= s.minima.E_min - 1e-12);
    CHECK(std::cos(s.theta[i]) == doctest::Approx(s.sigma_z_minus[i]));
  }
  CHECK(s.resonances.size() == 1);
  CHECK_THROWS_AS(summarize_bands(p, 1), ParameterError);
}

TEST_CASE("mirror symmetry phi -> -phi with k -> -k") {
  LadderParams p, q;
  q.phi = -p.phi;
  for (double k : {0.3, 1.1, 2.5}) {
    CHECK(lower_band(p, k) == doctest::Approx(lower_band(q, -k)));
    CHECK(spin_expectation(p, k) == doctest::Approx(spin_expectation(q, -k)));
  }
}
