#include "ladderqed/band_structure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "ladderqed/errors.hpp"

namespace ladderqed {

namespace {

constexpr double kPi = std::numbers::pi;

double f_of(const LadderParams& p, double k) { return std::sin(p.phi) * std::sin(k); }
double g_of(const LadderParams& p, double k) { return std::cos(p.phi) * std::cos(k); }

double gap_root(const LadderParams& p, double k) {
  const double f = f_of(p, k);
  const double eta = p.eta();
  return std::sqrt(f * f + eta * eta);
}

/// Bisection on [lo, hi] to an absolute width of 1e-13. `fn(lo)` and `fn(hi)`
/// must bracket a root.
template <class F>
double bisect_root(F fn, double lo, double hi) {
  const double flo = fn(lo);
  const double fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-13; };
  std::uintmax_t max_iter = 200;
  auto [a, b] = boost::math::tools::bisect(fn, lo, hi, tol, max_iter);
  return 0.5 * (a + b);
}

}  // namespace

BandPair dispersion(const LadderParams& params, double k) {
  const double g = g_of(params, k);
  const double r = gap_root(params, k);
  return {-2.0 * params.t * (g + r), -2.0 * params.t * (g - r)};
}

double lower_band(const LadderParams& params, double k) { return dispersion(params, k).lower; }

double eigenmode_angle(const LadderParams& params, double k) {
  const double f = f_of(params, k);
  const double eta = params.eta();
  if (eta == 0.0 && f == 0.0)
    throw DegenerateAngleError("theta_k undefined: eta = 0 and f(k) = 0");
  return std::atan2(eta, f);
}

double spin_expectation(const LadderParams& params, double k, Band band) {
  const double c = std::cos(eigenmode_angle(params, k));
  return band == Band::lower ? c : -c;
}

double group_velocity(const LadderParams& params, double k) {
  const double s2 = std::sin(params.phi) * std::sin(params.phi);
  const double r = gap_root(params, k);
  if (r == 0.0) return 2.0 * params.t * std::cos(params.phi) * std::sin(k);
  return -2.0 * params.t * std::sin(k) * (-std::cos(params.phi) + s2 * std::cos(k) / r);
}

double lower_band_curvature(const LadderParams& params, double k) {
  const double s2 = std::sin(params.phi) * std::sin(params.phi);
  const double r = gap_root(params, k);
  const double sk = std::sin(k);
  const double ck = std::cos(k);
  const double r2 = s2 * std::cos(2.0 * k) / r - s2 * s2 * sk * sk * ck * ck / (r * r * r);
  return 2.0 * params.t * std::cos(params.phi) * ck - 2.0 * params.t * r2;
}

BandMinima find_band_minima(const LadderParams& params) {
  params.validate();
  const double s = std::sin(params.phi);
  const double c = std::cos(params.phi);
  const double eta = params.eta();

  BandMinima out;
  // sin^2(k_min) = sin^2(phi) - eta^2 cot^2(phi); needs a positive root in (0, 1).
  double arg = -1.0;
  if (s != 0.0) {
    const double cot = c / s;
    arg = s * s - eta * eta * cot * cot;
  }
  if (arg > 0.0 && arg < 1.0) {
    const double seed_lo = std::asin(std::sqrt(arg));
    const double seed = lower_band(params, seed_lo) <= lower_band(params, kPi - seed_lo)
                            ? seed_lo
                            : kPi - seed_lo;
    auto slope = [&](double k) { return group_velocity(params, k); };
    double lo = std::max(1e-9, seed - 1e-3);
    double hi = std::min(kPi - 1e-9, seed + 1e-3);
    while (slope(lo) * slope(hi) > 0.0 && (lo > 1e-9 || hi < kPi - 1e-9)) {
      lo = std::max(1e-9, lo - 0.05);
      hi = std::min(kPi - 1e-9, hi + 0.05);
    }
    out.k_min = slope(lo) * slope(hi) <= 0.0 ? bisect_root(slope, lo, hi) : seed;
    out.two_minima = true;
  } else if (arg >= 1.0) {
    out.k_min = kPi / 2.0;
    out.two_minima = true;
  } else {
    out.k_min = lower_band(params, 0.0) <= lower_band(params, kPi) ? 0.0 : kPi;
    out.two_minima = false;
  }
  out.E_min = lower_band(params, out.k_min);
  out.alpha = 0.5 * lower_band_curvature(params, out.k_min);
  return out;
}

namespace {

std::vector<double> critical_momenta(const LadderParams& params) {
  std::vector<double> ks{0.0, kPi};
  const auto minima = find_band_minima(params);
  if (minima.two_minima && minima.k_min > 0.0 && minima.k_min < kPi) ks.push_back(minima.k_min);
  std::sort(ks.begin(), ks.end());
  return ks;
}

}  // namespace

std::vector<double> lower_band_critical_energies(const LadderParams& params) {
  std::vector<double> energies;
  for (double k : critical_momenta(params)) energies.push_back(lower_band(params, k));
  std::sort(energies.begin(), energies.end());
  return energies;
}

std::vector<double> resonant_momenta(const LadderParams& params, double delta_q) {
  params.validate();
  const auto ks = critical_momenta(params);
  std::vector<double> roots;
  auto residual = [&](double k) { return lower_band(params, k) - delta_q; };
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    const double a = ks[i];
    const double b = ks[i + 1];
    const double ra = residual(a);
    const double rb = residual(b);
    if (ra * rb > 0.0) continue;
    const double k = bisect_root(residual, a, b);
    if (k <= 0.0) continue;
    if (!roots.empty() && std::abs(roots.back() - k) < 1e-9) continue;
    roots.push_back(k);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

BandEdgeDetunings band_edge_detunings(const LadderParams& params, double delta_q) {
  const auto energies = lower_band_critical_energies(params);
  constexpr double slack = 1e-12;
  if (delta_q < energies.front() - slack || delta_q > energies.back() + slack)
    throw RegimeError("delta_q lies outside the lower band");
  BandEdgeDetunings out;
  double below = energies.front();
  double above = energies.back();
  for (double e : energies) {
    if (e <= delta_q + slack) below = e;
  }
  for (auto it = energies.rbegin(); it != energies.rend(); ++it) {
    if (*it >= delta_q - slack) above = *it;
  }
  out.to_lower_edge = std::max(0.0, delta_q - below);
  out.to_upper_edge = std::max(0.0, above - delta_q);
  return out;
}

BandSummary summarize_bands(const LadderParams& params, int points, std::optional<double> delta_q) {
  params.validate();
  if (points < 2) throw ParameterError("band summary needs at least 2 momenta");
  BandSummary out;
  out.k_grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double k = -kPi + 2.0 * kPi * i / (points - 1);
    const auto e = dispersion(params, k);
    out.k_grid.push_back(k);
    out.E_minus.push_back(e.lower);
    out.E_plus.push_back(e.upper);
    out.theta.push_back(eigenmode_angle(params, k));
    out.sigma_z_minus.push_back(spin_expectation(params, k, Band::lower));
  }
  out.minima = find_band_minima(params);
  if (delta_q) {
    for (double k : resonant_momenta(params, *delta_q))
      out.resonances.push_back({k, group_velocity(params, k)});
  }
  return out;
}

}  // namespace ladderqed
