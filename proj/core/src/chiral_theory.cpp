#include "ladderqed/chiral_theory.hpp"

#include <cmath>
#include <limits>

#include "ladderqed/errors.hpp"

namespace ladderqed {

namespace {

constexpr double kVelocityFloor = 1e-9;

DecayRates weights_at(const LadderParams& params, double k_right, double k_left) {
  const double th_plus = eigenmode_angle(params, k_right);
  const double th_minus = eigenmode_angle(params, k_left);
  auto sq = [](double v) { return v * v; };
  DecayRates w;
  w.gamma_A_plus = sq((std::cos(th_plus) + 1.0) / 2.0);
  w.gamma_A_minus = sq((std::cos(th_minus) + 1.0) / 2.0);
  w.gamma_B_plus = sq(std::sin(th_plus) / 2.0);
  w.gamma_B_minus = sq(std::sin(th_minus) / 2.0);
  return w;
}

}  // namespace

DecayRates angular_weights(const LadderParams& params, double k_r) {
  params.validate();
  const double v = group_velocity(params, k_r);
  const bool right_moving = v >= 0.0;
  DecayRates w = right_moving ? weights_at(params, k_r, -k_r) : weights_at(params, -k_r, k_r);
  w.k_r = k_r;
  w.v_g = std::abs(v);
  return w;
}

DecayRates decay_rates(const LadderParams& params, double k_r, double g) {
  DecayRates r = angular_weights(params, k_r);
  if (r.v_g <= kVelocityFloor)
    throw BandEdgeError("group velocity vanishes at k_r; Markovian rates undefined");
  const double unit = g * g / (2.0 * r.v_g);
  r.gamma_A_plus *= unit;
  r.gamma_A_minus *= unit;
  r.gamma_B_plus *= unit;
  r.gamma_B_minus *= unit;
  return r;
}

double chiral_factor_from_rates(const DecayRates& rates) {
  const double total = rates.total();
  if (!(total > 0.0)) throw UndefinedChiralityError("all decay rates vanish");
  return rates.gamma_A_plus / total;
}

double chiral_factor_closed_form(const LadderParams& params, double k_r) {
  params.validate();
  const double f = std::sin(params.phi) * std::sin(k_r);
  const double eta = params.eta();
  const double num = (f + std::abs(f)) * (f + std::abs(f));
  const double den = num + 2.0 * eta * eta;
  if (den == 0.0) return 0.0;
  return num / den;
}

double markov_validity(const LadderParams& params, const DecayRates& rates, double delta_q) {
  const auto edges = band_edge_detunings(params, delta_q);
  const double gap = std::min(edges.to_lower_edge, edges.to_upper_edge);
  const double total = rates.total();
  if (total == 0.0) return 0.0;
  if (gap <= 0.0) return std::numeric_limits<double>::infinity();
  return total / gap;
}

std::vector<RateSweepRow> decay_rate_sweep(const LadderParams& params, double k_lo, double k_hi,
                                           int points) {
  if (points < 2) throw ParameterError("rate sweep needs at least 2 points");
  std::vector<RateSweepRow> rows;
  for (int i = 0; i < points; ++i) {
    const double k = k_lo + (k_hi - k_lo) * i / (points - 1);
    const double v = group_velocity(params, k);
    if (std::abs(v) <= kVelocityFloor) continue;
    RateSweepRow row;
    row.k_r = k;
    row.v_g = v;
    row.unit_rates = angular_weights(params, k);
    row.chiral_factor = chiral_factor_from_rates(row.unit_rates);
    row.chiral_factor_closed = chiral_factor_closed_form(params, k);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ladderqed
