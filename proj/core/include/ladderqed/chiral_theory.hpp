#pragma once

#include <vector>

#include "ladderqed/band_structure.hpp"

namespace ladderqed {

/// Markovian amplitude decay rates into the right (+) and left (-) directions
/// of each leg. |c_e|^2 decays at twice `total()`.
struct DecayRates {
  double gamma_A_plus = 0.0;
  double gamma_A_minus = 0.0;
  double gamma_B_plus = 0.0;
  double gamma_B_minus = 0.0;
  double k_r = 0.0;
  double v_g = 0.0;

  double total() const noexcept {
    return gamma_A_plus + gamma_A_minus + gamma_B_plus + gamma_B_minus;
  }
};

/// Rates for a small emitter with bare coupling `g` resonant with the lower
/// band at `k_r`. "+" always denotes the right-moving partner; when
/// v_g(k_r) < 0 the roles of k_r and -k_r are swapped so that `v_g` stored in
/// the result is positive. Throws BandEdgeError when |v_g| is ~0.
DecayRates decay_rates(const LadderParams& params, double k_r, double g);

/// The four angular weights ((cos th+ + 1)/2)^2, ((cos th- + 1)/2)^2,
/// (sin th+ / 2)^2, (sin th- / 2)^2, i.e. the rates in units g^2/(2 v_g).
DecayRates angular_weights(const LadderParams& params, double k_r);

/// Gamma_A+ / sum of all four rates.
double chiral_factor_from_rates(const DecayRates& rates);

/// (f + |f|)^2 / ((f + |f|)^2 + 2 eta^2) at k_r.
double chiral_factor_closed_form(const LadderParams& params, double k_r);

/// Gamma_tot / min(distance to lower edge, distance to upper edge).
double markov_validity(const LadderParams& params, const DecayRates& rates, double delta_q);

/// Ratios at or below this value are treated as Markovian.
inline constexpr double kMarkovThreshold = 0.05;

/// One row per k_r of the angular weights and both chiral factors.
struct RateSweepRow {
  double k_r = 0.0;
  double v_g = 0.0;
  DecayRates unit_rates;
  double chiral_factor = 0.0;
  double chiral_factor_closed = 0.0;
};

/// Sweeps k_r over (k_lo, k_hi), `points` samples inclusive; momenta where
/// |v_g| vanishes are skipped.
std::vector<RateSweepRow> decay_rate_sweep(const LadderParams& params, double k_lo, double k_hi,
                                           int points);

}  // namespace ladderqed
