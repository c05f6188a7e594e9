#pragma once

#include <optional>
#include <vector>

#include "ladderqed/ladder_lattice.hpp"

namespace ladderqed {

enum class Band { lower, upper };

struct BandPair {
  double lower = 0.0;
  double upper = 0.0;
};

/// E_-(k) <= E_+(k), E_pm = -2t [g(k) -+ sqrt(f^2 + eta^2)].
BandPair dispersion(const LadderParams& params, double k);
double lower_band(const LadderParams& params, double k);

/// theta_k = atan2(eta, f(k)) in (0, pi).
double eigenmode_angle(const LadderParams& params, double k);

/// <sigma_z>_k: cos(theta_k) on the lower band, -cos(theta_k) on the upper.
double spin_expectation(const LadderParams& params, double k, Band band = Band::lower);

/// dE_-/dk.
double group_velocity(const LadderParams& params, double k);

/// d^2E_-/dk^2, analytic.
double lower_band_curvature(const LadderParams& params, double k);

/// Lower-band bottom. In the two-minima regime k_min > 0 is the positive
/// member of the degenerate pair; otherwise the single minimum sits at k = 0
/// and `two_minima` is false.
///
/// `alpha` follows the effective-mass form E_-(k) ~ E_min + alpha (k - k_min)^2,
/// so it is half the second derivative at the minimum.
struct BandMinima {
  double k_min = 0.0;
  double E_min = 0.0;
  double alpha = 0.0;
  bool two_minima = false;
};

BandMinima find_band_minima(const LadderParams& params);

/// Energies at which the lower band has zero slope on [0, pi], ascending.
/// Always contains E_-(0) and E_-(pi); includes E_min in the two-minima regime.
std::vector<double> lower_band_critical_energies(const LadderParams& params);

/// All k in (0, pi] with E_-(k) = delta_q, ascending. Empty when delta_q lies
/// outside the lower band.
std::vector<double> resonant_momenta(const LadderParams& params, double delta_q);

/// Distances from delta_q to the nearest lower-band critical energies below
/// (`to_lower_edge`) and above (`to_upper_edge`). Throws RegimeError when
/// delta_q is outside the lower band.
struct BandEdgeDetunings {
  double to_lower_edge = 0.0;
  double to_upper_edge = 0.0;
};

BandEdgeDetunings band_edge_detunings(const LadderParams& params, double delta_q);

struct Resonance {
  double k = 0.0;
  double group_velocity = 0.0;
};

struct BandSummary {
  std::vector<double> k_grid;
  std::vector<double> E_minus;
  std::vector<double> E_plus;
  std::vector<double> theta;
  std::vector<double> sigma_z_minus;
  BandMinima minima;
  std::vector<Resonance> resonances;
};

/// Samples `points` momenta uniformly on [-pi, pi] (both ends included).
BandSummary summarize_bands(const LadderParams& params, int points,
                            std::optional<double> delta_q = std::nullopt);

}  // namespace ladderqed
