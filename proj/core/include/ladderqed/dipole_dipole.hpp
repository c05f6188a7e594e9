#pragma once

// Coherent exchange between two emitters detuned below the lower band,
// mediated by virtual band-edge photons.

#include <string>
#include <vector>

#include "ladderqed/dynamics.hpp"

namespace ladderqed {

struct DipoleConfig {
  EmitterSpec emitter1;
  EmitterSpec emitter2;

  /// center(emitter2) - center(emitter1), in cells.
  double D_q() const;
  /// Checks identical detunings, points on the lattice and a separated
  /// topology: |D_q| larger than either emitter's size.
  void validate(int N) const;

  /// Two identical emitters; the second is the first shifted by `D_q` cells.
  static DipoleConfig pair(double delta_q, double g, Site first, int d_s, int D_q);
};

struct ExchangeCoupling {
  double magnitude = 0.0;
  int sign = -1;  ///< the exchange term enters the effective Hamiltonian with a minus
  double decay_length = 0.0;  ///< sqrt(alpha / Delta_0)
};

/// |G1||G2| / (2 sqrt(alpha Delta_0)) * exp(-sqrt(Delta_0 / alpha) |D_q|).
/// Throws RegimeError unless Delta_q < E_min.
ExchangeCoupling j12_closed_form(const LadderParams& params, const DipoleConfig& config);

/// Field norms above this mean the waveguide is no longer only virtually excited.
inline constexpr double kVirtualExcitationLimit = 0.05;

struct RabiResult {
  std::vector<double> times;
  std::vector<double> P1;
  std::vector<double> P2;
  std::vector<double> field_norm;
  double max_field_norm = 0.0;
  double max_P2 = 0.0;
  bool perturbative = true;
  std::string warning;

  double J12_closed = 0.0;
  int J12_sign = -1;
  double J12_fit = 0.0;        ///< 0 when the window spans under a quarter period
  double fit_amplitude = 0.0;  ///< A in A sin^2(J t)
  double fit_window = 0.0;     ///< fit uses samples with t <= fit_window
  double max_norm_drift = 0.0;
};

struct RabiOptions {
  double t_final = 0.0;  ///< <= 0 selects one exchange period pi / J12_closed
  double stride = 1.0;
  PropagatorOptions propagator;
};

/// Full-lattice propagation with the excitation initially in emitter 1. The
/// fit of P2 to A sin^2(J t) runs over the first exchange period
/// [0, pi / J12_closed] clipped to t_final.
RabiResult rabi_simulation(const LadderParams& params, const DipoleConfig& config,
                           const RabiOptions& options = {});

/// sin^2(J t).
double effective_two_emitter_model(double J12, double t);
std::vector<double> effective_two_emitter_model(double J12, const std::vector<double>& times);

/// max |P2(t) - sin^2(J t)| over samples with t <= t_max.
double overlay_sup_norm(const RabiResult& result, double J12, double t_max);

/// Least-squares A sin^2(J t) fit to (times, values) over t <= t_max with J
/// searched in [J_lo, J_hi].
struct SinSquaredFit {
  double J = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;
};
SinSquaredFit fit_sin_squared(const std::vector<double>& times, const std::vector<double>& values,
                              double t_max, double J_lo, double J_hi);

struct DistanceSweepRow {
  int D_q = 0;
  double J12_closed = 0.0;
  double J12_fit = 0.0;
};

struct DistanceSweepResult {
  std::vector<DistanceSweepRow> rows;
  double slope_closed = 0.0;  ///< d log J / d D_q
  double slope_fit = 0.0;     ///< 0 when simulations were skipped
  double expected_slope = 0.0;  ///< -sqrt(Delta_0 / alpha)
};

/// J12 against separation for identical pairs built like `pair(.., D_q)`. Each
/// simulation spans one exchange period of its own closed-form coupling.
DistanceSweepResult j12_distance_sweep(const LadderParams& params, double delta_q, double g,
                                       Site first, int d_s, const std::vector<int>& distances,
                                       bool simulate, const RabiOptions& options = {});

}  // namespace ladderqed
