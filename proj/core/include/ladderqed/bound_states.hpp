#pragma once

// Bound states of small and giant emitters detuned below the lower band.
//
// The Laplace-space self-energy is evaluated two ways: by quadrature over the
// exact lower-band dispersion, and in closed form from the effective-mass
// expansion around the band minima. With s = i*y (y > 0) both are purely
// negative-imaginary, Sigma(i y) = -i S(y), and the pole condition
// s + Sigma(s) = 0 reduces to y = S(y).

#include <optional>
#include <vector>

#include "ladderqed/band_structure.hpp"
#include "ladderqed/dynamics.hpp"

namespace ladderqed {

/// G_k = g * sum_p exp(-i k x_p).
Complex structure_factor(const EmitterSpec& emitter, double k);

/// Coupling of the emitter to the lower-band Bloch mode k: each point on leg A
/// carries cos(theta_k / 2), each point on leg B carries sin(theta_k / 2).
Complex lower_band_coupling(const LadderParams& params, const EmitterSpec& emitter, double k);

/// sum over band minima of |lower_band_coupling|^2. For points on a single
/// leg in the two-minima regime this equals |G_{k_min}|^2.
double effective_coupling_squared(const LadderParams& params, const EmitterSpec& emitter);

struct QuadratureOptions {
  int points = 20001;                 ///< samples on [-pi, pi], endpoints included
  double richardson_tolerance = 1e-9; ///< allowed change against half resolution
  int max_refinements = 4;            ///< doublings attempted before giving up
};

/// (1/2pi) * integral over k of |lower_band_coupling(k)|^2 / (s + i Delta_k),
/// Delta_k = E_-(k) - Delta_q. Throws ContractError when s sits on the
/// lower-band branch cut.
Complex self_energy_quadrature(const LadderParams& params, const EmitterSpec& emitter, Complex s,
                               const QuadratureOptions& options = {});

/// d Sigma / ds evaluated by the same quadrature.
Complex self_energy_quadrature_derivative(const LadderParams& params, const EmitterSpec& emitter,
                                          Complex s, const QuadratureOptions& options = {});

/// |G_{k_min}|^2 / (2 i sqrt(alpha (Delta_0 - i s))), principal root. On the
/// positive imaginary axis this is -i |G|^2 / (2 sqrt(alpha (Delta_0 + y))).
Complex self_energy_closed_form(const LadderParams& params, const EmitterSpec& emitter, Complex s);

/// Analytic derivative of the closed form; real and positive for s = i y.
Complex self_energy_closed_form_derivative(const LadderParams& params,
                                           const EmitterSpec& emitter, Complex s);

struct PoleResult {
  double y = 0.0;          ///< s_0 = i y
  bool decoupled = false;  ///< |G_{k_min}| = 0, y = 0
};

/// Root of y * sqrt(alpha (Delta_0 + y)) = |G_{k_min}|^2 / 2. Throws
/// RegimeError unless Delta_q < E_min.
PoleResult bound_state_pole(const LadderParams& params, const EmitterSpec& emitter);

/// Root of y = S(y) with the quadrature self-energy.
PoleResult bound_state_pole_quadrature(const LadderParams& params, const EmitterSpec& emitter,
                                       const QuadratureOptions& options = {});

/// Eigenvector of the assembled finite system below the band.
struct BoundStateProfile {
  double energy = 0.0;
  double emitter_weight = 0.0;  ///< |<e|psi_b>|^2
  FieldSnapshot field;
};

/// Shifted inverse iteration on the assembled system. Throws RegimeError when
/// the converged eigenvalue is not below E_min.
BoundStateProfile bound_state_profile(const LadderParams& params, const EmitterSpec& emitter);

struct BoundStateResult {
  double pole_y = 0.0;
  double residue = 0.0;
  double steady_population = 0.0;  ///< residue^2 from the closed form
  double delta_0 = 0.0;            ///< E_min - Delta_q
  double G_kmin = 0.0;             ///< sqrt(effective_coupling_squared)
  bool decoupled = false;
  /// Same pole and residue with the quadrature self-energy.
  double pole_y_quadrature = 0.0;
  double steady_population_quadrature = 0.0;
  std::optional<BoundStateProfile> profile;
};

struct BoundStateOptions {
  bool compute_profile = false;
  bool compute_quadrature = false;
  QuadratureOptions quadrature;
};

BoundStateResult steady_population(const LadderParams& params, const EmitterSpec& emitter,
                                   const BoundStateOptions& options = {});

/// Time average of |c_e(t)|^2 over [t_lo, t_hi] from a full propagation.
double trapped_population_dynamics(const LadderParams& params, const EmitterSpec& emitter,
                                   double t_lo, double t_hi, double stride = 0.5,
                                   const PropagatorOptions& options = {});

struct SizePoint {
  int d_s = 0;
  double G_kmin = 0.0;
  double pole_y = 0.0;
  double steady_population = 0.0;
};

struct SizeSweepResult {
  std::vector<SizePoint> points;
  double contrast = 0.0;  ///< min / max steady population
  double period = 0.0;    ///< 2 pi / k_min
  std::vector<int> local_maxima;
  std::vector<int> local_minima;
};

/// Sweeps d_s = 0..d_max moving the second point of a two-point template
/// along the first point's leg.
SizeSweepResult size_sweep(const LadderParams& params, const EmitterSpec& template_emitter,
                           int d_max);

}  // namespace ladderqed
