#pragma once

// Exact single-excitation dynamics of emitters coupled to the ladder.
//
// Flat layout of the assembled system: lattice sites first (leg-major, see
// site_index), then one slot per emitter at 2N + i. Each emitter contributes
// Delta_q on its diagonal and a real coupling g to every coupling point.

#include <functional>
#include <optional>
#include <vector>

#include "ladderqed/ladder_lattice.hpp"

namespace ladderqed {

struct EmitterSpec {
  double delta_q = 0.0;      ///< omega_q - omega_0
  double g = 0.0;            ///< coupling per point
  std::vector<Site> points;  ///< one point: small atom; two or more: giant atom

  /// Coincident points are allowed and add their couplings.
  void validate(int N) const;
  /// max(x) - min(x) over the coupling points.
  int size() const;
  /// Mean cell coordinate of the coupling points.
  double center() const;

  static EmitterSpec small(double delta_q, double g, Site point);
  /// Two points on the same leg at x and x + d_s.
  static EmitterSpec giant(double delta_q, double g, Site first, int d_s);
};

class System {
 public:
  System(LadderParams params, std::vector<EmitterSpec> emitters);

  const LadderParams& params() const noexcept { return params_; }
  const std::vector<EmitterSpec>& emitters() const noexcept { return emitters_; }
  const LatticeHamiltonian& hamiltonian() const noexcept { return hamiltonian_; }
  const SparseMatrix& generator() const noexcept { return sparse_; }

  std::size_t dimension() const noexcept { return hamiltonian_.dimension(); }
  std::size_t num_sites() const noexcept { return 2 * static_cast<std::size_t>(params_.N); }
  std::size_t num_emitters() const noexcept { return emitters_.size(); }
  std::size_t emitter_index(std::size_t i) const;
  bool lossy() const noexcept { return !hamiltonian_.loss_part().empty(); }

 private:
  LadderParams params_;
  std::vector<EmitterSpec> emitters_;
  LatticeHamiltonian hamiltonian_;
  SparseMatrix sparse_;
};

/// Builds the full emitter + lattice Hamiltonian. Throws AssemblyError for an
/// empty emitter list and IndexError for coupling points off the lattice.
System assemble_system(const LadderParams& params, std::vector<EmitterSpec> emitters);

struct SystemState {
  std::vector<Complex> c_e;    ///< one amplitude per emitter
  std::vector<Complex> field;  ///< one amplitude per lattice site, leg-major
  double time = 0.0;

  double norm_squared() const;
  double field_norm_squared() const;
  double emitter_population(std::size_t i) const;

  /// Excitation fully in emitter `i`, field empty.
  static SystemState excited(const System& system, std::size_t i = 0);
  static SystemState from_vector(const System& system, const Eigen::VectorXcd& psi, double time);
  Eigen::VectorXcd to_vector() const;
};

struct PropagatorOptions {
  /// Upper bound on ||H||_inf * dt for each Taylor step.
  double max_step_norm = 1.0;
  /// A series is truncated once a term falls below this fraction of the sum.
  double series_tolerance = 1e-17;
  int max_order = 80;
};

using Observer = std::function<void(const SystemState&)>;

/// Integrates d psi/dt = -i H psi from `initial.time` to `initial.time + duration`.
/// `observer` sees the state at the start, at every multiple of `stride`
/// (when stride > 0), and at the end. Returns the final state.
///
/// Each step applies a truncated Taylor series of exp(-i H dt) whose order is
/// chosen adaptively, so the amplitude error per step sits at round-off level.
/// Throws IntegrationError if a series fails to converge or the state becomes
/// non-finite.
SystemState propagate(const System& system, const SystemState& initial, double duration,
                      double stride, const Observer& observer, const PropagatorOptions& options = {});

std::vector<SystemState> propagate(const System& system, const SystemState& initial,
                                   double duration, double stride,
                                   const PropagatorOptions& options = {});

/// psi(t) = V exp(-i Lambda t) V^{-1} psi(0) by dense diagonalization; uses the
/// Hermitian solver when the system is lossless. Throws OracleSizeError above
/// `max_dimension`.
SystemState dense_oracle_propagate(const System& system, const SystemState& initial, double t,
                                   std::size_t max_dimension = 1000);

inline double sup_norm_difference(const SystemState& a, const SystemState& b) {
  return (a.to_vector() - b.to_vector()).cwiseAbs().maxCoeff();
}

/// <psi|H_hermitian|psi> / <psi|psi>.
double energy_expectation(const System& system, const SystemState& state);

struct FieldSnapshot {
  double time = 0.0;
  std::vector<double> leg_A;
  std::vector<double> leg_B;

  double total() const;
  double leg_total(Leg leg) const;
};

FieldSnapshot field_snapshot(const System& system, const SystemState& state);

/// Per-leg intensities on either side of `origin_x`. The origin cell is
/// counted on the right (+) side only.
struct ChiralityReport {
  double phi_A_plus = 0.0;
  double phi_A_minus = 0.0;
  double phi_B_plus = 0.0;
  double phi_B_minus = 0.0;
  double C_numeric = 0.0;

  double total() const noexcept { return phi_A_plus + phi_A_minus + phi_B_plus + phi_B_minus; }
};

ChiralityReport directional_intensities(const FieldSnapshot& snapshot, int origin_x);
ChiralityReport directional_intensities(const System& system, const SystemState& state,
                                        int origin_x);

struct TrajectoryPoint {
  double time = 0.0;
  std::vector<double> emitter_populations;
  double field_norm = 0.0;
};

TrajectoryPoint trajectory_point(const SystemState& state);

/// Least-squares slope of -log(values) against time over [t_lo, t_hi].
/// Samples with non-positive values are skipped.
double fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& values,
                            double t_lo, double t_hi);

/// A small-atom emission run with the field sampled every `stride`.
struct EmissionResult {
  std::vector<TrajectoryPoint> trajectory;
  SystemState final_state;
  FieldSnapshot final_field;
  ChiralityReport chirality;
  double fitted_rate = 0.0;  ///< population decay rate of emitter 0
  double max_norm_drift = 0.0;  ///< max |1 - ||psi||^2| (lossless runs)
};

/// `fit_from` sets the start of the exponential fit window, which ends at
/// `duration`.
EmissionResult emission_run(const LadderParams& params, const EmitterSpec& emitter,
                            double duration, double stride, double fit_from = 5.0,
                            const PropagatorOptions& options = {});

struct ReflectionSnapshot {
  double time = 0.0;
  FieldSnapshot field;
  ChiralityReport sides;  ///< split at the emitter's first coupling cell
};

struct ReflectionResult {
  std::vector<ReflectionSnapshot> snapshots;
  double wall_arrival_time = 0.0;  ///< distance to the right wall / v_g
  bool reached_wall = false;       ///< false means the run ended before the front hit the wall
};

/// Emission on an open ladder long enough for the right-moving packet to hit
/// the hard wall. `kappa` overrides params.kappa. Snapshots are taken at
/// `snapshot_times` (each <= t_final) and at t_final.
ReflectionResult reflection_experiment(const LadderParams& params, const EmitterSpec& emitter,
                                       double t_final = 180.0, double kappa = 0.01,
                                       std::vector<double> snapshot_times = {100.0},
                                       const PropagatorOptions& options = {});

}  // namespace ladderqed
