#include "ladderqed/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "ladderqed/band_structure.hpp"
#include "ladderqed/errors.hpp"

namespace ladderqed {

// ---------------------------------------------------------------------------
// Emitters and assembly

void EmitterSpec::validate(int N) const {
  if (points.empty()) throw ParameterError("emitter needs at least one coupling point");
  if (!std::isfinite(delta_q) || !std::isfinite(g))
    throw ParameterError("emitter delta_q and g must be finite");
  for (const auto& p : points) (void)site_index(p, N);
}

int EmitterSpec::size() const {
  if (points.empty()) return 0;
  auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                      [](const Site& a, const Site& b) { return a.x < b.x; });
  return hi->x - lo->x;
}

double EmitterSpec::center() const {
  if (points.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : points) sum += p.x;
  return sum / static_cast<double>(points.size());
}

EmitterSpec EmitterSpec::small(double delta_q, double g, Site point) {
  return {delta_q, g, {point}};
}

EmitterSpec EmitterSpec::giant(double delta_q, double g, Site first, int d_s) {
  if (d_s < 0) throw ParameterError("giant-atom size must be >= 0");
  return {delta_q, g, {first, Site{first.x + d_s, first.leg}}};
}

System::System(LadderParams params, std::vector<EmitterSpec> emitters)
    : params_(std::move(params)), emitters_(std::move(emitters)) {
  params_.validate();
  if (emitters_.empty()) throw AssemblyError("system needs at least one emitter");
  for (const auto& e : emitters_) e.validate(params_.N);

  const LatticeHamiltonian lattice = build_lattice(params_);
  const std::size_t sites = num_sites();
  std::vector<MatrixEntry> hermitian = lattice.hermitian_part();
  hermitian.reserve(hermitian.size() + emitters_.size() * 5);
  for (std::size_t i = 0; i < emitters_.size(); ++i) {
    const std::size_t slot = sites + i;
    const auto& e = emitters_[i];
    if (e.delta_q != 0.0) hermitian.push_back({slot, slot, Complex{e.delta_q, 0.0}});
    for (const auto& p : e.points) {
      const std::size_t s = site_index(p, params_.N);
      if (s >= sites) throw AssemblyError("coupling point collides with an emitter slot");
      hermitian.push_back({slot, s, Complex{e.g, 0.0}});
      hermitian.push_back({s, slot, Complex{e.g, 0.0}});
    }
  }
  hamiltonian_ = LatticeHamiltonian(sites + emitters_.size(), std::move(hermitian),
                                    lattice.loss_part());
  sparse_ = hamiltonian_.to_sparse();
}

std::size_t System::emitter_index(std::size_t i) const {
  if (i >= emitters_.size())
    throw IndexError("emitter " + std::to_string(i) + " does not exist");
  return num_sites() + i;
}

System assemble_system(const LadderParams& params, std::vector<EmitterSpec> emitters) {
  return System(params, std::move(emitters));
}

// ---------------------------------------------------------------------------
// State

double SystemState::norm_squared() const {
  double s = field_norm_squared();
  for (const auto& c : c_e) s += std::norm(c);
  return s;
}

double SystemState::field_norm_squared() const {
  double s = 0.0;
  for (const auto& c : field) s += std::norm(c);
  return s;
}

double SystemState::emitter_population(std::size_t i) const {
  if (i >= c_e.size()) throw IndexError("emitter " + std::to_string(i) + " does not exist");
  return std::norm(c_e[i]);
}

SystemState SystemState::excited(const System& system, std::size_t i) {
  SystemState s;
  s.c_e.assign(system.num_emitters(), Complex{});
  s.field.assign(system.num_sites(), Complex{});
  s.c_e.at(i) = 1.0;
  return s;
}

SystemState SystemState::from_vector(const System& system, const Eigen::VectorXcd& psi,
                                     double time) {
  if (static_cast<std::size_t>(psi.size()) != system.dimension())
    throw IndexError("state vector dimension does not match the system");
  SystemState s;
  s.time = time;
  const std::size_t sites = system.num_sites();
  s.field.assign(psi.data(), psi.data() + sites);
  s.c_e.assign(psi.data() + sites, psi.data() + psi.size());
  return s;
}

Eigen::VectorXcd SystemState::to_vector() const {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(field.size() + c_e.size()));
  Eigen::Index i = 0;
  for (const auto& c : field) v(i++) = c;
  for (const auto& c : c_e) v(i++) = c;
  return v;
}

// ---------------------------------------------------------------------------
// Propagation

namespace {

void check_state(const System& system, const SystemState& s) {
  if (s.field.size() != system.num_sites() || s.c_e.size() != system.num_emitters())
    throw IndexError("state layout does not match the system");
}

class TaylorStepper {
 public:
  TaylorStepper(const SparseMatrix& h, const PropagatorOptions& options)
      : h_(h), options_(options), term_(h.rows()), next_(h.rows()) {}

  void step(Eigen::VectorXcd& psi, double dt, double time) {
    term_ = psi;
    const double tol2 = options_.series_tolerance * options_.series_tolerance;
    const Complex factor{0.0, -dt};
    for (int n = 1;; ++n) {
      if (n > options_.max_order) {
        std::ostringstream msg;
        msg << "Taylor series did not converge at t=" << time << " (dt=" << dt
            << ", order " << options_.max_order << ", residual term norm "
            << std::sqrt(term_.squaredNorm()) << ")";
        throw IntegrationError(msg.str());
      }
      next_.noalias() = h_ * term_;
      term_ = next_ * (factor / static_cast<double>(n));
      psi += term_;
      const double sum2 = psi.squaredNorm();
      if (term_.squaredNorm() <= tol2 * sum2 || sum2 == 0.0) break;
    }
    if (!psi.allFinite()) {
      std::ostringstream msg;
      msg << "state became non-finite at t=" << time << " (dt=" << dt << ")";
      throw IntegrationError(msg.str());
    }
  }

 private:
  const SparseMatrix& h_;
  PropagatorOptions options_;
  Eigen::VectorXcd term_;
  Eigen::VectorXcd next_;
};

}  // namespace

SystemState propagate(const System& system, const SystemState& initial, double duration,
                      double stride, const Observer& observer, const PropagatorOptions& options) {
  check_state(system, initial);
  if (!(duration > 0.0)) throw ParameterError("propagation duration must be > 0");
  if (!(options.max_step_norm > 0.0)) throw ParameterError("max_step_norm must be > 0");

  const double h_norm = std::max(system.hamiltonian().infinity_norm(), 1e-300);
  const double t0 = initial.time;
  const double t_end = t0 + duration;
  TaylorStepper stepper(system.generator(), options);
  Eigen::VectorXcd psi = initial.to_vector();

  if (observer) observer(initial);

  double current = t0;
  long mark = 1;
  while (current < t_end) {
    double target = t_end;
    if (stride > 0.0) {
      const double candidate = t0 + static_cast<double>(mark) * stride;
      if (candidate < t_end - 1e-12 * std::max(1.0, std::abs(t_end))) target = candidate;
    }
    const double interval = target - current;
    const auto substeps =
        static_cast<long>(std::max(1.0, std::ceil(interval * h_norm / options.max_step_norm)));
    const double dt = interval / static_cast<double>(substeps);
    for (long s = 0; s < substeps; ++s) stepper.step(psi, dt, current + s * dt);
    current = target;
    ++mark;
    if (observer && current < t_end) observer(SystemState::from_vector(system, psi, current));
  }
  SystemState final_state = SystemState::from_vector(system, psi, t_end);
  if (observer) observer(final_state);
  return final_state;
}

std::vector<SystemState> propagate(const System& system, const SystemState& initial,
                                   double duration, double stride,
                                   const PropagatorOptions& options) {
  std::vector<SystemState> out;
  propagate(system, initial, duration, stride, [&](const SystemState& s) { out.push_back(s); },
            options);
  return out;
}

SystemState dense_oracle_propagate(const System& system, const SystemState& initial, double t,
                                   std::size_t max_dimension) {
  check_state(system, initial);
  if (system.dimension() > max_dimension)
    throw OracleSizeError("dense oracle limited to dimension " + std::to_string(max_dimension) +
                          ", system has " + std::to_string(system.dimension()));
  const Eigen::VectorXcd psi0 = initial.to_vector();
  const Eigen::MatrixXcd h = system.hamiltonian().to_dense();
  Eigen::VectorXcd psi;
  if (!system.lossy()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    const Eigen::MatrixXcd& v = solver.eigenvectors();
    Eigen::VectorXcd coeff = v.adjoint() * psi0;
    for (Eigen::Index i = 0; i < coeff.size(); ++i)
      coeff(i) *= std::polar(1.0, -solver.eigenvalues()(i) * t);
    psi = v * coeff;
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h);
    const Eigen::MatrixXcd& v = solver.eigenvectors();
    Eigen::VectorXcd coeff = v.partialPivLu().solve(psi0);
    for (Eigen::Index i = 0; i < coeff.size(); ++i)
      coeff(i) *= std::exp(Complex{0.0, -t} * solver.eigenvalues()(i));
    psi = v * coeff;
  }
  return SystemState::from_vector(system, psi, initial.time + t);
}

double energy_expectation(const System& system, const SystemState& state) {
  check_state(system, state);
  const Eigen::VectorXcd psi = state.to_vector();
  const SparseMatrix h = system.hamiltonian().to_sparse(false);
  const Eigen::VectorXcd hpsi = h * psi;
  return psi.dot(hpsi).real() / psi.squaredNorm();
}

// ---------------------------------------------------------------------------
// Observables

double FieldSnapshot::total() const { return leg_total(Leg::A) + leg_total(Leg::B); }

double FieldSnapshot::leg_total(Leg leg) const {
  const auto& v = leg == Leg::A ? leg_A : leg_B;
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

FieldSnapshot field_snapshot(const System& system, const SystemState& state) {
  check_state(system, state);
  const int N = system.params().N;
  FieldSnapshot snap;
  snap.time = state.time;
  snap.leg_A.resize(static_cast<std::size_t>(N));
  snap.leg_B.resize(static_cast<std::size_t>(N));
  for (int x = 0; x < N; ++x) {
    snap.leg_A[static_cast<std::size_t>(x)] = std::norm(state.field[site_index({x, Leg::A}, N)]);
    snap.leg_B[static_cast<std::size_t>(x)] = std::norm(state.field[site_index({x, Leg::B}, N)]);
  }
  return snap;
}

ChiralityReport directional_intensities(const FieldSnapshot& snapshot, int origin_x) {
  ChiralityReport r;
  const int n = static_cast<int>(snapshot.leg_A.size());
  for (int x = 0; x < n; ++x) {
    const auto i = static_cast<std::size_t>(x);
    if (x >= origin_x) {
      r.phi_A_plus += snapshot.leg_A[i];
      r.phi_B_plus += snapshot.leg_B[i];
    } else {
      r.phi_A_minus += snapshot.leg_A[i];
      r.phi_B_minus += snapshot.leg_B[i];
    }
  }
  const double total = r.total();
  if (!(total > 0.0)) throw UndefinedChiralityError("field is identically zero");
  r.C_numeric = r.phi_A_plus / total;
  return r;
}

ChiralityReport directional_intensities(const System& system, const SystemState& state,
                                        int origin_x) {
  return directional_intensities(field_snapshot(system, state), origin_x);
}

TrajectoryPoint trajectory_point(const SystemState& state) {
  TrajectoryPoint p;
  p.time = state.time;
  p.emitter_populations.reserve(state.c_e.size());
  for (const auto& c : state.c_e) p.emitter_populations.push_back(std::norm(c));
  p.field_norm = state.field_norm_squared();
  return p;
}

double fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& values,
                            double t_lo, double t_hi) {
  if (times.size() != values.size()) throw ParameterError("fit inputs differ in length");
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi || !(values[i] > 0.0)) continue;
    const double y = std::log(values[i]);
    n += 1;
    sx += times[i];
    sy += y;
    sxx += times[i] * times[i];
    sxy += times[i] * y;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) throw ParameterError("exponential fit needs two distinct samples");
  return -(n * sxy - sx * sy) / den;
}

// ---------------------------------------------------------------------------
// Experiments

EmissionResult emission_run(const LadderParams& params, const EmitterSpec& emitter,
                            double duration, double stride, double fit_from,
                            const PropagatorOptions& options) {
  const System system = assemble_system(params, {emitter});
  EmissionResult out;
  double drift = 0.0;
  out.final_state = propagate(
      system, SystemState::excited(system), duration, stride,
      [&](const SystemState& s) {
        out.trajectory.push_back(trajectory_point(s));
        drift = std::max(drift, std::abs(1.0 - s.norm_squared()));
      },
      options);
  out.max_norm_drift = drift;
  out.final_field = field_snapshot(system, out.final_state);
  out.chirality = directional_intensities(out.final_field, emitter.points.front().x);

  std::vector<double> ts, pe;
  for (const auto& p : out.trajectory) {
    ts.push_back(p.time);
    pe.push_back(p.emitter_populations.front());
  }
  out.fitted_rate = fit_exponential_rate(ts, pe, fit_from, duration);
  return out;
}

ReflectionResult reflection_experiment(const LadderParams& params, const EmitterSpec& emitter,
                                       double t_final, double kappa,
                                       std::vector<double> snapshot_times,
                                       const PropagatorOptions& options) {
  LadderParams lossy = params;
  lossy.kappa = kappa;
  if (lossy.boundary != Boundary::open)
    throw ParameterError("reflection experiment needs an open (hard-wall) ladder");
  if (!(t_final > 0.0)) throw ParameterError("t_final must be > 0");
  for (double t : snapshot_times)
    if (!(t > 0.0) || t > t_final) throw ParameterError("snapshot times must lie in (0, t_final]");
  snapshot_times.push_back(t_final);
  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()),
                       snapshot_times.end());

  const System system = assemble_system(lossy, {emitter});
  const int origin = emitter.points.front().x;

  ReflectionResult out;
  double v_max = 0.0;
  for (double k : resonant_momenta(lossy, emitter.delta_q))
    v_max = std::max(v_max, group_velocity(lossy, k));
  const double distance = static_cast<double>(lossy.N - 1 - origin);
  out.wall_arrival_time =
      v_max > 0.0 ? distance / v_max : std::numeric_limits<double>::infinity();
  out.reached_wall = t_final >= out.wall_arrival_time;

  SystemState state = SystemState::excited(system);
  for (double t : snapshot_times) {
    const double step = t - state.time;
    if (step > 0.0) state = propagate(system, state, step, 0.0, Observer{}, options);
    ReflectionSnapshot snap;
    snap.time = t;
    snap.field = field_snapshot(system, state);
    if (snap.field.total() > 0.0) snap.sides = directional_intensities(snap.field, origin);
    out.snapshots.push_back(std::move(snap));
  }
  return out;
}

}  // namespace ladderqed
