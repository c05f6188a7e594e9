#include "ladderqed/bound_states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SparseLU>
#include <boost/math/tools/roots.hpp>

#include "ladderqed/errors.hpp"

namespace ladderqed {

namespace {

constexpr double kPi = std::numbers::pi;

struct Regime {
  BandMinima minima;
  double delta_0 = 0.0;
};

Regime below_band_regime(const LadderParams& params, const EmitterSpec& emitter) {
  params.validate();
  Regime r;
  r.minima = find_band_minima(params);
  r.delta_0 = r.minima.E_min - emitter.delta_q;
  if (!(r.delta_0 > 0.0))
    throw RegimeError("emitter detuning must lie below the lower band edge (Delta_0 > 0)");
  return r;
}

std::vector<double> minima_momenta(const BandMinima& m) {
  if (m.two_minima) return {m.k_min, -m.k_min};
  return {m.k_min};
}

/// Periodic trapezoid on [-pi, pi) with a half-resolution consistency check.
template <class F>
Complex integrate_periodic(F integrand, const QuadratureOptions& options) {
  if (options.points < 3) throw ParameterError("quadrature needs at least 3 points");
  long intervals = options.points - 1;
  if (intervals % 2 != 0) ++intervals;
  for (int attempt = 0; attempt <= options.max_refinements; ++attempt) {
    const double h = 2.0 * kPi / static_cast<double>(intervals);
    Complex full{}, half{};
    for (long j = 0; j < intervals; ++j) {
      const Complex v = integrand(-kPi + h * static_cast<double>(j));
      full += v;
      if (j % 2 == 0) half += v;
    }
    full *= h;
    half *= 2.0 * h;
    if (std::abs(full - half) <= options.richardson_tolerance * std::max(1.0, std::abs(full)))
      return full;
    intervals *= 2;
  }
  std::ostringstream msg;
  msg << "self-energy quadrature not converged after " << options.max_refinements
      << " refinements";
  throw IntegrationError(msg.str());
}

void check_off_contour(const LadderParams& params, const EmitterSpec& emitter, Complex s) {
  if (std::abs(s.real()) > 1e-12) return;
  const auto energies = lower_band_critical_energies(params);
  const double e = emitter.delta_q - s.imag();
  if (e >= energies.front() && e <= energies.back())
    throw ContractError("s lies on the lower-band branch cut; self-energy is singular there");
}

}  // namespace

Complex structure_factor(const EmitterSpec& emitter, double k) {
  Complex sum{};
  for (const auto& p : emitter.points) sum += std::polar(1.0, -k * p.x);
  return emitter.g * sum;
}

Complex lower_band_coupling(const LadderParams& params, const EmitterSpec& emitter, double k) {
  const double half = 0.5 * eigenmode_angle(params, k);
  const double wa = std::cos(half);
  const double wb = std::sin(half);
  Complex sum{};
  for (const auto& p : emitter.points)
    sum += (p.leg == Leg::A ? wa : wb) * std::polar(1.0, -k * p.x);
  return emitter.g * sum;
}

double effective_coupling_squared(const LadderParams& params, const EmitterSpec& emitter) {
  const auto minima = find_band_minima(params);
  double total = 0.0;
  for (double k : minima_momenta(minima)) total += std::norm(lower_band_coupling(params, emitter, k));
  return total;
}

Complex self_energy_quadrature(const LadderParams& params, const EmitterSpec& emitter, Complex s,
                               const QuadratureOptions& options) {
  params.validate();
  check_off_contour(params, emitter, s);
  auto integrand = [&](double k) {
    const double detuning = lower_band(params, k) - emitter.delta_q;
    return std::norm(lower_band_coupling(params, emitter, k)) / (s + Complex{0.0, detuning});
  };
  return integrate_periodic(integrand, options) / (2.0 * kPi);
}

Complex self_energy_quadrature_derivative(const LadderParams& params, const EmitterSpec& emitter,
                                          Complex s, const QuadratureOptions& options) {
  params.validate();
  check_off_contour(params, emitter, s);
  auto integrand = [&](double k) {
    const double detuning = lower_band(params, k) - emitter.delta_q;
    const Complex d = s + Complex{0.0, detuning};
    return -std::norm(lower_band_coupling(params, emitter, k)) / (d * d);
  };
  return integrate_periodic(integrand, options) / (2.0 * kPi);
}

Complex self_energy_closed_form(const LadderParams& params, const EmitterSpec& emitter, Complex s) {
  const auto r = below_band_regime(params, emitter);
  const double coupling = effective_coupling_squared(params, emitter);
  if (coupling == 0.0) return {};
  const Complex root = std::sqrt(r.minima.alpha * (r.delta_0 - Complex{0.0, 1.0} * s));
  return coupling / (2.0 * Complex{0.0, 1.0} * root);
}

Complex self_energy_closed_form_derivative(const LadderParams& params, const EmitterSpec& emitter,
                                           Complex s) {
  const auto r = below_band_regime(params, emitter);
  const double coupling = effective_coupling_squared(params, emitter);
  if (coupling == 0.0) return {};
  const Complex inner = r.minima.alpha * (r.delta_0 - Complex{0.0, 1.0} * s);
  const Complex root = std::sqrt(inner);
  return coupling * r.minima.alpha / (4.0 * inner * root);
}

namespace {

template <class F>
double solve_increasing(F fn, double lo, double hi) {
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(b)); };
  std::uintmax_t iters = 300;
  auto [a, b] = boost::math::tools::bisect(fn, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

}  // namespace

PoleResult bound_state_pole(const LadderParams& params, const EmitterSpec& emitter) {
  const auto r = below_band_regime(params, emitter);
  const double coupling = effective_coupling_squared(params, emitter);
  PoleResult out;
  if (coupling == 0.0) {
    out.decoupled = true;
    return out;
  }
  const double alpha = r.minima.alpha;
  auto residual = [&](double y) { return y * std::sqrt(alpha * (r.delta_0 + y)) - 0.5 * coupling; };
  const double upper = 0.5 * coupling / std::sqrt(alpha * r.delta_0);
  out.y = solve_increasing(residual, 0.0, upper);
  return out;
}

PoleResult bound_state_pole_quadrature(const LadderParams& params, const EmitterSpec& emitter,
                                       const QuadratureOptions& options) {
  (void)below_band_regime(params, emitter);
  auto strength = [&](double y) {
    return -self_energy_quadrature(params, emitter, Complex{0.0, y}, options).imag();
  };
  PoleResult out;
  const double at_zero = strength(0.0);
  if (at_zero == 0.0) {
    out.decoupled = true;
    return out;
  }
  out.y = solve_increasing([&](double y) { return y - strength(y); }, 0.0, at_zero);
  return out;
}

BoundStateProfile bound_state_profile(const LadderParams& params, const EmitterSpec& emitter) {
  const auto regime = below_band_regime(params, emitter);
  const System system = assemble_system(params, {emitter});
  const PoleResult pole = bound_state_pole_quadrature(params, emitter);
  const double shift = emitter.delta_q - pole.y - 1e-7;

  using ColMatrix = Eigen::SparseMatrix<Complex>;
  ColMatrix a = system.generator();
  ColMatrix identity(a.rows(), a.cols());
  identity.setIdentity();
  a -= shift * identity;
  a.makeCompressed();
  Eigen::SparseLU<ColMatrix> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw IntegrationError("inverse iteration factorization failed");

  const SparseMatrix& h = system.generator();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(a.rows());
  v(static_cast<Eigen::Index>(system.emitter_index(0))) = 1.0;
  Complex lambda{};
  double residual = 0.0;
  for (int it = 0; it < 500; ++it) {
    v = lu.solve(v);
    v /= v.norm();
    const Eigen::VectorXcd hv = h * v;
    lambda = v.dot(hv);
    residual = (hv - lambda * v).norm();
    if (residual < 1e-11) break;
  }
  if (residual > 1e-8) throw IntegrationError("inverse iteration for the bound state did not converge");
  if (!(lambda.real() < regime.minima.E_min))
    throw RegimeError("no eigenvalue found below the lower band edge");

  BoundStateProfile out;
  out.energy = lambda.real();
  const SystemState state = SystemState::from_vector(system, v, 0.0);
  out.emitter_weight = state.emitter_population(0);
  out.field = field_snapshot(system, state);
  return out;
}

BoundStateResult steady_population(const LadderParams& params, const EmitterSpec& emitter,
                                   const BoundStateOptions& options) {
  const auto regime = below_band_regime(params, emitter);
  BoundStateResult out;
  out.delta_0 = regime.delta_0;
  out.G_kmin = std::sqrt(effective_coupling_squared(params, emitter));
  const PoleResult pole = bound_state_pole(params, emitter);
  out.pole_y = pole.y;
  out.decoupled = pole.decoupled;
  const Complex s0{0.0, pole.y};
  const double slope = self_energy_closed_form_derivative(params, emitter, s0).real();
  out.residue = 1.0 / (1.0 + slope);
  out.steady_population = out.residue * out.residue;

  if (options.compute_quadrature) {
    const PoleResult q = bound_state_pole_quadrature(params, emitter, options.quadrature);
    out.pole_y_quadrature = q.y;
    const double dq =
        self_energy_quadrature_derivative(params, emitter, Complex{0.0, q.y}, options.quadrature)
            .real();
    const double res = 1.0 / (1.0 + dq);
    out.steady_population_quadrature = res * res;
  }
  if (options.compute_profile) out.profile = bound_state_profile(params, emitter);
  return out;
}

double trapped_population_dynamics(const LadderParams& params, const EmitterSpec& emitter,
                                   double t_lo, double t_hi, double stride,
                                   const PropagatorOptions& options) {
  if (!(t_hi > t_lo) || t_lo < 0.0) throw ParameterError("averaging window must satisfy 0 <= t_lo < t_hi");
  const System system = assemble_system(params, {emitter});
  double sum = 0.0;
  long count = 0;
  propagate(
      system, SystemState::excited(system), t_hi, stride,
      [&](const SystemState& s) {
        if (s.time >= t_lo - 1e-9) {
          sum += s.emitter_population(0);
          ++count;
        }
      },
      options);
  return sum / static_cast<double>(count);
}

SizeSweepResult size_sweep(const LadderParams& params, const EmitterSpec& template_emitter,
                           int d_max) {
  if (template_emitter.points.size() != 2)
    throw ParameterError("size sweep needs a two-point emitter template");
  if (d_max < 0) throw ParameterError("d_max must be >= 0");
  const Site first = template_emitter.points.front();
  SizeSweepResult out;
  for (int d = 0; d <= d_max; ++d) {
    const auto e = EmitterSpec::giant(template_emitter.delta_q, template_emitter.g, first, d);
    e.validate(params.N);
    const auto r = steady_population(params, e);
    out.points.push_back({d, r.G_kmin, r.pole_y, r.steady_population});
  }
  auto [lo, hi] = std::minmax_element(out.points.begin(), out.points.end(),
                                      [](const SizePoint& a, const SizePoint& b) {
                                        return a.steady_population < b.steady_population;
                                      });
  out.contrast = hi->steady_population > 0.0 ? lo->steady_population / hi->steady_population : 0.0;
  const auto minima = find_band_minima(params);
  out.period = minima.k_min > 0.0 ? 2.0 * kPi / minima.k_min : 0.0;

  const auto& p = out.points;
  // The curve is even in d_s, so d_s = 0 is a genuine extremum.
  if (p.size() >= 2) {
    if (p[0].steady_population < p[1].steady_population) out.local_minima.push_back(0);
    if (p[0].steady_population > p[1].steady_population) out.local_maxima.push_back(0);
  }
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double v = p[i].steady_population;
    if (v > p[i - 1].steady_population && v >= p[i + 1].steady_population)
      out.local_maxima.push_back(p[i].d_s);
    if (v < p[i - 1].steady_population && v <= p[i + 1].steady_population)
      out.local_minima.push_back(p[i].d_s);
  }
  return out;
}

}  // namespace ladderqed
