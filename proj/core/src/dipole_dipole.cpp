#include "ladderqed/dipole_dipole.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "ladderqed/band_structure.hpp"
#include "ladderqed/bound_states.hpp"
#include "ladderqed/errors.hpp"

namespace ladderqed {

namespace {

constexpr double kPi = std::numbers::pi;

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

double DipoleConfig::D_q() const { return emitter2.center() - emitter1.center(); }

void DipoleConfig::validate(int N) const {
  emitter1.validate(N);
  emitter2.validate(N);
  if (emitter1.delta_q != emitter2.delta_q)
    throw ParameterError("dipole pair needs identical emitter detunings");
  const double d = std::abs(D_q());
  if (!(d > emitter1.size() && d > emitter2.size()))
    throw ParameterError("emitters must be separated: |D_q| must exceed each emitter size");
}

DipoleConfig DipoleConfig::pair(double delta_q, double g, Site first, int d_s, int D_q) {
  DipoleConfig c;
  c.emitter1 = EmitterSpec::giant(delta_q, g, first, d_s);
  c.emitter2 = EmitterSpec::giant(delta_q, g, Site{first.x + D_q, first.leg}, d_s);
  return c;
}

ExchangeCoupling j12_closed_form(const LadderParams& params, const DipoleConfig& config) {
  params.validate();
  config.validate(params.N);
  const auto minima = find_band_minima(params);
  const double delta_0 = minima.E_min - config.emitter1.delta_q;
  if (!(delta_0 > 0.0))
    throw RegimeError("emitter detuning must lie below the lower band edge (Delta_0 > 0)");
  const double g1 = std::sqrt(effective_coupling_squared(params, config.emitter1));
  const double g2 = std::sqrt(effective_coupling_squared(params, config.emitter2));
  ExchangeCoupling out;
  out.decay_length = std::sqrt(minima.alpha / delta_0);
  out.magnitude = g1 * g2 / (2.0 * std::sqrt(minima.alpha * delta_0)) *
                  std::exp(-std::abs(config.D_q()) / out.decay_length);
  return out;
}

double effective_two_emitter_model(double J12, double t) {
  const double s = std::sin(J12 * t);
  return s * s;
}

std::vector<double> effective_two_emitter_model(double J12, const std::vector<double>& times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(effective_two_emitter_model(J12, t));
  return out;
}

double overlay_sup_norm(const RabiResult& result, double J12, double t_max) {
  double worst = 0.0;
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    if (result.times[i] > t_max + 1e-9) break;
    worst = std::max(worst, std::abs(result.P2[i] - effective_two_emitter_model(J12, result.times[i])));
  }
  return worst;
}

SinSquaredFit fit_sin_squared(const std::vector<double>& times, const std::vector<double>& values,
                              double t_max, double J_lo, double J_hi) {
  if (times.size() != values.size()) throw ParameterError("fit needs equally long series");
  if (!(J_hi > J_lo) || J_lo <= 0.0) throw ParameterError("fit needs 0 < J_lo < J_hi");
  std::size_t n = 0;
  while (n < times.size() && times[n] <= t_max + 1e-9) ++n;
  if (n < 3) throw ParameterError("fit window holds fewer than 3 samples");

  auto evaluate = [&](double J) {
    double ss = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = effective_two_emitter_model(J, times[i]);
      ss += s * s;
      sv += s * values[i];
    }
    const double a = ss > 0.0 ? sv / ss : 0.0;
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = values[i] - a * effective_two_emitter_model(J, times[i]);
      r += d * d;
    }
    return SinSquaredFit{J, a, r};
  };

  constexpr int grid = 400;
  const double step = (J_hi - J_lo) / grid;
  int best = 0;
  double best_r = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double r = evaluate(J_lo + step * i).residual;
    if (r < best_r) {
      best_r = r;
      best = i;
    }
  }
  const double lo = J_lo + step * std::max(0, best - 1);
  const double hi = J_lo + step * std::min(grid, best + 1);
  auto [J, r] = boost::math::tools::brent_find_minima(
      [&](double j) { return evaluate(j).residual; }, lo, hi, 50);
  (void)r;
  return evaluate(J);
}

RabiResult rabi_simulation(const LadderParams& params, const DipoleConfig& config,
                           const RabiOptions& options) {
  const ExchangeCoupling closed = j12_closed_form(params, config);
  RabiResult out;
  out.J12_closed = closed.magnitude;
  out.J12_sign = closed.sign;

  const double period = closed.magnitude > 0.0 ? kPi / closed.magnitude : 0.0;
  const double t_final = options.t_final > 0.0 ? options.t_final : period;
  if (!(t_final > 0.0))
    throw ParameterError("t_final must be given when the closed-form coupling vanishes");
  if (!(options.stride > 0.0)) throw ParameterError("stride must be > 0");

  const System system = assemble_system(params, {config.emitter1, config.emitter2});
  const bool lossless = !system.lossy();
  propagate(
      system, SystemState::excited(system, 0), t_final, options.stride,
      [&](const SystemState& s) {
        out.times.push_back(s.time);
        out.P1.push_back(s.emitter_population(0));
        out.P2.push_back(s.emitter_population(1));
        const double field = s.field_norm_squared();
        out.field_norm.push_back(field);
        out.max_field_norm = std::max(out.max_field_norm, field);
        out.max_P2 = std::max(out.max_P2, out.P2.back());
        if (lossless) out.max_norm_drift = std::max(out.max_norm_drift, std::abs(1.0 - s.norm_squared()));
      },
      options.propagator);

  if (out.max_field_norm >= kVirtualExcitationLimit) {
    out.perturbative = false;
    std::ostringstream msg;
    msg << "waveguide field norm reached " << out.max_field_norm << " (limit "
        << kVirtualExcitationLimit << "); exchange is not purely virtual";
    out.warning = msg.str();
  }

  out.fit_window = period > 0.0 ? std::min(period, t_final) : t_final;
  // Less than a quarter of an exchange period in the window: nothing to fit.
  if (closed.magnitude * out.fit_window < kPi / 4.0) return out;
  const auto fit = fit_sin_squared(out.times, out.P2, out.fit_window, 0.25 * closed.magnitude,
                                   2.0 * closed.magnitude);
  out.J12_fit = fit.J;
  out.fit_amplitude = fit.amplitude;
  return out;
}

DistanceSweepResult j12_distance_sweep(const LadderParams& params, double delta_q, double g,
                                       Site first, int d_s, const std::vector<int>& distances,
                                       bool simulate, const RabiOptions& options) {
  if (distances.size() < 2) throw ParameterError("distance sweep needs at least two separations");
  DistanceSweepResult out;
  std::vector<double> d, log_closed, log_fit;
  for (int D : distances) {
    const auto config = DipoleConfig::pair(delta_q, g, first, d_s, D);
    DistanceSweepRow row;
    row.D_q = D;
    const auto closed = j12_closed_form(params, config);
    row.J12_closed = closed.magnitude;
    out.expected_slope = -1.0 / closed.decay_length;
    if (simulate) {
      RabiOptions per_distance = options;
      per_distance.t_final = 0.0;  // one exchange period at each separation
      row.J12_fit = rabi_simulation(params, config, per_distance).J12_fit;
    }
    d.push_back(config.D_q());
    log_closed.push_back(std::log(row.J12_closed));
    if (simulate) log_fit.push_back(std::log(row.J12_fit));
    out.rows.push_back(row);
  }
  out.slope_closed = slope_of(d, log_closed);
  if (simulate) out.slope_fit = slope_of(d, log_fit);
  return out;
}

}  // namespace ladderqed
