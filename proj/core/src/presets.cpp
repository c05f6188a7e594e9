#include <cmath>
#include <numbers>

#include "ladderqed/dipole_dipole.hpp"
#include "ladderqed/errors.hpp"
#include "ladderqed/experiment.hpp"

namespace ladderqed {

namespace {

// t' = 1, t = 2, phi = pi/3 throughout.
LadderParams waveguide(int N) {
  LadderParams p;
  p.t = 2.0;
  p.t_prime = 1.0;
  p.phi = std::numbers::pi / 3.0;
  p.N = N;
  p.boundary = Boundary::open;
  return p;
}

constexpr double kChiralDetuning = -2.042;
constexpr double kBoundDetuning = -4.2;

ExperimentConfig chiral_base(const char* name, ExperimentKind kind) {
  ExperimentConfig c;
  c.name = name;
  c.output = name;
  c.experiment = kind;
  c.model = waveguide(1000);
  c.emitters = {EmitterSpec::small(kChiralDetuning, 0.4, Site{500, Leg::A})};
  c.numeric.t_final = 100.0;
  c.numeric.stride = 0.5;
  return c;
}

ExperimentConfig bound_base(const char* name, ExperimentKind kind) {
  ExperimentConfig c;
  c.name = name;
  c.output = name;
  c.experiment = kind;
  c.model = waveguide(400);
  c.emitters = {EmitterSpec::giant(kBoundDetuning, 0.1, Site{200, Leg::A}, 0)};
  return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig6", "fig7", "fig8"}; }

ExperimentConfig preset(const std::string& name) {
  if (name == "fig2") {
    auto c = chiral_base("fig2", ExperimentKind::bands);
    c.numeric.band_points = 501;
    return c;
  }
  if (name == "fig3") {
    auto c = chiral_base("fig3", ExperimentKind::chiral_emission);
    c.sweep = SweepSpec{"emitters.g", {0.4, 3.0}};
    return c;
  }
  if (name == "fig4") {
    auto c = chiral_base("fig4", ExperimentKind::loss_reflection);
    c.numeric.t_final = 180.0;
    c.numeric.snapshot_times = {100.0};
    c.sweep = SweepSpec{"model.kappa", {0.0, 0.01}};
    return c;
  }
  if (name == "fig6") {
    auto c = bound_base("fig6", ExperimentKind::bound_state);
    c.numeric.t_final = 1000.0;
    c.numeric.plateau_from = 800.0;
    c.numeric.stride = 0.5;
    c.sweep = SweepSpec{"emitters.d_s", {0, 1, 2, 3}};
    return c;
  }
  if (name == "fig7") {
    auto c = bound_base("fig7", ExperimentKind::size_sweep);
    c.numeric.d_max = 12;
    c.numeric.delta_q_values = {-4.18, -4.2, -4.25, -4.3, -4.4, -4.5};
    return c;
  }
  if (name == "fig8") {
    ExperimentConfig c;
    c.name = "fig8";
    c.output = "fig8";
    c.experiment = ExperimentKind::dipole_rabi;
    c.model = waveguide(400);
    const auto pair = DipoleConfig::pair(kBoundDetuning, 0.015, Site{200, Leg::A}, 0, 4);
    c.emitters = {pair.emitter1, pair.emitter2};
    // Both pairs share the small-atom exchange period as their time window.
    c.numeric.t_final = std::numbers::pi / j12_closed_form(c.model, pair).magnitude;
    c.numeric.stride = 1.0;
    c.numeric.distances = {4, 6, 8, 10, 12};
    c.sweep = SweepSpec{"emitters.d_s", {0, 3}};
    return c;
  }
  std::string valid;
  for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset \"" + name + "\" (valid: " + valid + ")", "preset");
}

}  // namespace ladderqed
