#include "ladderqed/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ladderqed/band_structure.hpp"
#include "ladderqed/bound_states.hpp"
#include "ladderqed/chiral_theory.hpp"
#include "ladderqed/csv.hpp"
#include "ladderqed/dipole_dipole.hpp"
#include "ladderqed/errors.hpp"

#ifndef LADDERQED_VERSION
#define LADDERQED_VERSION "0.0.0"
#endif

namespace ladderqed {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string version() { return LADDERQED_VERSION; }

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::bands, "bands"},
    {ExperimentKind::chiral_emission, "chiral-emission"},
    {ExperimentKind::loss_reflection, "loss-reflection"},
    {ExperimentKind::bound_state, "bound-state"},
    {ExperimentKind::size_sweep, "size-sweep"},
    {ExperimentKind::dipole_rabi, "dipole-rabi"},
};

const std::set<std::string> kSweepFields = {
    "model.t",   "model.t_prime",    "model.phi",   "model.N",      "model.kappa",
    "emitters.g", "emitters.delta_q", "emitters.d_s", "numeric.t_final"};

// Strict reader over one JSON object; every key has to be consumed.
class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + " must be an object", path_);
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  template <class T>
  T required(const std::string& key) {
    if (!node_.contains(key)) throw ConfigError("missing required field " + field(key), field(key));
    return get<T>(key);
  }

  template <class T>
  T optional(const std::string& key, T fallback) {
    if (!node_.contains(key)) return fallback;
    return get<T>(key);
  }

  const Json& child(const std::string& key) {
    if (!node_.contains(key)) throw ConfigError("missing required field " + field(key), field(key));
    seen_.insert(key);
    return node_.at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key()))
        throw ConfigError("unknown field " + field(it.key()), field(it.key()));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  template <class T>
  T get(const std::string& key) {
    seen_.insert(key);
    const Json& v = node_.at(key);
    try {
      if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw ConfigError("field " + field(key) + " must be an integer", field(key));
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("field " + field(key) + " must be a number", field(key));
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("field " + field(key) + " must be a boolean", field(key));
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("field " + field(key) + " must be a string", field(key));
      }
      return v.get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError("field " + field(key) + ": " + e.what(), field(key));
    }
  }

  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

Leg leg_from_string(const std::string& s, const std::string& field) {
  if (s == "A") return Leg::A;
  if (s == "B") return Leg::B;
  throw ConfigError("field " + field + " must be \"A\" or \"B\"", field);
}

Boundary boundary_from_string(const std::string& s, const std::string& field) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw ConfigError("field " + field + " must be \"open\" or \"periodic\"", field);
}

LadderParams parse_model(const Json& node) {
  Reader r(node, "model");
  LadderParams p;
  p.t = r.required<double>("t");
  p.t_prime = r.required<double>("t_prime");
  p.phi = r.required<double>("phi");
  p.N = r.required<int>("N");
  p.boundary = boundary_from_string(r.optional<std::string>("boundary", "open"), "model.boundary");
  p.kappa = r.optional<double>("kappa", 0.0);
  r.finish();
  return p;
}

EmitterSpec parse_emitter(const Json& node, const std::string& path) {
  Reader r(node, path);
  EmitterSpec e;
  e.delta_q = r.required<double>("delta_q");
  e.g = r.required<double>("g");
  const Json& pts = r.child("points");
  if (!pts.is_array() || pts.empty())
    throw ConfigError("field " + path + ".points must be a non-empty array", path + ".points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string pp = path + ".points." + std::to_string(i);
    Reader pr(pts[i], pp);
    Site s;
    s.x = pr.required<int>("x");
    s.leg = leg_from_string(pr.optional<std::string>("leg", "A"), pp + ".leg");
    pr.finish();
    e.points.push_back(s);
  }
  r.finish();
  return e;
}

template <class T>
std::vector<T> parse_list(const Json& node, const std::string& field) {
  if (!node.is_array()) throw ConfigError("field " + field + " must be an array", field);
  std::vector<T> out;
  for (const auto& v : node) {
    if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw ConfigError("field " + field + " must hold integers", field);
    } else {
      if (!v.is_number()) throw ConfigError("field " + field + " must hold numbers", field);
    }
    out.push_back(v.get<T>());
  }
  return out;
}

NumericOptions parse_numeric(const Json& node) {
  Reader r(node, "numeric");
  NumericOptions n;
  n.stride = r.optional("stride", n.stride);
  n.t_final = r.optional("t_final", n.t_final);
  n.fit_from = r.optional("fit_from", n.fit_from);
  n.band_points = r.optional("band_points", n.band_points);
  n.quadrature_points = r.optional("quadrature_points", n.quadrature_points);
  if (r.has("snapshot_times")) n.snapshot_times = parse_list<double>(r.child("snapshot_times"), "numeric.snapshot_times");
  n.d_max = r.optional("d_max", n.d_max);
  if (r.has("delta_q_values")) n.delta_q_values = parse_list<double>(r.child("delta_q_values"), "numeric.delta_q_values");
  n.dynamics = r.optional("dynamics", n.dynamics);
  n.plateau_from = r.optional("plateau_from", n.plateau_from);
  n.profile = r.optional("profile", n.profile);
  if (r.has("distances")) n.distances = parse_list<int>(r.child("distances"), "numeric.distances");
  n.simulate_distances = r.optional("simulate_distances", n.simulate_distances);
  n.max_step_norm = r.optional("max_step_norm", n.max_step_norm);
  n.series_tolerance = r.optional("series_tolerance", n.series_tolerance);
  r.finish();
  return n;
}

Json emitter_json(const EmitterSpec& e) {
  Json pts = Json::array();
  for (const auto& p : e.points) pts.push_back({{"x", p.x}, {"leg", to_string(p.leg)}});
  return {{"delta_q", e.delta_q}, {"g", e.g}, {"points", pts}};
}

Json config_json(const ExperimentConfig& c) {
  Json j;
  j["name"] = c.name;
  j["experiment"] = to_string(c.experiment);
  j["model"] = {{"t", c.model.t},
                {"t_prime", c.model.t_prime},
                {"phi", c.model.phi},
                {"N", c.model.N},
                {"boundary", to_string(c.model.boundary)},
                {"kappa", c.model.kappa}};
  j["emitters"] = Json::array();
  for (const auto& e : c.emitters) j["emitters"].push_back(emitter_json(e));
  const auto& n = c.numeric;
  j["numeric"] = {{"stride", n.stride},
                  {"t_final", n.t_final},
                  {"fit_from", n.fit_from},
                  {"band_points", n.band_points},
                  {"quadrature_points", n.quadrature_points},
                  {"snapshot_times", n.snapshot_times},
                  {"d_max", n.d_max},
                  {"delta_q_values", n.delta_q_values},
                  {"dynamics", n.dynamics},
                  {"plateau_from", n.plateau_from},
                  {"profile", n.profile},
                  {"distances", n.distances},
                  {"simulate_distances", n.simulate_distances},
                  {"max_step_norm", n.max_step_norm},
                  {"series_tolerance", n.series_tolerance}};
  if (c.sweep) j["sweep"] = {{"field", c.sweep->field}, {"values", c.sweep->values}};
  j["output"] = c.output;
  return j;
}

ExperimentConfig config_from_json(const Json& root) {
  Reader r(root, "");
  ExperimentConfig c;
  c.name = r.optional<std::string>("name", "");
  c.experiment = experiment_from_string(r.required<std::string>("experiment"));
  c.model = parse_model(r.child("model"));
  if (r.has("emitters")) {
    const Json& list = r.child("emitters");
    if (!list.is_array()) throw ConfigError("field emitters must be an array", "emitters");
    for (std::size_t i = 0; i < list.size(); ++i)
      c.emitters.push_back(parse_emitter(list[i], "emitters." + std::to_string(i)));
  }
  if (r.has("numeric")) c.numeric = parse_numeric(r.child("numeric"));
  if (r.has("sweep")) {
    Reader s(r.child("sweep"), "sweep");
    SweepSpec spec;
    spec.field = s.required<std::string>("field");
    spec.values = parse_list<double>(s.child("values"), "sweep.values");
    s.finish();
    c.sweep = spec;
  }
  c.output = r.optional<std::string>("output", c.output);
  r.finish();
  c.validate();
  return c;
}

PropagatorOptions propagator_options(const NumericOptions& n) {
  PropagatorOptions o;
  o.max_step_norm = n.max_step_norm;
  o.series_tolerance = n.series_tolerance;
  return o;
}

// -- experiment runners ------------------------------------------------------

struct Context {
  const ExperimentConfig& config;
  fs::path dir;
  RunReport& report;
  Json derived = Json::object();

  CsvWriter csv(const std::string& file, std::vector<std::string> header) {
    report.files.push_back(dir / file);
    return CsvWriter(dir / file, std::move(header));
  }
  void set(const std::string& key, double value) {
    derived[key] = value;
    report.derived[key] = value;
  }
  void warn(const std::string& message) { report.warnings.push_back(message); }
};

void record_band_constants(Context& ctx) {
  const auto& p = ctx.config.model;
  const auto m = find_band_minima(p);
  ctx.set("eta", p.eta());
  ctx.set("k_min", m.k_min);
  ctx.set("E_min", m.E_min);
  ctx.set("alpha", m.alpha);
  if (!ctx.config.emitters.empty()) {
    const double d0 = m.E_min - ctx.config.emitters.front().delta_q;
    if (d0 > 0.0) ctx.set("Delta_0", d0);
  }
}

void write_field(Context& ctx, const std::string& file, const FieldSnapshot& field) {
  auto out = ctx.csv(file, {"x", "leg", "intensity"});
  for (std::size_t x = 0; x < field.leg_A.size(); ++x) out.row({static_cast<long>(x), std::string("A"), field.leg_A[x]});
  for (std::size_t x = 0; x < field.leg_B.size(); ++x) out.row({static_cast<long>(x), std::string("B"), field.leg_B[x]});
}

// Markovian rates at the resonance with the largest k, if any.
std::optional<DecayRates> record_rates(Context& ctx, const EmitterSpec& e) {
  const auto& p = ctx.config.model;
  const auto roots = resonant_momenta(p, e.delta_q);
  if (roots.empty()) return std::nullopt;
  try {
    const auto rates = decay_rates(p, roots.back(), e.g);
    ctx.set("k_r", rates.k_r);
    ctx.set("v_g", rates.v_g);
    ctx.set("Gamma_A_plus", rates.gamma_A_plus);
    ctx.set("Gamma_A_minus", rates.gamma_A_minus);
    ctx.set("Gamma_B_plus", rates.gamma_B_plus);
    ctx.set("Gamma_B_minus", rates.gamma_B_minus);
    ctx.set("Gamma_tot", rates.total());
    ctx.set("C_rates", chiral_factor_from_rates(rates));
    ctx.set("C_closed_form", chiral_factor_closed_form(p, rates.k_r));
    ctx.set("markov_validity", markov_validity(p, rates, e.delta_q));
    return rates;
  } catch (const BandEdgeError& err) {
    ctx.warn(err.what());
    return std::nullopt;
  }
}

void run_bands(Context& ctx) {
  const auto& c = ctx.config;
  std::optional<double> dq;
  if (!c.emitters.empty()) dq = c.emitters.front().delta_q;
  const auto summary = summarize_bands(c.model, c.numeric.band_points, dq);
  {
    auto out = ctx.csv("bands.csv", {"k", "E_minus", "E_plus", "theta", "sigma_z_minus"});
    for (std::size_t i = 0; i < summary.k_grid.size(); ++i)
      out.row({summary.k_grid[i], summary.E_minus[i], summary.E_plus[i], summary.theta[i],
               summary.sigma_z_minus[i]});
  }
  {
    auto out = ctx.csv("minima.csv", {"k_min", "E_min", "alpha", "two_minima"});
    out.row({summary.minima.k_min, summary.minima.E_min, summary.minima.alpha,
             static_cast<long>(summary.minima.two_minima)});
  }
  {
    auto out = ctx.csv("rates.csv", {"k_r", "v_g", "Gamma_A_plus", "Gamma_A_minus", "Gamma_B_plus",
                                     "Gamma_B_minus", "C", "C_closed_form"});
    for (const auto& row : decay_rate_sweep(c.model, 0.0, std::numbers::pi, c.numeric.band_points))
      out.row({row.k_r, row.v_g, row.unit_rates.gamma_A_plus, row.unit_rates.gamma_A_minus,
               row.unit_rates.gamma_B_plus, row.unit_rates.gamma_B_minus, row.chiral_factor,
               row.chiral_factor_closed});
  }
  if (dq) {
    auto out = ctx.csv("resonances.csv", {"k", "group_velocity"});
    for (const auto& r : summary.resonances) out.row({r.k, r.group_velocity});
    record_rates(ctx, c.emitters.front());
  }
  record_band_constants(ctx);
}

void run_chiral_emission(Context& ctx) {
  const auto& c = ctx.config;
  const auto& e = c.emitters.front();
  record_band_constants(ctx);
  const auto rates = record_rates(ctx, e);
  const auto result = emission_run(c.model, e, c.numeric.t_final, c.numeric.stride, c.numeric.fit_from,
                                   propagator_options(c.numeric));
  {
    auto out = ctx.csv("trajectory.csv", {"time", "population_0", "field_norm"});
    for (const auto& p : result.trajectory) out.row({p.time, p.emitter_populations.front(), p.field_norm});
  }
  write_field(ctx, "field.csv", result.final_field);
  const auto& ch = result.chirality;
  ctx.set("phi_A_plus", ch.phi_A_plus);
  ctx.set("phi_A_minus", ch.phi_A_minus);
  ctx.set("phi_B_plus", ch.phi_B_plus);
  ctx.set("phi_B_minus", ch.phi_B_minus);
  ctx.set("C_numeric", ch.C_numeric);
  ctx.set("fitted_rate", result.fitted_rate);
  if (rates) ctx.set("expected_rate", 2.0 * rates->total());
  ctx.set("final_population", result.trajectory.back().emitter_populations.front());
  if (c.model.kappa == 0.0) ctx.set("max_norm_drift", result.max_norm_drift);
}

void run_loss_reflection(Context& ctx) {
  const auto& c = ctx.config;
  const auto& e = c.emitters.front();
  record_band_constants(ctx);
  record_rates(ctx, e);
  const auto result = reflection_experiment(c.model, e, c.numeric.t_final, c.model.kappa,
                                            c.numeric.snapshot_times, propagator_options(c.numeric));
  auto sides = ctx.csv("sides.csv", {"time", "phi_A_plus", "phi_A_minus", "phi_B_plus", "phi_B_minus",
                                     "C_numeric"});
  for (const auto& s : result.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "field_t%g.csv", s.time);
    write_field(ctx, name, s.field);
    sides.row({s.time, s.sides.phi_A_plus, s.sides.phi_A_minus, s.sides.phi_B_plus, s.sides.phi_B_minus,
               s.sides.C_numeric});
    char key[64];
    std::snprintf(key, sizeof key, "C_numeric_t%g", s.time);
    ctx.set(key, s.sides.C_numeric);
  }
  const auto& last = result.snapshots.back().sides;
  ctx.set("final_phi_A_plus", last.phi_A_plus);
  ctx.set("final_phi_B_plus", last.phi_B_plus);
  ctx.set("wall_arrival_time", result.wall_arrival_time);
  ctx.set("reached_wall", result.reached_wall ? 1.0 : 0.0);
  if (!result.reached_wall) ctx.warn("run ended before the emitted front reached the right wall");
}

QuadratureOptions quadrature_options(const NumericOptions& n) {
  QuadratureOptions q;
  q.points = n.quadrature_points;
  return q;
}

void run_bound_state(Context& ctx) {
  const auto& c = ctx.config;
  const auto& e = c.emitters.front();
  record_band_constants(ctx);
  BoundStateOptions opts;
  opts.compute_quadrature = true;
  opts.compute_profile = c.numeric.profile;
  opts.quadrature = quadrature_options(c.numeric);
  const auto r = steady_population(c.model, e, opts);
  ctx.set("G_kmin", r.G_kmin);
  ctx.set("pole_y", r.pole_y);
  ctx.set("residue", r.residue);
  ctx.set("steady_population", r.steady_population);
  ctx.set("pole_y_quadrature", r.pole_y_quadrature);
  ctx.set("steady_population_quadrature", r.steady_population_quadrature);
  if (r.profile) {
    ctx.set("bound_energy", r.profile->energy);
    ctx.set("bound_emitter_weight", r.profile->emitter_weight);
    ctx.set("steady_population_lattice", r.profile->emitter_weight * r.profile->emitter_weight);
    write_field(ctx, "profile.csv", r.profile->field);
  }
  if (c.numeric.dynamics) {
    const System system = assemble_system(c.model, {e});
    auto out = ctx.csv("trajectory.csv", {"time", "population_0", "field_norm"});
    double sum = 0.0;
    long count = 0;
    propagate(
        system, SystemState::excited(system), c.numeric.t_final, c.numeric.stride,
        [&](const SystemState& s) {
          const double p = s.emitter_population(0);
          out.row({s.time, p, s.field_norm_squared()});
          if (s.time >= c.numeric.plateau_from - 1e-9) {
            sum += p;
            ++count;
          }
        },
        propagator_options(c.numeric));
    if (count > 0) ctx.set("plateau_population", sum / static_cast<double>(count));
    else ctx.warn("plateau window is empty; increase t_final or lower plateau_from");
  }
}

void run_size_sweep(Context& ctx) {
  const auto& c = ctx.config;
  const auto& e = c.emitters.front();
  record_band_constants(ctx);
  const auto result = size_sweep(c.model, e, c.numeric.d_max);
  {
    auto out = ctx.csv("size_sweep.csv", {"d_s", "G_kmin", "pole_y", "steady_population"});
    for (const auto& p : result.points) out.row({static_cast<long>(p.d_s), p.G_kmin, p.pole_y, p.steady_population});
  }
  ctx.set("contrast", result.contrast);
  ctx.set("period", result.period);
  Json maxima = result.local_maxima, minima = result.local_minima;
  ctx.derived["local_maxima"] = maxima;
  ctx.derived["local_minima"] = minima;
  if (!c.numeric.delta_q_values.empty()) {
    auto out = ctx.csv("contrast.csv", {"delta_q", "min_population", "max_population", "contrast"});
    for (double dq : c.numeric.delta_q_values) {
      EmitterSpec shifted = e;
      shifted.delta_q = dq;
      const auto s = size_sweep(c.model, shifted, c.numeric.d_max);
      double lo = 1.0, hi = 0.0;
      for (const auto& p : s.points) {
        lo = std::min(lo, p.steady_population);
        hi = std::max(hi, p.steady_population);
      }
      out.row({dq, lo, hi, s.contrast});
    }
  }
}

void run_dipole_rabi(Context& ctx) {
  const auto& c = ctx.config;
  DipoleConfig pair{c.emitters[0], c.emitters[1]};
  record_band_constants(ctx);
  RabiOptions opts;
  opts.t_final = c.numeric.t_final;
  opts.stride = c.numeric.stride;
  opts.propagator = propagator_options(c.numeric);
  const auto r = rabi_simulation(c.model, pair, opts);
  {
    auto out = ctx.csv("rabi.csv", {"time", "P1", "P2", "field_norm", "P2_model"});
    for (std::size_t i = 0; i < r.times.size(); ++i)
      out.row({r.times[i], r.P1[i], r.P2[i], r.field_norm[i],
               effective_two_emitter_model(r.J12_closed, r.times[i])});
  }
  ctx.set("D_q", pair.D_q());
  ctx.set("J12_closed", r.J12_closed);
  ctx.set("J12_sign", r.J12_sign);
  ctx.set("J12_fit", r.J12_fit);
  if (r.J12_fit > 0.0) ctx.set("J12_relative_error", r.J12_closed > 0.0 ? std::abs(r.J12_fit - r.J12_closed) / r.J12_closed : 0.0);
  ctx.set("fit_amplitude", r.fit_amplitude);
  ctx.set("fit_window", r.fit_window);
  ctx.set("max_P2", r.max_P2);
  ctx.set("max_field_norm", r.max_field_norm);
  ctx.set("perturbative", r.perturbative ? 1.0 : 0.0);
  if (!r.warning.empty()) ctx.warn(r.warning);
  if (!c.numeric.distances.empty()) {
    const auto& e = c.emitters[0];
    const auto sweep = j12_distance_sweep(c.model, e.delta_q, e.g, e.points.front(), e.size(),
                                          c.numeric.distances, c.numeric.simulate_distances, opts);
    auto out = ctx.csv("distances.csv", {"D_q", "J12_closed", "J12_fit"});
    for (const auto& row : sweep.rows) out.row({static_cast<long>(row.D_q), row.J12_closed, row.J12_fit});
    ctx.set("slope_closed", sweep.slope_closed);
    ctx.set("slope_expected", sweep.expected_slope);
    if (c.numeric.simulate_distances) ctx.set("slope_fit", sweep.slope_fit);
  }
}

void write_manifest(const fs::path& dir, const ExperimentConfig& config, const Json& derived,
                    const RunReport& report, double seconds, const Json& extra = {}) {
  Json m;
  m["tool"] = "ladderqed";
  m["version"] = version();
  m["config"] = config_json(config);
  m["derived"] = derived;
  Json files = Json::array();
  for (const auto& f : report.files) files.push_back(fs::relative(f, dir).generic_string());
  m["files"] = files;
  m["warnings"] = report.warnings;
  if (!extra.is_null()) m["runs"] = extra;
  m["wall_clock_seconds"] = seconds;
  fs::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << m.dump(2) << '\n';
  if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
}

std::string sweep_label(const std::string& field, double value) {
  const auto dot = field.rfind('.');
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.10g", field.substr(dot + 1).c_str(), value);
  return buf;
}

RunReport run_single(const ExperimentConfig& config, const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.directory = dir;
  fs::create_directories(dir);
  Context ctx{config, dir, report};
  switch (config.experiment) {
    case ExperimentKind::bands: run_bands(ctx); break;
    case ExperimentKind::chiral_emission: run_chiral_emission(ctx); break;
    case ExperimentKind::loss_reflection: run_loss_reflection(ctx); break;
    case ExperimentKind::bound_state: run_bound_state(ctx); break;
    case ExperimentKind::size_sweep: run_size_sweep(ctx); break;
    case ExperimentKind::dipole_rabi: run_dipole_rabi(ctx); break;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(dir, config, ctx.derived, report, seconds);
  report.files.push_back(dir / "manifest.json");
  return report;
}

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "?";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& k : kKinds)
    if (name == k.name) return k.kind;
  std::string valid;
  for (const auto& k : kKinds) valid += std::string(valid.empty() ? "" : ", ") + k.name;
  throw ConfigError("unknown experiment \"" + name + "\" (valid: " + valid + ")", "experiment");
}

void ExperimentConfig::validate() const {
  try {
    model.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what(), "model");
  }
  for (std::size_t i = 0; i < emitters.size(); ++i) {
    try {
      emitters[i].validate(model.N);
    } catch (const Error& e) {
      throw ConfigError(e.what(), "emitters." + std::to_string(i));
    }
  }
  const auto need = [&](std::size_t n, const char* what) {
    if (emitters.size() != n)
      throw ConfigError(std::string(to_string(experiment)) + " needs exactly " + std::to_string(n) + " " + what,
                        "emitters");
  };
  switch (experiment) {
    case ExperimentKind::bands:
      if (emitters.size() > 1) throw ConfigError("bands uses at most one emitter", "emitters");
      break;
    case ExperimentKind::chiral_emission:
    case ExperimentKind::loss_reflection:
    case ExperimentKind::bound_state:
      need(1, "emitter");
      break;
    case ExperimentKind::size_sweep:
      need(1, "emitter");
      if (emitters[0].points.size() != 2)
        throw ConfigError("size-sweep needs a two-point emitter template", "emitters.0.points");
      break;
    case ExperimentKind::dipole_rabi: {
      need(2, "emitters");
      try {
        DipoleConfig{emitters[0], emitters[1]}.validate(model.N);
      } catch (const Error& e) {
        throw ConfigError(e.what(), "emitters");
      }
      break;
    }
  }
  if (experiment == ExperimentKind::loss_reflection && model.boundary != Boundary::open)
    throw ConfigError("loss-reflection needs an open boundary", "model.boundary");
  const auto& n = numeric;
  if (!(n.stride > 0.0)) throw ConfigError("field numeric.stride must be > 0", "numeric.stride");
  if (!(n.t_final > 0.0) && experiment != ExperimentKind::dipole_rabi)
    throw ConfigError("field numeric.t_final must be > 0", "numeric.t_final");
  if (n.band_points < 2) throw ConfigError("field numeric.band_points must be >= 2", "numeric.band_points");
  if (n.quadrature_points < 3)
    throw ConfigError("field numeric.quadrature_points must be >= 3", "numeric.quadrature_points");
  if (n.d_max < 0) throw ConfigError("field numeric.d_max must be >= 0", "numeric.d_max");
  if (!(n.max_step_norm > 0.0)) throw ConfigError("field numeric.max_step_norm must be > 0", "numeric.max_step_norm");
  if (!(n.series_tolerance > 0.0))
    throw ConfigError("field numeric.series_tolerance must be > 0", "numeric.series_tolerance");
  for (double t : n.snapshot_times)
    if (!(t > 0.0) || t > n.t_final)
      throw ConfigError("numeric.snapshot_times must lie in (0, t_final]", "numeric.snapshot_times");
  if (sweep) {
    if (!kSweepFields.count(sweep->field)) {
      std::string valid;
      for (const auto& f : kSweepFields) valid += (valid.empty() ? "" : ", ") + f;
      throw ConfigError("cannot sweep " + sweep->field + " (valid: " + valid + ")", "sweep.field");
    }
    if (sweep->values.empty()) throw ConfigError("sweep.values must not be empty", "sweep.values");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(root);
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& config, int indent) { return config_json(config).dump(indent); }

ExperimentConfig with_override(const ExperimentConfig& config, const std::string& field,
                               const std::string& value) {
  Json root = config_json(config);
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const Json::parse_error&) {
    parsed = value;
  }
  std::string pointer;
  std::stringstream ss(field);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("malformed field path " + field, field);
    pointer += "/" + part;
  }
  try {
    root[Json::json_pointer(pointer)] = parsed;
  } catch (const Json::exception& e) {
    throw ConfigError("cannot set " + field + ": " + e.what(), field);
  }
  return config_from_json(root);
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& config, const std::string& field, double value) {
  ExperimentConfig c = config;
  c.sweep.reset();
  if (field == "model.t") c.model.t = value;
  else if (field == "model.t_prime") c.model.t_prime = value;
  else if (field == "model.phi") c.model.phi = value;
  else if (field == "model.N") c.model.N = static_cast<int>(std::lround(value));
  else if (field == "model.kappa") c.model.kappa = value;
  else if (field == "numeric.t_final") c.numeric.t_final = value;
  else if (field == "emitters.g") for (auto& e : c.emitters) e.g = value;
  else if (field == "emitters.delta_q") for (auto& e : c.emitters) e.delta_q = value;
  else if (field == "emitters.d_s") {
    const int d = static_cast<int>(std::lround(value));
    for (auto& e : c.emitters) {
      if (e.points.size() != 2) throw ConfigError("emitters.d_s sweep needs two-point emitters", "sweep.field");
      e.points[1] = Site{e.points[0].x + d, e.points[0].leg};
    }
  } else {
    throw ConfigError("cannot sweep " + field, "sweep.field");
  }
  c.validate();
  return c;
}

RunReport run(const ExperimentConfig& config, const fs::path& output_root) {
  config.validate();
  const fs::path dir = output_root.empty() ? fs::path(config.output) : output_root / config.output;
  if (!config.sweep) return run_single(config, dir);

  const auto start = std::chrono::steady_clock::now();
  const auto& sweep = *config.sweep;
  std::vector<ExperimentConfig> configs;
  for (double v : sweep.values) configs.push_back(apply_sweep_value(config, sweep.field, v));

  RunReport report;
  report.directory = dir;
  report.children.resize(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        report.children[i] = run_single(configs[i], dir / sweep_label(sweep.field, sweep.values[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::max<std::size_t>(1, std::min<std::size_t>(configs.size(), std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  Json runs = Json::array();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    Json derived = Json::object();
    for (const auto& [k, v] : report.children[i].derived) derived[k] = v;
    runs.push_back({{"value", sweep.values[i]},
                    {"directory", fs::relative(report.children[i].directory, dir).generic_string()},
                    {"derived", derived}});
    for (const auto& w : report.children[i].warnings) report.warnings.push_back(w);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(dir, config, Json::object(), report, seconds, runs);
  report.files.push_back(dir / "manifest.json");
  return report;
}

}  // namespace ladderqed
