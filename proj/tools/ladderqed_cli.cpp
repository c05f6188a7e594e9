// ladderqed: command-line front end for the preset and free-form experiments.
//
//   ladderqed preset fig3
//   ladderqed emit --g 3 --t-final 200
//   ladderqed bound --config my.json --set numeric.t_final=2000
//
// LADDERQED_OUTPUT_ROOT, when set, prefixes every output directory.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ladderqed/errors.hpp"
#include "ladderqed/experiment.hpp"

namespace {

using ladderqed::ExperimentConfig;
using Json = nlohmann::ordered_json;

struct Overrides {
  std::optional<std::string> config_file;
  std::vector<std::string> sets;
  std::optional<double> t, t_prime, phi, kappa, g, delta_q, t_final, stride;
  std::optional<int> N, quadrature_points, d_max;
  std::optional<std::string> boundary, output, sweep;
  bool no_sweep = false;
  bool dump_config = false;
};

void add_override_flags(CLI::App* app, Overrides& o, bool with_config) {
  if (with_config) app->add_option("-c,--config", o.config_file, "JSON experiment config");
  app->add_option("--set", o.sets, "override any field, e.g. --set model.t=3 (repeatable)");
  app->add_option("--t", o.t, "leg hopping t");
  app->add_option("--t-prime", o.t_prime, "rung hopping t'");
  app->add_option("--phi", o.phi, "Peierls phase per hop");
  app->add_option("--N", o.N, "number of rungs");
  app->add_option("--boundary", o.boundary, "open or periodic");
  app->add_option("--kappa", o.kappa, "per-site photon loss rate");
  app->add_option("--g", o.g, "coupling per point (all emitters)");
  app->add_option("--delta-q", o.delta_q, "emitter detuning (all emitters)");
  app->add_option("--t-final", o.t_final, "propagation time");
  app->add_option("--stride", o.stride, "sampling interval");
  app->add_option("--quadrature-points", o.quadrature_points, "self-energy quadrature samples");
  app->add_option("--d-max", o.d_max, "largest emitter size in a size sweep");
  app->add_option("-o,--output", o.output, "output directory (below the output root)");
  app->add_option("--sweep", o.sweep, "FIELD=v1,v2,... run one job per value");
  app->add_flag("--no-sweep", o.no_sweep, "drop the preset's sweep");
  app->add_flag("--dump-config", o.dump_config, "print the resolved config and exit");
}

template <class T>
std::string literal(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) return Json(v).dump();
  else {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
  }
}

ExperimentConfig apply(ExperimentConfig c, const Overrides& o) {
  auto set = [&](const std::string& field, const std::string& value) {
    c = ladderqed::with_override(c, field, value);
  };
  auto each_emitter = [&](const std::string& key, double v) {
    for (std::size_t i = 0; i < c.emitters.size(); ++i)
      set("emitters." + std::to_string(i) + "." + key, literal(v));
  };
  if (o.no_sweep) c.sweep.reset();
  if (o.t) set("model.t", literal(*o.t));
  if (o.t_prime) set("model.t_prime", literal(*o.t_prime));
  if (o.phi) set("model.phi", literal(*o.phi));
  if (o.N) set("model.N", literal(*o.N));
  if (o.boundary) set("model.boundary", literal(*o.boundary));
  if (o.kappa) set("model.kappa", literal(*o.kappa));
  if (o.g) each_emitter("g", *o.g);
  if (o.delta_q) each_emitter("delta_q", *o.delta_q);
  if (o.t_final) set("numeric.t_final", literal(*o.t_final));
  if (o.stride) set("numeric.stride", literal(*o.stride));
  if (o.quadrature_points) set("numeric.quadrature_points", literal(*o.quadrature_points));
  if (o.d_max) set("numeric.d_max", literal(*o.d_max));
  if (o.output) set("output", literal(*o.output));
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ladderqed::ConfigError("--set expects FIELD=VALUE, got " + s, s);
    set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.sweep) {
    const auto eq = o.sweep->find('=');
    if (eq == std::string::npos) throw ladderqed::ConfigError("--sweep expects FIELD=v1,v2,...", "sweep");
    Json values = Json::array();
    std::stringstream ss(o.sweep->substr(eq + 1));
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ladderqed::ConfigError("sweep value \"" + item + "\" is not a number", "sweep.values");
      }
    }
    const Json spec = {{"field", o.sweep->substr(0, eq)}, {"values", values}};
    set("sweep", spec.dump());
  }
  return c;
}

Json report_json(const ladderqed::RunReport& r) {
  Json j;
  j["directory"] = r.directory.generic_string();
  Json derived = Json::object();
  for (const auto& [k, v] : r.derived) derived[k] = v;
  j["derived"] = derived;
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  if (!r.children.empty()) {
    j["runs"] = Json::array();
    for (const auto& c : r.children) j["runs"].push_back(report_json(c));
  }
  return j;
}

int fail(const char* kind, const std::string& message, const std::string& field = {}) {
  Json err = {{"error", kind}, {"message", message}};
  if (!field.empty()) err["field"] = field;
  std::cerr << err.dump() << '\n';
  return kind == std::string("config") ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chiral emission and bound states in a Hofstadter-ladder waveguide", "ladderqed"};
  app.set_version_flag("--version", ladderqed::version());
  app.require_subcommand(1);

  // Subcommand -> (experiment, default preset when no --config is given).
  const std::vector<std::tuple<std::string, std::string, std::string, std::string>> commands = {
      {"bands", "bands", "fig2", "band structure, minima and Markovian rate curves"},
      {"emit", "chiral-emission", "fig3", "small-emitter spontaneous emission"},
      {"reflect", "loss-reflection", "fig4", "emission with loss and hard-wall reflection"},
      {"bound", "bound-state", "fig6", "bound state of an emitter below the band"},
      {"sweep-size", "size-sweep", "fig7", "trapped population against giant-atom size"},
      {"rabi", "dipole-rabi", "fig8", "exchange between two emitters below the band"},
  };

  std::map<std::string, Overrides> overrides;
  for (const auto& [name, kind, fig, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_override_flags(sub, overrides[name], true);
  }
  std::string preset_name;
  auto* preset_cmd = app.add_subcommand("preset", "run a figure preset");
  preset_cmd->add_option("name", preset_name, "fig2, fig3, fig4, fig6, fig7 or fig8")->required();
  add_override_flags(preset_cmd, overrides["preset"], false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what());
  }

  try {
    ExperimentConfig config;
    const Overrides* o = nullptr;
    if (preset_cmd->parsed()) {
      o = &overrides["preset"];
      config = ladderqed::preset(preset_name);
    } else {
      for (const auto& [name, kind, fig, help] : commands) {
        if (!app.got_subcommand(name)) continue;
        o = &overrides[name];
        if (o->config_file) {
          config = ladderqed::load_config(*o->config_file);
        } else {
          config = ladderqed::preset(fig);
          config.sweep.reset();
        }
        config = ladderqed::with_override(config, "experiment", Json(kind).dump());
      }
    }
    config = apply(std::move(config), *o);
    if (o->dump_config) {
      std::cout << ladderqed::to_json(config) << '\n';
      return 0;
    }
    const char* root = std::getenv("LADDERQED_OUTPUT_ROOT");
    const auto report = ladderqed::run(config, root ? std::filesystem::path(root) : std::filesystem::path{});
    std::cout << report_json(report).dump(2) << '\n';
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
  } catch (const ladderqed::ConfigError& e) {
    return fail("config", e.what(), e.field());
  } catch (const ladderqed::Error& e) {
    return fail("runtime", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
