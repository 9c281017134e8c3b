#pragma once

// Scenario configuration: a plain-text section/key format describing one
// simulation setup. Keys carry their units in the name (this parameter set
// invites W-vs-kW mistakes otherwise). Unknown sections or keys are errors.
//
// Example:
//
//   name = freeze_test
//   [initial]
//   temperature_c = 18
//   pcm_phase = liquid
//   [inlet]
//   mode = soc_trigger
//   freeze_level_c = -18
//   melt_level_c = 18
//   [run]
//   horizon_s = 6000
//
// Every omitted key keeps its default (the reference device of Table-style
// defaults in properties.hpp / geometry.hpp).

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tes/format.hpp"
#include "tes/geometry.hpp"
#include "tes/properties.hpp"

namespace tes {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelSelect { Fg, Mb, Both };
enum class ScheduleKind { SocTrigger, Segments };
enum class ScheduleStart { Freeze, Melt };

struct InletSchedule {
  ScheduleKind kind = ScheduleKind::SocTrigger;
  // soc_trigger: alternate between two levels, switching when the model's
  // SOC crosses a bound; optionally stop the run at the nth switch.
  double freeze_level = -18.0;  // degC, inlet while charging
  double melt_level = 18.0;     // degC, inlet while discharging
  double soc_low = 0.0;
  double soc_high = 1.0;
  ScheduleStart start = ScheduleStart::Freeze;
  int stop_after_toggles = 0;  // 0 = run to the horizon
  // segments: piecewise-constant levels, consecutive from t = 0.
  std::vector<double> segment_levels;     // degC
  std::vector<double> segment_durations;  // s

  double initial_level() const {
    if (kind == ScheduleKind::Segments) return segment_levels.at(0);
    return start == ScheduleStart::Freeze ? freeze_level : melt_level;
  }
};

struct InitialCondition {
  double temperature = 18.0;  // degC, uniform
  Phase pcm_phase = Phase::Liquid;
  std::vector<double> state;  // optional explicit state vector (model-specific)
  int mb_mode = 0;            // explicit mode 1..4 for the explicit state; 0 = derive
};

struct SolverSettings {
  double rel_tol = 1e-3;
  double abs_tol_enthalpy = 1e-3;  // kJ/kg
  double abs_tol_soc = 1e-6;
  double min_step = 1e-10;  // s
  double max_step = 0.0;    // s, 0 = unlimited
  double event_time_tol = 1e-6;
  int max_newton_iterations = 10;
  bool use_jacobian = true;
  double output_interval = 1.0;  // s
};

struct Scenario {
  std::string name = "scenario";
  TesGeometry geometry;
  TesMaterials materials;
  PcmProperties pcm;
  double total_mass = 1.90;  // PCM, kg
  double mdot = 0.10;        // kg/s
  double t_ambient = 18.0;   // degC
  InitialCondition initial;
  InletSchedule inlet;
  double horizon = 0.0;  // s, required
  ModelSelect model = ModelSelect::Both;
  int fg_sections = 35;
  SolverSettings solver;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline void validate_scenario(const Scenario& s) {
  std::vector<std::string> errors;
  auto expect = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };
  try {
    s.geometry.validate();
  } catch (const std::invalid_argument& e) {
    errors.emplace_back(e.what());
  }
  try {
    s.materials.validate();
  } catch (const std::invalid_argument& e) {
    errors.emplace_back(e.what());
  }
  try {
    s.pcm.validate();
  } catch (const std::invalid_argument& e) {
    errors.emplace_back(e.what());
  }
  expect(s.total_mass > 0.0 && std::isfinite(s.total_mass),
         "[pcm] total_mass_kg: must be positive");
  expect(s.mdot > 0.0 && std::isfinite(s.mdot), "[working_fluid] mdot_kg_per_s: must be positive");
  expect(std::isfinite(s.t_ambient), "[ambient] t_air_c: must be finite");
  expect(s.horizon > 0.0 && std::isfinite(s.horizon), "[run] horizon_s: must be positive");
  expect(s.fg_sections >= 1, "[run] fg_sections: must be >= 1");

  const InletSchedule& in = s.inlet;
  if (in.kind == ScheduleKind::SocTrigger) {
    expect(0.0 <= in.soc_low && in.soc_low < in.soc_high && in.soc_high <= 1.0,
           "[inlet] soc_low/soc_high: need 0 <= low < high <= 1 (got low=" +
               format_double(in.soc_low) + " high=" + format_double(in.soc_high) + ")");
    expect(in.stop_after_toggles >= 0, "[inlet] stop_after_toggles: must be >= 0");
    expect(std::isfinite(in.freeze_level) && std::isfinite(in.melt_level),
           "[inlet] freeze_level_c/melt_level_c: must be finite");
  } else {
    expect(!in.segment_levels.empty(), "[inlet] levels_c: at least one segment required");
    expect(in.segment_levels.size() == in.segment_durations.size(),
           "[inlet] levels_c/durations_s: lengths differ");
    double covered = 0.0;
    for (double d : in.segment_durations) {
      expect(d > 0.0 && std::isfinite(d), "[inlet] durations_s: every duration must be positive");
      covered += d;
    }
    if (!in.segment_durations.empty())
      expect(covered >= s.horizon,
             "[inlet] durations_s: segments cover " + format_double(covered) +
                 " s but horizon is " + format_double(s.horizon) + " s");
  }

  expect(s.initial.mb_mode == 0 || (s.initial.mb_mode >= 1 && s.initial.mb_mode <= 4),
         "[initial] mb_mode: must be 1..4");
  expect(std::isfinite(s.initial.temperature), "[initial] temperature_c: must be finite");

  const SolverSettings& sv = s.solver;
  expect(sv.rel_tol > 0.0, "[solver] rel_tol: must be positive");
  expect(sv.abs_tol_enthalpy > 0.0, "[solver] abs_tol_enthalpy_kj_per_kg: must be positive");
  expect(sv.abs_tol_soc > 0.0, "[solver] abs_tol_soc: must be positive");
  expect(sv.min_step > 0.0, "[solver] min_step_s: must be positive");
  expect(sv.max_step == 0.0 || sv.max_step >= sv.min_step,
         "[solver] max_step_s: must be 0 or >= min_step_s");
  expect(sv.event_time_tol > 0.0, "[solver] event_time_tol_s: must be positive");
  expect(sv.max_newton_iterations >= 1, "[solver] max_newton_iterations: must be >= 1");
  expect(sv.output_interval > 0.0, "[solver] output_interval_s: must be positive");

  if (!errors.empty()) {
    std::string joined = "scenario validation failed:";
    for (const std::string& e : errors) joined += "\n  - " + e;
    throw ScenarioError(joined);
  }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<double> parse_double_list(std::string_view v, const std::string& what) {
  std::vector<double> out;
  std::istringstream ss{std::string(v)};
  std::string tok;
  while (ss >> tok) out.push_back(parse_double(tok, what));
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text, const std::string& default_name) {
  Scenario s;
  s.name = default_name;
  std::string section;
  std::vector<std::string> errors;
  int line_no = 0;

  std::istringstream stream(text);
  std::string raw;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      section = std::string(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string value{detail::trim(line.substr(eq + 1))};
    const std::string where = "[" + section + "] " + key;

    auto num = [&]() { return parse_double(value, where); };
    auto integer = [&]() { return static_cast<int>(parse_long(value, where)); };
    auto choice = [&](std::initializer_list<std::string_view> allowed) {
      for (std::string_view a : allowed)
        if (value == a) return value;
      std::string msg = where + ": must be one of {";
      for (std::string_view a : allowed) msg += std::string(a) + " ";
      msg.back() = '}';
      throw ScenarioError(msg + ", got '" + value + "'");
    };

    try {
      if (section.empty() && key == "name") {
        s.name = value;
      } else if (section == "geometry") {
        if (key == "inner_radius_m") s.geometry.inner_radius = num();
        else if (key == "inner_wall_thickness_m") s.geometry.inner_wall_thickness = num();
        else if (key == "pcm_thickness_m") s.geometry.pcm_thickness = num();
        else if (key == "outer_wall_thickness_m") s.geometry.outer_wall_thickness = num();
        else if (key == "length_m") s.geometry.length = num();
        else throw ScenarioError(where + ": unknown key");
      } else if (section == "pcm") {
        if (key == "latent_heat_kj_per_kg") s.pcm.latent_heat = num();
        else if (key == "t_sat_c") s.pcm.t_sat = num();
        else if (key == "cp_solid_kj_per_kg_c") s.pcm.cp_solid = num();
        else if (key == "cp_liquid_kj_per_kg_c") s.pcm.cp_liquid = num();
        else if (key == "rho_solid_kg_per_m3") s.pcm.rho_solid = num();
        else if (key == "rho_liquid_kg_per_m3") s.pcm.rho_liquid = num();
        else if (key == "k_solid_w_per_m_c") s.pcm.k_solid = num();
        else if (key == "k_liquid_w_per_m_c") s.pcm.k_liquid = num();
        else if (key == "total_mass_kg") s.total_mass = num();
        else throw ScenarioError(where + ": unknown key");
      } else if (section == "working_fluid") {
        if (key == "cp_kj_per_kg_c") s.materials.working_fluid.cp = num();
        else if (key == "rho_kg_per_m3") s.materials.working_fluid.rho = num();
        else if (key == "h_conv_w_per_m2_c") s.materials.working_fluid.h_conv = num();
        else if (key == "mdot_kg_per_s") s.mdot = num();
        else throw ScenarioError(where + ": unknown key");
      } else if (section == "inner_wall") {
        if (key == "cp_kj_per_kg_c") s.materials.inner_wall.cp = num();
        else if (key == "rho_kg_per_m3") s.materials.inner_wall.rho = num();
        else if (key == "k_w_per_m_c") s.materials.inner_wall.k = num();
        else throw ScenarioError(where + ": unknown key");
      } else if (section == "outer_wall") {
        if (key == "cp_kj_per_kg_c") s.materials.outer_wall.cp = num();
        else if (key == "rho_kg_per_m3") s.materials.outer_wall.rho = num();
        else if (key == "k_w_per_m_c") s.materials.outer_wall.k = num();
        else if (key == "insulation_r_c_per_w") s.materials.insulation_resistance = num();
        else throw ScenarioError(where + ": unknown key");
      } else if (section == "ambient") {
        if (key == "t_air_c") s.t_ambient = num();
        else if (key == "h_conv_w_per_m2_c") s.materials.air.h_conv = num();
        else throw ScenarioError(where + ": unknown key");
      } else if (section == "initial") {
        if (key == "temperature_c") s.initial.temperature = num();
        else if (key == "pcm_phase")
          s.initial.pcm_phase = choice({"solid", "liquid"}) == "solid" ? Phase::Solid
                                                                       : Phase::Liquid;
        else if (key == "state") s.initial.state = detail::parse_double_list(value, where);
        else if (key == "mb_mode") s.initial.mb_mode = integer();
        else throw ScenarioError(where + ": unknown key");
      } else if (section == "inlet") {
        if (key == "mode")
          s.inlet.kind = choice({"soc_trigger", "segments"}) == "soc_trigger"
                             ? ScheduleKind::SocTrigger
                             : ScheduleKind::Segments;
        else if (key == "freeze_level_c") s.inlet.freeze_level = num();
        else if (key == "melt_level_c") s.inlet.melt_level = num();
        else if (key == "soc_low") s.inlet.soc_low = num();
        else if (key == "soc_high") s.inlet.soc_high = num();
        else if (key == "start")
          s.inlet.start = choice({"freeze", "melt"}) == "freeze" ? ScheduleStart::Freeze
                                                                 : ScheduleStart::Melt;
        else if (key == "stop_after_toggles") s.inlet.stop_after_toggles = integer();
        else if (key == "levels_c") s.inlet.segment_levels = detail::parse_double_list(value, where);
        else if (key == "durations_s")
          s.inlet.segment_durations = detail::parse_double_list(value, where);
        else throw ScenarioError(where + ": unknown key");
      } else if (section == "run") {
        if (key == "horizon_s") s.horizon = num();
        else if (key == "output_interval_s") s.solver.output_interval = num();
        else if (key == "model") {
          const std::string m = choice({"fg", "mb", "both"});
          s.model = m == "fg" ? ModelSelect::Fg : m == "mb" ? ModelSelect::Mb : ModelSelect::Both;
        } else if (key == "fg_sections") s.fg_sections = integer();
        else throw ScenarioError(where + ": unknown key");
      } else if (section == "solver") {
        if (key == "rel_tol") s.solver.rel_tol = num();
        else if (key == "abs_tol_enthalpy_kj_per_kg") s.solver.abs_tol_enthalpy = num();
        else if (key == "abs_tol_soc") s.solver.abs_tol_soc = num();
        else if (key == "min_step_s") s.solver.min_step = num();
        else if (key == "max_step_s") s.solver.max_step = num();
        else if (key == "event_time_tol_s") s.solver.event_time_tol = num();
        else if (key == "max_newton_iterations") s.solver.max_newton_iterations = integer();
        else if (key == "jacobian")
          s.solver.use_jacobian = choice({"finite_difference", "none"}) == "finite_difference";
        else throw ScenarioError(where + ": unknown key");
      } else {
        throw ScenarioError("line " + std::to_string(line_no) + ": unknown section [" +
                            section + "]");
      }
    } catch (const std::invalid_argument& e) {
      errors.emplace_back(e.what());
    } catch (const ScenarioError& e) {
      errors.emplace_back(e.what());
    }
  }

  if (!errors.empty()) {
    std::string joined = "scenario parse failed:";
    for (const std::string& e : errors) joined += "\n  - " + e;
    throw ScenarioError(joined);
  }
  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("load_scenario_file: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string stem = path;
  if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0)
    stem = stem.substr(0, dot);
  Scenario s = parse_scenario(buffer.str(), stem);
  validate_scenario(s);
  return s;
}

// ---------------------------------------------------------------------------
// Serialization (canonical form)
// ---------------------------------------------------------------------------

inline std::string serialize_scenario(const Scenario& s) {
  std::string out;
  auto kv = [&](std::string_view key, const std::string& value) {
    out += std::string(key) + " = " + value + "\n";
  };
  auto kvd = [&](std::string_view key, double v) { kv(key, format_double(v)); };
  auto list = [&](std::string_view key, const std::vector<double>& vs) {
    if (vs.empty()) return;
    std::string joined;
    for (std::size_t i = 0; i < vs.size(); ++i)
      joined += (i ? " " : "") + format_double(vs[i]);
    kv(key, joined);
  };

  kv("name", s.name);
  out += "\n[geometry]\n";
  kvd("inner_radius_m", s.geometry.inner_radius);
  kvd("inner_wall_thickness_m", s.geometry.inner_wall_thickness);
  kvd("pcm_thickness_m", s.geometry.pcm_thickness);
  kvd("outer_wall_thickness_m", s.geometry.outer_wall_thickness);
  kvd("length_m", s.geometry.length);
  out += "\n[pcm]\n";
  kvd("latent_heat_kj_per_kg", s.pcm.latent_heat);
  kvd("t_sat_c", s.pcm.t_sat);
  kvd("cp_solid_kj_per_kg_c", s.pcm.cp_solid);
  kvd("cp_liquid_kj_per_kg_c", s.pcm.cp_liquid);
  kvd("rho_solid_kg_per_m3", s.pcm.rho_solid);
  kvd("rho_liquid_kg_per_m3", s.pcm.rho_liquid);
  kvd("k_solid_w_per_m_c", s.pcm.k_solid);
  kvd("k_liquid_w_per_m_c", s.pcm.k_liquid);
  kvd("total_mass_kg", s.total_mass);
  out += "\n[working_fluid]\n";
  kvd("cp_kj_per_kg_c", *s.materials.working_fluid.cp);
  kvd("rho_kg_per_m3", *s.materials.working_fluid.rho);
  kvd("h_conv_w_per_m2_c", *s.materials.working_fluid.h_conv);
  kvd("mdot_kg_per_s", s.mdot);
  out += "\n[inner_wall]\n";
  kvd("cp_kj_per_kg_c", *s.materials.inner_wall.cp);
  kvd("rho_kg_per_m3", *s.materials.inner_wall.rho);
  kvd("k_w_per_m_c", *s.materials.inner_wall.k);
  out += "\n[outer_wall]\n";
  kvd("cp_kj_per_kg_c", *s.materials.outer_wall.cp);
  kvd("rho_kg_per_m3", *s.materials.outer_wall.rho);
  kvd("k_w_per_m_c", *s.materials.outer_wall.k);
  kvd("insulation_r_c_per_w", s.materials.insulation_resistance);
  out += "\n[ambient]\n";
  kvd("t_air_c", s.t_ambient);
  kvd("h_conv_w_per_m2_c", *s.materials.air.h_conv);
  out += "\n[initial]\n";
  kvd("temperature_c", s.initial.temperature);
  kv("pcm_phase", s.initial.pcm_phase == Phase::Solid ? "solid" : "liquid");
  list("state", s.initial.state);
  if (s.initial.mb_mode != 0) kv("mb_mode", std::to_string(s.initial.mb_mode));
  out += "\n[inlet]\n";
  if (s.inlet.kind == ScheduleKind::SocTrigger) {
    kv("mode", "soc_trigger");
    kvd("freeze_level_c", s.inlet.freeze_level);
    kvd("melt_level_c", s.inlet.melt_level);
    kvd("soc_low", s.inlet.soc_low);
    kvd("soc_high", s.inlet.soc_high);
    kv("start", s.inlet.start == ScheduleStart::Freeze ? "freeze" : "melt");
    kv("stop_after_toggles", std::to_string(s.inlet.stop_after_toggles));
  } else {
    kv("mode", "segments");
    list("levels_c", s.inlet.segment_levels);
    list("durations_s", s.inlet.segment_durations);
  }
  out += "\n[run]\n";
  kvd("horizon_s", s.horizon);
  kvd("output_interval_s", s.solver.output_interval);
  kv("model", s.model == ModelSelect::Fg ? "fg" : s.model == ModelSelect::Mb ? "mb" : "both");
  kv("fg_sections", std::to_string(s.fg_sections));
  out += "\n[solver]\n";
  kvd("rel_tol", s.solver.rel_tol);
  kvd("abs_tol_enthalpy_kj_per_kg", s.solver.abs_tol_enthalpy);
  kvd("abs_tol_soc", s.solver.abs_tol_soc);
  kvd("min_step_s", s.solver.min_step);
  kvd("max_step_s", s.solver.max_step);
  kvd("event_time_tol_s", s.solver.event_time_tol);
  kv("max_newton_iterations", std::to_string(s.solver.max_newton_iterations));
  kv("jacobian", s.solver.use_jacobian ? "finite_difference" : "none");
  return out;
}

}  // namespace tes
