#pragma once

// Thermophysical property records and the enthalpy / temperature / phase
// relations used by both storage models.
//
// Unit conventions, used throughout the library: energy in kJ, mass in kg,
// temperature in degC, time in s, length in m. Conductivities k and film
// coefficients h_conv are stored in their tabulated W-based units and
// converted to kW once, at resistance assembly (see geometry.hpp), so that
// every power in the thermal network comes out in kW.
//
// PCM enthalpy datum: saturated solid at h = 0, saturated liquid at
// h = latent_heat. Between those two values the material sits at t_sat.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace tes {

enum class Phase { Solid, Liquid };

inline const char* phase_name(Phase p) {
  return p == Phase::Solid ? "solid" : "liquid";
}

/// Constants of the phase-change material.
struct PcmProperties {
  double latent_heat = 334.0;  // kJ/kg
  double t_sat = 0.0;          // degC
  double cp_solid = 2.11;      // kJ/(kg*degC)
  double cp_liquid = 4.18;     // kJ/(kg*degC)
  double rho_solid = 916.0;    // kg/m^3
  double rho_liquid = 1000.0;  // kg/m^3
  double k_solid = 2.3;        // W/(m*degC)
  double k_liquid = 0.58;      // W/(m*degC)

  double cp(Phase p) const { return p == Phase::Solid ? cp_solid : cp_liquid; }
  double rho(Phase p) const { return p == Phase::Solid ? rho_solid : rho_liquid; }
  double k(Phase p) const { return p == Phase::Solid ? k_solid : k_liquid; }

  void validate() const {
    auto positive = [](double v, const char* field) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("PcmProperties: ") + field +
                                    " must be positive and finite");
    };
    positive(latent_heat, "latent_heat");
    positive(cp_solid, "cp_solid");
    positive(cp_liquid, "cp_liquid");
    positive(rho_solid, "rho_solid");
    positive(rho_liquid, "rho_liquid");
    positive(k_solid, "k_solid");
    positive(k_liquid, "k_liquid");
    if (!std::isfinite(t_sat))
      throw std::invalid_argument("PcmProperties: t_sat must be finite");
  }
};

/// Single-phase material (pipe walls, working fluid, ambient air). Only the
/// fields a given material actually uses need to be present.
struct MaterialProperties {
  std::optional<double> cp;      // kJ/(kg*degC)
  std::optional<double> rho;     // kg/m^3
  std::optional<double> k;       // W/(m*degC)
  std::optional<double> h_conv;  // W/(m^2*degC)

  /// Checks that every present field is positive and finite. `name` tags the
  /// error message with the material's role.
  void validate(const std::string& name) const {
    auto check = [&](const std::optional<double>& v, const char* field) {
      if (v && (!(*v > 0.0) || !std::isfinite(*v)))
        throw std::invalid_argument("MaterialProperties: " + name + "." + field +
                                    " must be positive and finite");
    };
    check(cp, "cp");
    check(rho, "rho");
    check(k, "k");
    check(h_conv, "h_conv");
  }
};

/// Fetches an optional property, throwing if the material lacks it.
inline double required_property(const std::optional<double>& v, const char* field,
                                const char* material) {
  if (!v)
    throw std::invalid_argument(std::string("required_property: ") + material +
                                " is missing " + field);
  return *v;
}

/// The single-phase materials around the PCM annulus. Defaults are the
/// reference device: water-glycol in the core, copper inner wall, PVC outer
/// wall, still air outside the insulation.
struct TesMaterials {
  MaterialProperties working_fluid{.cp = 3.4, .rho = 1090.0, .k = {}, .h_conv = 1e4};
  MaterialProperties inner_wall{.cp = 0.39, .rho = 8960.0, .k = 401.0, .h_conv = {}};
  MaterialProperties outer_wall{.cp = 0.88, .rho = 1350.0, .k = 0.20, .h_conv = {}};
  MaterialProperties air{.cp = {}, .rho = {}, .k = {}, .h_conv = 5.0};
  double insulation_resistance = 1e14;  // degC/W, lumped into the ambient path

  void validate() const {
    working_fluid.validate("working_fluid");
    inner_wall.validate("inner_wall");
    outer_wall.validate("outer_wall");
    air.validate("air");
    required_property(working_fluid.cp, "cp", "working_fluid");
    required_property(working_fluid.rho, "rho", "working_fluid");
    required_property(working_fluid.h_conv, "h_conv", "working_fluid");
    for (const auto* w : {&inner_wall, &outer_wall}) {
      const char* name = w == &inner_wall ? "inner_wall" : "outer_wall";
      required_property(w->cp, "cp", name);
      required_property(w->rho, "rho", name);
      required_property(w->k, "k", name);
    }
    required_property(air.h_conv, "h_conv", "air");
    if (!(insulation_resistance >= 0.0) || !std::isfinite(insulation_resistance))
      throw std::invalid_argument(
          "TesMaterials: insulation_resistance must be non-negative and finite");
  }
};

// ---------------------------------------------------------------------------
// PCM relations
// ---------------------------------------------------------------------------

/// Temperature of the PCM at specific enthalpy h. Piecewise: subcooled solid
/// below h = 0, isothermal mixture on [0, latent_heat], superheated liquid
/// above.
inline double pcm_temperature(double h, const PcmProperties& p) {
  if (h < 0.0) return h / p.cp_solid + p.t_sat;
  if (h > p.latent_heat) return (h - p.latent_heat) / p.cp_liquid + p.t_sat;
  return p.t_sat;
}

/// Phase classification from temperature: solid strictly below saturation,
/// liquid at or above it.
inline Phase pcm_phase(double t, const PcmProperties& p) {
  return t < p.t_sat ? Phase::Solid : Phase::Liquid;
}

/// Phase classification from enthalpy. Inside the mixture plateau the
/// convention for lumped sections applies: solid while less than half the
/// latent heat has been absorbed, liquid from the midpoint on.
inline Phase pcm_phase_from_enthalpy(double h, const PcmProperties& p) {
  return h < 0.5 * p.latent_heat ? Phase::Solid : Phase::Liquid;
}

/// Specific enthalpy of single-phase PCM at temperature t. The phase must be
/// consistent with the temperature: solid requires t <= t_sat, liquid
/// t >= t_sat. At t == t_sat the phase picks the plateau end (solid -> 0,
/// liquid -> latent_heat).
inline double pcm_enthalpy(double t, Phase phase, const PcmProperties& p) {
  if (phase == Phase::Solid) {
    if (t > p.t_sat)
      throw std::invalid_argument("pcm_enthalpy: solid phase requires t <= t_sat");
    return (t - p.t_sat) * p.cp_solid;
  }
  if (t < p.t_sat)
    throw std::invalid_argument("pcm_enthalpy: liquid phase requires t >= t_sat");
  return p.latent_heat + (t - p.t_sat) * p.cp_liquid;
}

// ---------------------------------------------------------------------------
// Single-phase relations (datum: h = 0 at 0 degC)
// ---------------------------------------------------------------------------

inline double single_phase_temperature(double h, double cp) { return h / cp; }
inline double single_phase_enthalpy(double t, double cp) { return t * cp; }

}  // namespace tes
