#pragma once

// Fixed-grid reference model of the storage device.
//
// The PCM annulus is split into n rings of equal radial width, each a
// dynamic vertex whose state is specific enthalpy; phase, density and
// conductivity follow the enthalpy instantaneously. With the working fluid,
// the two walls and the ambient boundary this gives n + 3 states:
//
//   [ h_wf, h_inner_wall, h_pcm_1 .. h_pcm_n, h_outer_wall ]
//
// Ring nodes sit at the radial center of their ring. Heat flows radially
// inward through half-ring conduction resistances whose log terms telescope,
// so the all-liquid (or all-solid) chain reduces exactly to the series
// resistance of the composite cylinder. The fluid vertex exchanges
// advectively with the inlet and outlet.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tes/geometry.hpp"
#include "tes/properties.hpp"
#include "tes/thermal_graph.hpp"

namespace tes {

struct FgContext {
  TesGeometry geom;
  PcmProperties pcm;
  int sections = 0;

  double cp_wf = 0.0, cp_inner = 0.0, cp_outer = 0.0;  // kJ/(kg*degC)
  double mass_wf = 0.0, mass_inner = 0.0, mass_outer = 0.0;  // kg
  double mdot_cp = 0.0;                                      // kW/degC

  // Ring faces (sections + 1), ring-center node radii and ring volumes, m
  // and m^3. Faces are uniformly spaced; outer rings hold more volume.
  std::vector<double> face_radii;
  std::vector<double> node_radii;
  std::vector<double> section_volumes;

  // Fixed resistance pieces, degC/kW.
  double r_fluid_film = 0.0;        // fluid film at the inner wall face
  double r_inner_wall_half_a = 0.0; // wall face to wall node
  double r_inner_wall_half_b = 0.0; // wall node to PCM face
  double r_outer_wall_half_a = 0.0; // PCM face to outer wall node
  double r_outer_wall_half_b = 0.0; // outer wall node to outer face
  double r_ambient = 0.0;           // insulation + air film

  // Geometric log terms ln(r_b/r_a)/(2 pi L) for the PCM half rings; divide
  // by k (W/(m*degC)) * 1e-3 for the resistance.
  std::vector<double> half_log_inner;  // face_j -> node_j
  std::vector<double> half_log_outer;  // node_j -> face_{j+1}

  double half_resistance_inner(int s, double k) const { return half_log_inner[s] / (k * 1e-3); }
  double half_resistance_outer(int s, double k) const { return half_log_outer[s] / (k * 1e-3); }
};

struct FgModel {
  ThermalGraph graph;
  std::shared_ptr<const FgContext> ctx;

  // State layout: 0 fluid, 1 inner wall, 2..sections+1 PCM rings (innermost
  // first), sections+2 outer wall.
  int states() const { return ctx->sections + 3; }
  int pcm_state(int s) const { return 2 + s; }
  int outer_wall_state() const { return ctx->sections + 2; }

  /// Mass-weighted solid fraction over the PCM rings, normalized by the
  /// rings' instantaneous total mass.
  double soc(std::span<const double> x) const {
    double num = 0.0, den = 0.0;
    for (int s = 0; s < ctx->sections; ++s) {
      const double h = x[pcm_state(s)];
      const double mass =
          ctx->pcm.rho(pcm_phase_from_enthalpy(h, ctx->pcm)) * ctx->section_volumes[s];
      const double melted = std::clamp(h / ctx->pcm.latent_heat, 0.0, 1.0);
      num += mass * (1.0 - melted);
      den += mass;
    }
    return num / den;
  }

  /// Uniform-temperature initial state; `phase` disambiguates the PCM when
  /// t0 equals the saturation temperature.
  std::vector<double> initial_state(double t0, Phase phase) const {
    std::vector<double> x(states());
    x[0] = single_phase_enthalpy(t0, ctx->cp_wf);
    x[1] = single_phase_enthalpy(t0, ctx->cp_inner);
    for (int s = 0; s < ctx->sections; ++s)
      x[pcm_state(s)] = pcm_enthalpy(t0, phase, ctx->pcm);
    x[outer_wall_state()] = single_phase_enthalpy(t0, ctx->cp_outer);
    return x;
  }

  std::vector<std::string> state_names() const {
    std::vector<std::string> names;
    names.reserve(states());
    names.emplace_back("wf");
    names.emplace_back("inner_wall");
    for (int s = 0; s < ctx->sections; ++s) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "pcm_%02d", s + 1);
      names.emplace_back(buf);
    }
    names.emplace_back("outer_wall");
    return names;
  }
};

/// Builds the n-section model. Inputs at evaluation time: u = [t_inlet_degC,
/// t_ambient_degC].
inline FgModel build_fixed_grid_model(const TesGeometry& geometry, const TesMaterials& materials,
                                      const PcmProperties& pcm, double mdot, int sections) {
  geometry.validate();
  materials.validate();
  pcm.validate();
  if (sections < 1)
    throw std::invalid_argument("build_fixed_grid_model: sections must be >= 1");
  if (!(mdot > 0.0) || !std::isfinite(mdot))
    throw std::invalid_argument("build_fixed_grid_model: mdot must be positive and finite");

  auto ctx = std::make_shared<FgContext>();
  FgContext& c = *ctx;
  c.geom = geometry;
  c.pcm = pcm;
  c.sections = sections;
  c.cp_wf = *materials.working_fluid.cp;
  c.cp_inner = *materials.inner_wall.cp;
  c.cp_outer = *materials.outer_wall.cp;
  c.mdot_cp = mdot * c.cp_wf;

  const double L = geometry.length;
  c.mass_wf = *materials.working_fluid.rho * cylinder_volume(geometry.inner_radius, L);
  c.mass_inner = *materials.inner_wall.rho *
                 annulus_volume(geometry.inner_radius, geometry.inner_wall_outer_radius(), L);
  c.mass_outer = *materials.outer_wall.rho *
                 annulus_volume(geometry.pcm_outer_radius(), geometry.outer_radius(), L);

  const double r_in = geometry.pcm_inner_radius();
  const double r_out = geometry.pcm_outer_radius();
  const double dr = geometry.pcm_thickness / sections;
  c.face_radii.resize(sections + 1);
  c.node_radii.resize(sections);
  c.section_volumes.resize(sections);
  for (int s = 0; s <= sections; ++s)
    c.face_radii[s] = s == sections ? r_out : r_in + dr * s;
  for (int s = 0; s < sections; ++s) {
    c.node_radii[s] = r_in + dr * (s + 0.5);
    c.section_volumes[s] = annulus_volume(c.face_radii[s], c.face_radii[s + 1], L);
  }

  c.r_fluid_film = film_resistance(geometry.inner_radius, L, *materials.working_fluid.h_conv);
  c.r_inner_wall_half_a = radial_resistance(geometry.inner_radius,
                                            geometry.inner_wall_mid_radius(), L,
                                            *materials.inner_wall.k);
  c.r_inner_wall_half_b = radial_resistance(geometry.inner_wall_mid_radius(), r_in, L,
                                            *materials.inner_wall.k);
  c.r_outer_wall_half_a = radial_resistance(r_out, geometry.outer_wall_mid_radius(), L,
                                            *materials.outer_wall.k);
  c.r_outer_wall_half_b = radial_resistance(geometry.outer_wall_mid_radius(),
                                            geometry.outer_radius(), L, *materials.outer_wall.k);
  c.r_ambient = materials.insulation_resistance * 1e3 +
                film_resistance(geometry.outer_radius(), L, *materials.air.h_conv);

  const double two_pi_l = 2.0 * std::numbers::pi * L;
  c.half_log_inner.resize(sections);
  c.half_log_outer.resize(sections);
  for (int s = 0; s < sections; ++s) {
    c.half_log_inner[s] = std::log(c.node_radii[s] / c.face_radii[s]) / two_pi_l;
    c.half_log_outer[s] = std::log(c.face_radii[s + 1] / c.node_radii[s]) / two_pi_l;
  }

  FgModel model;
  model.ctx = ctx;
  ThermalGraph& g = model.graph;
  const FgContext* cp = ctx.get();

  auto pcm_k = [cp](double h) { return cp->pcm.k(pcm_phase_from_enthalpy(h, cp->pcm)); };
  auto pcm_t = [cp](double h) { return pcm_temperature(h, cp->pcm); };

  const int v_wf = g.add_dynamic_vertex(
      "wf", [cp](const EvalArgs&) { return cp->mass_wf; },
      [cp](const EvalArgs& a) { return single_phase_temperature(a.x[0], cp->cp_wf); },
      [cp](const EvalArgs& a) { return cp->mass_wf * a.x[0]; });
  const int v_wall = g.add_dynamic_vertex(
      "inner_wall", [cp](const EvalArgs&) { return cp->mass_inner; },
      [cp](const EvalArgs& a) { return single_phase_temperature(a.x[1], cp->cp_inner); },
      [cp](const EvalArgs& a) { return cp->mass_inner * a.x[1]; });
  for (int s = 0; s < sections; ++s) {
    char name[48];
    std::snprintf(name, sizeof name, "pcm_%02d", s + 1);
    const int xi = 2 + s;
    const int s_idx = s;
    g.add_dynamic_vertex(
        name,
        [cp, xi, s_idx](const EvalArgs& a) {
          return cp->pcm.rho(pcm_phase_from_enthalpy(a.x[xi], cp->pcm)) *
                 cp->section_volumes[s_idx];
        },
        [cp, xi, pcm_t](const EvalArgs& a) { return pcm_t(a.x[xi]); },
        [cp, xi, s_idx](const EvalArgs& a) {
          return cp->pcm.rho(pcm_phase_from_enthalpy(a.x[xi], cp->pcm)) *
                 cp->section_volumes[s_idx] * a.x[xi];
        });
  }
  const int v_ow = g.add_dynamic_vertex(
      "outer_wall", [cp](const EvalArgs&) { return cp->mass_outer; },
      [cp](const EvalArgs& a) {
        return single_phase_temperature(a.x[a.x.size() - 1], cp->cp_outer);
      },
      [cp](const EvalArgs& a) { return cp->mass_outer * a.x[a.x.size() - 1]; });
  const int v_outlet = g.add_sink_vertex("outlet", [](const EvalArgs& a) { return a.x[0]; });

  g.add_edge("advective_out", v_wf, v_outlet, [cp](const EvalArgs& a) {
    return cp->mdot_cp * single_phase_temperature(a.x[0], cp->cp_wf);
  });
  g.add_edge("inner_wall_to_wf", v_wall, v_wf, [cp](const EvalArgs& a) {
    const double t_wall = single_phase_temperature(a.x[1], cp->cp_inner);
    const double t_wf = single_phase_temperature(a.x[0], cp->cp_wf);
    return (t_wall - t_wf) / (cp->r_fluid_film + cp->r_inner_wall_half_a);
  });
  for (int s = 0; s < sections; ++s) {
    char name[48];
    const int xi = 2 + s;
    if (s == 0) {
      std::snprintf(name, sizeof name, "pcm_01_to_inner_wall");
      g.add_edge(name, 2, v_wall, [cp, xi, pcm_k, pcm_t](const EvalArgs& a) {
        const double r = cp->r_inner_wall_half_b + cp->half_resistance_inner(0, pcm_k(a.x[xi]));
        return (pcm_t(a.x[xi]) - single_phase_temperature(a.x[1], cp->cp_inner)) / r;
      });
    } else {
      std::snprintf(name, sizeof name, "pcm_%02d_to_pcm_%02d", s + 1, s);
      g.add_edge(name, 2 + s, 2 + s - 1, [cp, s, xi, pcm_k, pcm_t](const EvalArgs& a) {
        const double r = cp->half_resistance_outer(s - 1, pcm_k(a.x[xi - 1])) +
                         cp->half_resistance_inner(s, pcm_k(a.x[xi]));
        return (pcm_t(a.x[xi]) - pcm_t(a.x[xi - 1])) / r;
      });
    }
  }
  {
    char name[48];
    std::snprintf(name, sizeof name, "outer_wall_to_pcm_%02d", sections);
    const int xi = 2 + sections - 1;
    g.add_edge(name, v_ow, 2 + sections - 1, [cp, xi, pcm_k, pcm_t](const EvalArgs& a) {
      const double t_ow = single_phase_temperature(a.x[a.x.size() - 1], cp->cp_outer);
      const double r = cp->r_outer_wall_half_a +
                       cp->half_resistance_outer(cp->sections - 1, pcm_k(a.x[xi]));
      return (t_ow - pcm_t(a.x[xi])) / r;
    });
  }
  g.add_source_edge("advective_in", v_wf,
                    [cp](const EvalArgs& a) { return cp->mdot_cp * a.u[0]; });
  g.add_source_edge("ambient_in", v_ow, [cp](const EvalArgs& a) {
    const double t_ow = single_phase_temperature(a.x[a.x.size() - 1], cp->cp_outer);
    return (a.u[1] - t_ow) / (cp->r_outer_wall_half_b + cp->r_ambient);
  });

  std::vector<std::vector<double>> phi(g.edge_count(), std::vector<double>(2, 0.0));
  phi[g.edge_count() - 2][0] = c.mdot_cp;
  phi[g.edge_count() - 1][1] = 1.0 / (c.r_outer_wall_half_b + c.r_ambient);
  g.set_input_map({"t_inlet", "t_ambient"}, std::move(phi));
  return model;
}

}  // namespace tes
