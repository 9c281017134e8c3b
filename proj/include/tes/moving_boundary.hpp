#pragma once

// Switched moving-boundary model of the storage device.
//
// The PCM is lumped into at most three vertices: one solid region, one
// liquid region, and the phase interface between them, pinned at the
// saturation temperature. Six states:
//
//   [ h_wf, h_inner_wall, h_solid, soc, h_liquid, h_outer_wall ]
//
// soc is the solid mass fraction. The interface vertex integrates soc
// through a negative capacitance M_tot*(h_solid - h_liquid): net heating at
// the interface melts solid (soc falls), net cooling grows it.
//
// Four operating modes gate the PCM-side edges and fix which region touches
// the inner wall:
//
//   1 all liquid    e4 (liquid-wall), e8 (outer wall-liquid)
//   2 freezing      e3 (solid-wall), e5, e6 (interface), e8
//   3 all solid     e3, e7 (outer wall-solid)
//   4 melting       e4, e5, e6, e7
//
// In mode 2 the solid annulus grows from the inner wall outward; in mode 4
// the liquid does; reversals between 2 and 4 swap the regions in place.
// Transitions fire on the reconstructed wall-PCM surface temperature
// crossing saturation, or on soc reaching a bound.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tes/geometry.hpp"
#include "tes/properties.hpp"
#include "tes/thermal_graph.hpp"

namespace tes {

enum class FsmMode : int { AllLiquid = 1, Freezing = 2, AllSolid = 3, Melting = 4 };

inline const char* fsm_mode_name(FsmMode m) {
  switch (m) {
    case FsmMode::AllLiquid: return "all_liquid";
    case FsmMode::Freezing: return "freezing";
    case FsmMode::AllSolid: return "all_solid";
    case FsmMode::Melting: return "melting";
  }
  throw std::invalid_argument("fsm_mode_name: invalid mode");
}

inline FsmMode fsm_mode_from_int(int m) {
  if (m < 1 || m > 4) throw std::invalid_argument("fsm_mode_from_int: mode must be 1..4");
  return static_cast<FsmMode>(m);
}

/// State vector layout.
struct MbIndex {
  static constexpr int wf = 0;
  static constexpr int inner_wall = 1;
  static constexpr int solid = 2;
  static constexpr int soc = 3;
  static constexpr int liquid = 4;
  static constexpr int outer_wall = 5;
  static constexpr int count = 6;
};

/// Edge layout of the built graph.
struct MbEdge {
  static constexpr int advective_out = 0;
  static constexpr int inner_wall_to_wf = 1;
  static constexpr int solid_to_inner_wall = 2;   // P3
  static constexpr int liquid_to_inner_wall = 3;  // P4
  static constexpr int interface_to_solid = 4;    // P5
  static constexpr int liquid_to_interface = 5;   // P6
  static constexpr int outer_wall_to_solid = 6;   // P7
  static constexpr int outer_wall_to_liquid = 7;  // P8
  static constexpr int advective_in = 8;
  static constexpr int ambient_in = 9;
  static constexpr int count = 10;
};

/// Per-mode edge gates; always-on edges (fluid loop, sources) included.
inline std::vector<char> mb_gate_mask(FsmMode mode) {
  std::vector<char> gates(MbEdge::count, 0);
  gates[MbEdge::advective_out] = 1;
  gates[MbEdge::inner_wall_to_wf] = 1;
  gates[MbEdge::advective_in] = 1;
  gates[MbEdge::ambient_in] = 1;
  switch (mode) {
    case FsmMode::AllLiquid:
      gates[MbEdge::liquid_to_inner_wall] = 1;
      gates[MbEdge::outer_wall_to_liquid] = 1;
      break;
    case FsmMode::Freezing:
      gates[MbEdge::solid_to_inner_wall] = 1;
      gates[MbEdge::interface_to_solid] = 1;
      gates[MbEdge::liquid_to_interface] = 1;
      gates[MbEdge::outer_wall_to_liquid] = 1;
      break;
    case FsmMode::AllSolid:
      gates[MbEdge::solid_to_inner_wall] = 1;
      gates[MbEdge::outer_wall_to_solid] = 1;
      break;
    case FsmMode::Melting:
      gates[MbEdge::liquid_to_inner_wall] = 1;
      gates[MbEdge::interface_to_solid] = 1;
      gates[MbEdge::liquid_to_interface] = 1;
      gates[MbEdge::outer_wall_to_solid] = 1;
      break;
  }
  return gates;
}

struct MbContext {
  TesGeometry geom;
  PcmProperties pcm;
  double total_mass = 0.0;  // PCM, kg
  double cp_wf = 0.0, cp_inner = 0.0, cp_outer = 0.0;
  double mass_wf = 0.0, mass_inner = 0.0, mass_outer = 0.0;
  double mdot_cp = 0.0;
  double r_fluid_film = 0.0;
  double r_inner_wall_half_a = 0.0;  // fluid face to wall node
  double r_inner_wall_half_b = 0.0;  // wall node to PCM face
  double r_outer_wall_half_a = 0.0;  // PCM face to outer wall node
  double r_outer_wall_half_b = 0.0;  // outer wall node to outer face
  double r_ambient = 0.0;
  double epsilon = 1e-6;  // regularization floor for vanishing regions

  double pcm_volume() const {
    return annulus_volume(geom.pcm_inner_radius(), geom.pcm_outer_radius(), geom.length);
  }
};

/// Region geometry at a given soc and mode. The interface radius follows the
/// inner region's mass; each region's lumped temperature sits at the radius
/// splitting the region into equal volumes. For vanishing regions the soc
/// entering the geometry is clamped to [epsilon, 1-epsilon], and the inner
/// volume to the PCM annulus, so no log term ever degenerates to zero. In
/// modes 1 and 3 the single region spans the whole annulus and the interface
/// sits at the inner face, where the next region will nucleate.
struct MbRegions {
  double interface_radius = 0.0;
  double inner_mid = 0.0;  // node radius of the region at the inner wall
  double outer_mid = 0.0;  // node radius of the region at the outer wall
};

inline MbRegions mb_regions(double soc, FsmMode mode, const MbContext& c) {
  const double r3 = c.geom.pcm_inner_radius();
  const double r4 = c.geom.pcm_outer_radius();
  MbRegions reg;
  if (mode == FsmMode::AllLiquid || mode == FsmMode::AllSolid) {
    reg.interface_radius = r3;
    reg.inner_mid = equal_volume_radius(r3, r4);
    reg.outer_mid = reg.inner_mid;
    return reg;
  }
  const double s = std::clamp(soc, c.epsilon, 1.0 - c.epsilon);
  const double inner_mass = mode == FsmMode::Freezing ? c.total_mass * s : c.total_mass * (1.0 - s);
  const double inner_rho = mode == FsmMode::Freezing ? c.pcm.rho_solid : c.pcm.rho_liquid;
  const double v_pcm = c.pcm_volume();
  const double v_inner =
      std::clamp(inner_mass / inner_rho, c.epsilon * v_pcm, (1.0 - c.epsilon) * v_pcm);
  reg.interface_radius =
      std::sqrt(r3 * r3 + v_inner / (std::numbers::pi * c.geom.length));
  reg.inner_mid = equal_volume_radius(r3, reg.interface_radius);
  reg.outer_mid = equal_volume_radius(reg.interface_radius, r4);
  return reg;
}

/// Resistances of the PCM-side edges for the given mode, degC/kW. Entries
/// for gated-off edges are set to infinity (their conductance is zero).
struct MbResistances {
  double solid_to_inner_wall = 0.0;   // R3
  double liquid_to_inner_wall = 0.0;  // R4
  double interface_to_solid = 0.0;    // R5
  double liquid_to_interface = 0.0;   // R6
  double outer_wall_to_solid = 0.0;   // R7
  double outer_wall_to_liquid = 0.0;  // R8
};

inline MbResistances mb_resistances(double soc, FsmMode mode, const MbContext& c) {
  const double r3 = c.geom.pcm_inner_radius();
  const double r4 = c.geom.pcm_outer_radius();
  const double L = c.geom.length;
  const MbRegions reg = mb_regions(soc, mode, c);
  const double inf = std::numeric_limits<double>::infinity();
  MbResistances r{inf, inf, inf, inf, inf, inf};
  switch (mode) {
    case FsmMode::AllLiquid:
      r.liquid_to_inner_wall =
          c.r_inner_wall_half_b + radial_resistance(r3, reg.inner_mid, L, c.pcm.k_liquid);
      r.outer_wall_to_liquid =
          radial_resistance(reg.outer_mid, r4, L, c.pcm.k_liquid) + c.r_outer_wall_half_a;
      break;
    case FsmMode::AllSolid:
      r.solid_to_inner_wall =
          c.r_inner_wall_half_b + radial_resistance(r3, reg.inner_mid, L, c.pcm.k_solid);
      r.outer_wall_to_solid =
          radial_resistance(reg.outer_mid, r4, L, c.pcm.k_solid) + c.r_outer_wall_half_a;
      break;
    case FsmMode::Freezing:  // solid inner, liquid outer
      r.solid_to_inner_wall =
          c.r_inner_wall_half_b + radial_resistance(r3, reg.inner_mid, L, c.pcm.k_solid);
      r.interface_to_solid =
          radial_resistance(reg.inner_mid, reg.interface_radius, L, c.pcm.k_solid);
      r.liquid_to_interface =
          radial_resistance(reg.interface_radius, reg.outer_mid, L, c.pcm.k_liquid);
      r.outer_wall_to_liquid =
          radial_resistance(reg.outer_mid, r4, L, c.pcm.k_liquid) + c.r_outer_wall_half_a;
      break;
    case FsmMode::Melting:  // liquid inner, solid outer
      r.liquid_to_inner_wall =
          c.r_inner_wall_half_b + radial_resistance(r3, reg.inner_mid, L, c.pcm.k_liquid);
      r.liquid_to_interface =
          radial_resistance(reg.inner_mid, reg.interface_radius, L, c.pcm.k_liquid);
      r.interface_to_solid =
          radial_resistance(reg.interface_radius, reg.outer_mid, L, c.pcm.k_solid);
      r.outer_wall_to_solid =
          radial_resistance(reg.outer_mid, r4, L, c.pcm.k_solid) + c.r_outer_wall_half_a;
      break;
  }
  return r;
}

/// Temperature at the inner-wall/PCM face, reconstructed from the wall node
/// temperature and the power on the mode's inner PCM edge across the wall's
/// outer half-resistance. This is the quantity the mode machine compares
/// against saturation.
inline double mb_surface_temperature(std::span<const double> x, FsmMode mode,
                                     const MbContext& c) {
  const double t_wall = single_phase_temperature(x[MbIndex::inner_wall], c.cp_inner);
  const MbResistances r = mb_resistances(x[MbIndex::soc], mode, c);
  double power = 0.0;
  if (mode == FsmMode::Freezing || mode == FsmMode::AllSolid) {
    power = (pcm_temperature(x[MbIndex::solid], c.pcm) - t_wall) / r.solid_to_inner_wall;
  } else {
    power = (pcm_temperature(x[MbIndex::liquid], c.pcm) - t_wall) / r.liquid_to_inner_wall;
  }
  return t_wall + c.r_inner_wall_half_b * power;
}

// ---------------------------------------------------------------------------
// Finite state machine
// ---------------------------------------------------------------------------

struct FsmDecision {
  FsmMode next;
  const char* reason;
};

/// Transition rule evaluated at one instant. Returns nothing when the mode
/// persists. When a soc bound and a surface-temperature crossing hold
/// simultaneously, the soc bound wins (a completed phase change takes
/// precedence over reversal).
inline std::optional<FsmDecision> fsm_step(FsmMode mode, double soc, double t_surface,
                                           double t_sat) {
  switch (mode) {
    case FsmMode::AllLiquid:
      if (t_surface < t_sat) return FsmDecision{FsmMode::Freezing, "surface subcooled"};
      break;
    case FsmMode::Freezing:
      if (soc >= 1.0) return FsmDecision{FsmMode::AllSolid, "freeze complete"};
      if (t_surface > t_sat) return FsmDecision{FsmMode::Melting, "surface superheated"};
      break;
    case FsmMode::AllSolid:
      if (t_surface > t_sat) return FsmDecision{FsmMode::Melting, "surface superheated"};
      break;
    case FsmMode::Melting:
      if (soc <= 0.0) return FsmDecision{FsmMode::AllLiquid, "melt complete"};
      if (t_surface < t_sat) return FsmDecision{FsmMode::Freezing, "surface subcooled"};
      break;
  }
  return std::nullopt;
}

/// Fraction of the PCM a nascent region is seeded with on a transition into
/// freezing or melting. Nominally zero; the offset (far below any tolerance
/// of interest) starts the region outside the interface-geometry
/// regularization corner at soc = 0 or 1, which an implicit step straddles
/// badly when the seed sits exactly on it.
inline constexpr double kSeedSoc = 1e-5;

/// Enthalpy offset (kJ/kg) a nascent region is seeded with, into its own
/// branch of the enthalpy curve. A region born exactly at the saturation
/// corner puts the kink inside the difference interval of the first Jacobian
/// of its stiffest state; the offset (one enthalpy tolerance, about half a
/// millidegree) clears it. The region immediately moves further into its
/// branch, so no corner re-crossing follows.
inline constexpr double kSeedEnthalpy = 1e-3;

/// State adjustments on a mode transition. Nascent regions start a hair
/// inside their branch of the saturation curve (solid at h = -kSeedEnthalpy,
/// liquid at h = latent_heat + kSeedEnthalpy) and carry kSeedSoc of the
/// mass; a completed phase change pins soc to its bound. Reversals between
/// freezing and melting change nothing: the regions swap location,
/// enthalpies and soc are continuous.
inline void apply_transition(FsmMode from, FsmMode to, std::span<double> x,
                             const PcmProperties& pcm) {
  if (from == FsmMode::AllLiquid && to == FsmMode::Freezing) {
    x[MbIndex::solid] = -kSeedEnthalpy;
    x[MbIndex::soc] = std::max(x[MbIndex::soc], kSeedSoc);
  } else if (from == FsmMode::Freezing && to == FsmMode::AllSolid) {
    x[MbIndex::soc] = 1.0;
    x[MbIndex::liquid] = pcm.latent_heat;
  } else if (from == FsmMode::AllSolid && to == FsmMode::Melting) {
    x[MbIndex::liquid] = pcm.latent_heat + kSeedEnthalpy;
    x[MbIndex::soc] = std::min(x[MbIndex::soc], 1.0 - kSeedSoc);
  } else if (from == FsmMode::Melting && to == FsmMode::AllLiquid) {
    x[MbIndex::soc] = 0.0;
    x[MbIndex::solid] = 0.0;
  } else if ((from == FsmMode::Freezing && to == FsmMode::Melting) ||
             (from == FsmMode::Melting && to == FsmMode::Freezing)) {
    // region swap only
  } else {
    throw std::invalid_argument(std::string("apply_transition: no arc ") +
                                fsm_mode_name(from) + " -> " + fsm_mode_name(to));
  }
}

// ---------------------------------------------------------------------------
// Model builder
// ---------------------------------------------------------------------------

struct MbModel {
  ThermalGraph graph;
  std::shared_ptr<const MbContext> ctx;

  int states() const { return MbIndex::count; }

  double soc(std::span<const double> x) const { return x[MbIndex::soc]; }

  /// Uniform-temperature initial state and the matching mode. At saturation
  /// `phase` picks between all-solid and all-liquid.
  std::vector<double> initial_state(double t0, Phase phase, FsmMode* mode_out = nullptr) const {
    std::vector<double> x(MbIndex::count);
    x[MbIndex::wf] = single_phase_enthalpy(t0, ctx->cp_wf);
    x[MbIndex::inner_wall] = single_phase_enthalpy(t0, ctx->cp_inner);
    x[MbIndex::outer_wall] = single_phase_enthalpy(t0, ctx->cp_outer);
    const Phase p = t0 == ctx->pcm.t_sat ? phase : pcm_phase(t0, ctx->pcm);
    if (p == Phase::Solid) {
      x[MbIndex::solid] = pcm_enthalpy(t0, Phase::Solid, ctx->pcm);
      x[MbIndex::liquid] = ctx->pcm.latent_heat;  // nascent liquid datum
      x[MbIndex::soc] = 1.0;
      if (mode_out) *mode_out = FsmMode::AllSolid;
    } else {
      x[MbIndex::liquid] = pcm_enthalpy(t0, Phase::Liquid, ctx->pcm);
      x[MbIndex::solid] = 0.0;  // nascent solid datum
      x[MbIndex::soc] = 0.0;
      if (mode_out) *mode_out = FsmMode::AllLiquid;
    }
    return x;
  }

  std::vector<std::string> state_names() const {
    return {"wf", "inner_wall", "solid", "soc", "liquid", "outer_wall"};
  }
};

/// Builds the six-state model. Inputs at evaluation time:
/// u = [t_inlet_degC, t_ambient_degC]; args.mode carries the FSM mode.
inline MbModel build_moving_boundary_model(const TesGeometry& geometry,
                                           const TesMaterials& materials,
                                           const PcmProperties& pcm, double mdot,
                                           double total_mass) {
  geometry.validate();
  materials.validate();
  pcm.validate();
  if (!(mdot > 0.0) || !std::isfinite(mdot))
    throw std::invalid_argument("build_moving_boundary_model: mdot must be positive and finite");
  if (!(total_mass > 0.0) || !std::isfinite(total_mass))
    throw std::invalid_argument(
        "build_moving_boundary_model: total_mass must be positive and finite");

  auto ctx = std::make_shared<MbContext>();
  MbContext& c = *ctx;
  c.geom = geometry;
  c.pcm = pcm;
  c.total_mass = total_mass;
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
  c.r_fluid_film = film_resistance(geometry.inner_radius, L, *materials.working_fluid.h_conv);
  c.r_inner_wall_half_a = radial_resistance(geometry.inner_radius,
                                            geometry.inner_wall_mid_radius(), L,
                                            *materials.inner_wall.k);
  c.r_inner_wall_half_b = radial_resistance(geometry.inner_wall_mid_radius(),
                                            geometry.pcm_inner_radius(), L,
                                            *materials.inner_wall.k);
  c.r_outer_wall_half_a = radial_resistance(geometry.pcm_outer_radius(),
                                            geometry.outer_wall_mid_radius(), L,
                                            *materials.outer_wall.k);
  c.r_outer_wall_half_b = radial_resistance(geometry.outer_wall_mid_radius(),
                                            geometry.outer_radius(), L, *materials.outer_wall.k);
  c.r_ambient = materials.insulation_resistance * 1e3 +
                film_resistance(geometry.outer_radius(), L, *materials.air.h_conv);

  MbModel model;
  model.ctx = ctx;
  ThermalGraph& g = model.graph;
  const MbContext* cp = ctx.get();

  auto t_wf = [cp](const EvalArgs& a) {
    return single_phase_temperature(a.x[MbIndex::wf], cp->cp_wf);
  };
  auto t_wall = [cp](const EvalArgs& a) {
    return single_phase_temperature(a.x[MbIndex::inner_wall], cp->cp_inner);
  };
  auto t_ow = [cp](const EvalArgs& a) {
    return single_phase_temperature(a.x[MbIndex::outer_wall], cp->cp_outer);
  };
  auto t_solid = [cp](const EvalArgs& a) {
    return pcm_temperature(a.x[MbIndex::solid], cp->pcm);
  };
  auto t_liquid = [cp](const EvalArgs& a) {
    return pcm_temperature(a.x[MbIndex::liquid], cp->pcm);
  };
  auto resist = [cp](const EvalArgs& a) {
    return mb_resistances(a.x[MbIndex::soc], fsm_mode_from_int(a.mode), *cp);
  };

  g.add_dynamic_vertex(
      "wf", [cp](const EvalArgs&) { return cp->mass_wf; }, t_wf,
      [cp](const EvalArgs& a) { return cp->mass_wf * a.x[MbIndex::wf]; });
  g.add_dynamic_vertex(
      "inner_wall", [cp](const EvalArgs&) { return cp->mass_inner; }, t_wall,
      [cp](const EvalArgs& a) { return cp->mass_inner * a.x[MbIndex::inner_wall]; });
  g.add_dynamic_vertex(
      "solid",
      [cp](const EvalArgs& a) {
        return cp->total_mass * std::max(a.x[MbIndex::soc], cp->epsilon);
      },
      t_solid,
      [cp](const EvalArgs& a) {
        return cp->total_mass * a.x[MbIndex::soc] * a.x[MbIndex::solid];
      });
  g.add_dynamic_vertex(
      "interface",
      [cp](const EvalArgs& a) {
        const double dh = a.x[MbIndex::solid] - a.x[MbIndex::liquid];
        return cp->total_mass * std::min(dh, -cp->epsilon);
      },
      [cp](const EvalArgs&) { return cp->pcm.t_sat; }, [](const EvalArgs&) { return 0.0; });
  g.add_dynamic_vertex(
      "liquid",
      [cp](const EvalArgs& a) {
        return cp->total_mass * std::max(1.0 - a.x[MbIndex::soc], cp->epsilon);
      },
      t_liquid,
      [cp](const EvalArgs& a) {
        return cp->total_mass * (1.0 - a.x[MbIndex::soc]) * a.x[MbIndex::liquid];
      });
  g.add_dynamic_vertex(
      "outer_wall", [cp](const EvalArgs&) { return cp->mass_outer; }, t_ow,
      [cp](const EvalArgs& a) { return cp->mass_outer * a.x[MbIndex::outer_wall]; });
  const int v_outlet =
      g.add_sink_vertex("outlet", [](const EvalArgs& a) { return a.x[MbIndex::wf]; });

  g.add_edge("advective_out", MbIndex::wf, v_outlet,
             [cp, t_wf](const EvalArgs& a) { return cp->mdot_cp * t_wf(a); });
  g.add_edge("inner_wall_to_wf", MbIndex::inner_wall, MbIndex::wf,
             [cp, t_wall, t_wf](const EvalArgs& a) {
               return (t_wall(a) - t_wf(a)) / (cp->r_fluid_film + cp->r_inner_wall_half_a);
             });
  g.add_edge("solid_to_inner_wall", MbIndex::solid, MbIndex::inner_wall,
             [resist, t_solid, t_wall](const EvalArgs& a) {
               return (t_solid(a) - t_wall(a)) / resist(a).solid_to_inner_wall;
             });
  g.add_edge("liquid_to_inner_wall", MbIndex::liquid, MbIndex::inner_wall,
             [resist, t_liquid, t_wall](const EvalArgs& a) {
               return (t_liquid(a) - t_wall(a)) / resist(a).liquid_to_inner_wall;
             });
  g.add_edge("interface_to_solid", MbIndex::soc, MbIndex::solid,
             [cp, resist, t_solid](const EvalArgs& a) {
               return (cp->pcm.t_sat - t_solid(a)) / resist(a).interface_to_solid;
             });
  g.add_edge("liquid_to_interface", MbIndex::liquid, MbIndex::soc,
             [cp, resist, t_liquid](const EvalArgs& a) {
               return (t_liquid(a) - cp->pcm.t_sat) / resist(a).liquid_to_interface;
             });
  g.add_edge("outer_wall_to_solid", MbIndex::outer_wall, MbIndex::solid,
             [resist, t_ow, t_solid](const EvalArgs& a) {
               return (t_ow(a) - t_solid(a)) / resist(a).outer_wall_to_solid;
             });
  g.add_edge("outer_wall_to_liquid", MbIndex::outer_wall, MbIndex::liquid,
             [resist, t_ow, t_liquid](const EvalArgs& a) {
               return (t_ow(a) - t_liquid(a)) / resist(a).outer_wall_to_liquid;
             });
  g.add_source_edge("advective_in", MbIndex::wf,
                    [cp](const EvalArgs& a) { return cp->mdot_cp * a.u[0]; });
  g.add_source_edge("ambient_in", MbIndex::outer_wall, [cp, t_ow](const EvalArgs& a) {
    return (a.u[1] - t_ow(a)) / (cp->r_outer_wall_half_b + cp->r_ambient);
  });

  std::vector<std::vector<double>> phi(g.edge_count(), std::vector<double>(2, 0.0));
  phi[MbEdge::advective_in][0] = c.mdot_cp;
  phi[MbEdge::ambient_in][1] = 1.0 / (c.r_outer_wall_half_b + c.r_ambient);
  g.set_input_map({"t_inlet", "t_ambient"}, std::move(phi));
  return model;
}

}  // namespace tes
