#pragma once

// Scenario execution: drives a model (fixed-grid or moving-boundary) through
// an inlet schedule with the adaptive solver, collecting a sampled
// trajectory, a log of discrete events, solver statistics, and an energy
// conservation audit.
//
// Discrete events come from two sources. The inlet schedule either toggles
// between a freeze level and a melt level on SOC bounds (soc_trigger) or
// steps through fixed-duration segments. The moving-boundary model adds its
// mode machine: region-boundary crossings (SOC reaching 0 or 1) and the
// inner PCM surface temperature crossing saturation. All of them are
// localized by the solver's event scan, applied between integration calls,
// and logged. Inputs are piecewise constant, so within one integration call
// the system is smooth.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tes/fixed_grid.hpp"
#include "tes/metrics.hpp"
#include "tes/moving_boundary.hpp"
#include "tes/ode.hpp"
#include "tes/scenario.hpp"
#include "tes/timeseries.hpp"

namespace tes {

struct SimEvent {
  double time = 0.0;
  std::string kind;  // "mode_transition" | "input_toggle"
  int from_mode = 0;  // mode_transition only
  int to_mode = 0;
  std::string reason;  // transition reason, or "soc_high"/"soc_low"/"segment"
  double t_inlet_after = 0.0;  // degC
};

struct ModelRunResult {
  std::string model_label;  // "fg" | "mb"
  int sections = 0;         // fg only
  TimeSeries trajectory;
  std::vector<SimEvent> events;
  std::vector<int> mode_trace;  // mb: initial mode, then each transition target
  RunStats stats;
  EnergyAudit audit;
  std::optional<double> freeze_time;  // s, first full charge
  double end_time = 0.0;
  std::vector<double> final_state;
  int final_mode = 0;  // mb only
};

namespace detail {

/// Output sample times k * dt strictly inside (0, horizon].
inline std::vector<double> sample_grid(double horizon, double dt) {
  std::vector<double> grid;
  const long count = static_cast<long>(std::floor(horizon / dt + 1e-9));
  grid.reserve(static_cast<std::size_t>(count));
  for (long k = 1; k <= count; ++k) grid.push_back(static_cast<double>(k) * dt);
  if (!grid.empty() && grid.back() > horizon) grid.back() = horizon;
  return grid;
}

inline SolverConfig solver_config_for(const Scenario& sc, int n_states, int soc_index) {
  SolverConfig cfg;
  cfg.rel_tol = sc.solver.rel_tol;
  cfg.abs_tol.assign(static_cast<std::size_t>(n_states), sc.solver.abs_tol_enthalpy);
  if (soc_index >= 0) cfg.abs_tol[static_cast<std::size_t>(soc_index)] = sc.solver.abs_tol_soc;
  cfg.min_step = sc.solver.min_step;
  cfg.max_step = sc.solver.max_step;
  cfg.event_time_tol = sc.solver.event_time_tol;
  cfg.max_newton_iterations = sc.solver.max_newton_iterations;
  cfg.use_jacobian = sc.solver.use_jacobian;
  return cfg;
}

/// Model-specific pieces the shared schedule loop calls back into.
struct RunHooks {
  // Event specs the model wants watched in its current mode (may be null).
  std::function<std::vector<EventSpec>()> model_events;
  // Applies the transition for a model event hit at `t`; returns false if the
  // label is not a model event. Only the first model hit of a step is applied.
  std::function<bool(const EventHit&, double t)> on_model_event;
  // One chained state-based check after an applied model event.
  std::function<void(double t)> after_model_event;
};

/// Shared schedule loop. `u[0]` is the inlet level (mutated on toggles),
/// `x` the state (mutated by model transitions through the hooks). `emit`
/// appends a trajectory row; it must ignore non-increasing times. Returns
/// the time the run actually ended.
inline double run_schedule(const Scenario& sc, TrBdf2& solver, std::vector<double>& x,
                           std::array<double, 2>& u,
                           const std::function<double(std::span<const double>)>& soc_of,
                           const std::function<void(double, std::span<const double>)>& emit,
                           std::vector<SimEvent>& events, const RunHooks& hooks) {
  const InletSchedule& in = sc.inlet;
  const bool trigger = in.kind == ScheduleKind::SocTrigger;
  bool charging = in.start == ScheduleStart::Freeze;
  int toggles = 0;
  bool stopped = false;

  std::vector<double> breaks;  // cumulative segment end times
  if (!trigger) {
    double acc = 0.0;
    for (double d : in.segment_durations) breaks.push_back(acc += d);
  }
  std::size_t seg = 0;

  const std::vector<double> grid = sample_grid(sc.horizon, sc.solver.output_interval);

  auto build_events = [&]() {
    std::vector<EventSpec> specs = hooks.model_events ? hooks.model_events()
                                                      : std::vector<EventSpec>{};
    if (trigger) {
      if (charging)
        specs.push_back({"soc_high",
                         [&soc_of, &in](double, std::span<const double> xs) {
                           return soc_of(xs) - in.soc_high;
                         },
                         EventDirection::Rising, 0});
      else
        specs.push_back({"soc_low",
                         [&soc_of, &in](double, std::span<const double> xs) {
                           return soc_of(xs) - in.soc_low;
                         },
                         EventDirection::Falling, 0});
    }
    return specs;
  };

  double t = 0.0;
  emit(0.0, x);
  long guard = 0;
  while (t < sc.horizon - 1e-9 && !stopped) {
    if (++guard > 1000000) throw SolverError("run_schedule: event loop did not terminate");
    double t_stop = sc.horizon;
    if (!trigger) {
      while (seg < breaks.size() && breaks[seg] <= t + 1e-9) ++seg;
      if (seg < breaks.size()) t_stop = std::min(t_stop, breaks[seg]);
    }

    solver.set_events(build_events());
    const auto first = std::upper_bound(grid.begin(), grid.end(), t);
    const std::span<const double> tail{grid.data() + (first - grid.begin()),
                                       static_cast<std::size_t>(grid.end() - first)};
    const IntegrationResult res = solver.integrate(
        t, x, t_stop, tail, [&](double ts, std::span<const double> xs) { emit(ts, xs); });
    t = res.end_time;
    x.assign(res.state.begin(), res.state.end());

    if (res.events.empty()) {
      // Reached t_stop: either the horizon or a segment boundary.
      if (!trigger && seg < breaks.size() && t >= breaks[seg] - 1e-9) {
        const std::size_t next = seg + 1;
        if (next < in.segment_levels.size()) {
          u[0] = in.segment_levels[next];
          events.push_back({t, "input_toggle", 0, 0, "segment", u[0]});
          emit(t, x);
        }
      }
      continue;
    }

    bool did_model = false;
    for (const EventHit& hit : res.events) {
      if (hit.label == "soc_high" || hit.label == "soc_low") {
        ++toggles;
        charging = !charging;
        u[0] = charging ? in.freeze_level : in.melt_level;
        events.push_back({t, "input_toggle", 0, 0, hit.label, u[0]});
        if (in.stop_after_toggles > 0 && toggles >= in.stop_after_toggles) stopped = true;
      } else if (!did_model && hooks.on_model_event) {
        did_model = hooks.on_model_event(hit, t);
      }
    }
    if (did_model && hooks.after_model_event) hooks.after_model_event(t);
    emit(t, x);
  }
  return t;
}

inline void finalize_result(ModelRunResult& r) {
  const TimeSeries& traj = r.trajectory;
  const std::vector<double>& p_wf = traj.column("p_in_wf_kw");
  const std::vector<double>& p_air = traj.column("p_in_air_kw");
  const std::vector<double>& p_out = traj.column("p_out_kw");
  std::vector<double> net(traj.rows()), gross(traj.rows());
  for (std::size_t i = 0; i < traj.rows(); ++i) {
    net[i] = p_wf[i] + p_air[i] - p_out[i];
    gross[i] = std::abs(p_wf[i]) + std::abs(p_air[i]) + std::abs(p_out[i]);
  }
  r.audit = energy_audit(traj.time, traj.column("stored_kj"), net, gross);

  for (const SimEvent& e : r.events)
    if (e.kind == "input_toggle" && e.reason == "soc_high") {
      r.freeze_time = e.time;
      break;
    }
  if (!r.freeze_time)
    for (const SimEvent& e : r.events)
      if (e.kind == "mode_transition" && e.reason == "freeze complete") {
        r.freeze_time = e.time;
        break;
      }
  if (!r.freeze_time) r.freeze_time = freeze_time(traj.time, traj.column("soc"), 0.999);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fixed-grid runner
// ---------------------------------------------------------------------------

/// Runs the scenario on the fixed-grid model. `sections` overrides
/// scenario.fg_sections when positive.
inline ModelRunResult run_scenario_fg(const Scenario& sc, int sections = 0) {
  const int n = sections > 0 ? sections : sc.fg_sections;
  FgModel model = build_fixed_grid_model(sc.geometry, sc.materials, sc.pcm, sc.mdot, n);
  const ThermalGraph& graph = model.graph;

  ModelRunResult out;
  out.model_label = "fg";
  out.sections = n;

  std::vector<double> x;
  if (!sc.initial.state.empty()) {
    if (sc.initial.state.size() != static_cast<std::size_t>(model.states()))
      throw ScenarioError("run_scenario_fg: explicit state has " +
                          std::to_string(sc.initial.state.size()) + " entries, model has " +
                          std::to_string(model.states()));
    x = sc.initial.state;
  } else {
    x = model.initial_state(sc.initial.temperature, sc.initial.pcm_phase);
  }

  std::array<double, 2> u{sc.inlet.initial_level(), sc.t_ambient};

  TrBdf2 solver(model.states(),
                [&graph, &u](double t, std::span<const double> xs, std::span<double> dxdt) {
                  graph.rhs({t, xs, {u.data(), u.size()}, 0}, {}, dxdt);
                },
                detail::solver_config_for(sc, model.states(), -1));

  std::vector<std::string> names = {"t_inlet_c",  "t_ambient_c", "soc",
                                    "stored_kj",  "p_in_wf_kw",  "p_in_air_kw",
                                    "p_out_kw",   "h_outlet_kj_per_kg"};
  for (const std::string& s : model.state_names()) names.push_back("h_" + s + "_kj_per_kg");
  for (int v = 0; v < graph.dynamic_count(); ++v)
    names.push_back("temp_" + graph.vertex_name(v) + "_c");
  TimeSeries traj(names);

  const int e_out = 0;
  const int e_adv_in = graph.edge_count() - 2;
  const int e_amb_in = graph.edge_count() - 1;
  auto emit = [&](double t, std::span<const double> xs) {
    if (!traj.time.empty() && !(t > traj.time.back())) return;
    const EvalArgs a{t, xs, {u.data(), u.size()}, 0};
    std::vector<double> row;
    row.reserve(names.size());
    const std::vector<double> p = graph.edge_powers(a);
    row.push_back(u[0]);
    row.push_back(u[1]);
    row.push_back(model.soc(xs));
    row.push_back(graph.stored_energy(a));
    row.push_back(p[static_cast<std::size_t>(e_adv_in)]);
    row.push_back(p[static_cast<std::size_t>(e_amb_in)]);
    row.push_back(p[static_cast<std::size_t>(e_out)]);
    row.push_back(xs[0]);
    for (double v : xs) row.push_back(v);
    for (int v = 0; v < graph.dynamic_count(); ++v) row.push_back(graph.vertex_temperature(v, a));
    traj.add_row(t, row);
  };

  out.end_time = detail::run_schedule(
      sc, solver, x, u, [&model](std::span<const double> xs) { return model.soc(xs); }, emit,
      out.events, {});
  out.final_state = x;
  out.trajectory = std::move(traj);
  out.stats = solver.stats();
  detail::finalize_result(out);
  return out;
}

// ---------------------------------------------------------------------------
// Moving-boundary runner
// ---------------------------------------------------------------------------

inline ModelRunResult run_scenario_mb(const Scenario& sc) {
  MbModel model = build_moving_boundary_model(sc.geometry, sc.materials, sc.pcm, sc.mdot,
                                              sc.total_mass);
  const ThermalGraph& graph = model.graph;
  const MbContext& c = *model.ctx;

  ModelRunResult out;
  out.model_label = "mb";

  FsmMode mode = FsmMode::AllLiquid;
  std::vector<double> x;
  if (!sc.initial.state.empty()) {
    if (sc.initial.state.size() != static_cast<std::size_t>(model.states()))
      throw ScenarioError("run_scenario_mb: explicit state has " +
                          std::to_string(sc.initial.state.size()) + " entries, model has " +
                          std::to_string(model.states()));
    if (sc.initial.mb_mode == 0)
      throw ScenarioError("run_scenario_mb: explicit state needs [initial] mb_mode");
    x = sc.initial.state;
    mode = fsm_mode_from_int(sc.initial.mb_mode);
  } else {
    x = model.initial_state(sc.initial.temperature, sc.initial.pcm_phase, &mode);
  }
  std::vector<char> gates = mb_gate_mask(mode);

  std::array<double, 2> u{sc.inlet.initial_level(), sc.t_ambient};

  TrBdf2 solver(model.states(),
                [&graph, &u, &mode, &gates](double t, std::span<const double> xs,
                                            std::span<double> dxdt) {
                  graph.rhs({t, xs, {u.data(), u.size()}, static_cast<int>(mode)}, gates, dxdt);
                },
                detail::solver_config_for(sc, model.states(), MbIndex::soc));

  std::vector<std::string> names = {"t_inlet_c",   "t_ambient_c",   "soc",
                                    "stored_kj",   "p_in_wf_kw",    "p_in_air_kw",
                                    "p_out_kw",    "h_outlet_kj_per_kg",
                                    "mode",        "r_interface_m", "t_surface_c"};
  const std::vector<std::string> state_names = model.state_names();
  for (int i = 0; i < model.states(); ++i)
    if (i != MbIndex::soc) names.push_back("h_" + state_names[static_cast<std::size_t>(i)] +
                                           "_kj_per_kg");
  for (int v = 0; v < graph.dynamic_count(); ++v)
    names.push_back("temp_" + graph.vertex_name(v) + "_c");
  TimeSeries traj(names);

  auto emit = [&](double t, std::span<const double> xs) {
    if (!traj.time.empty() && !(t > traj.time.back())) return;
    const EvalArgs a{t, xs, {u.data(), u.size()}, static_cast<int>(mode)};
    std::vector<double> row;
    row.reserve(names.size());
    const std::vector<double> p = graph.edge_powers(a, gates);
    row.push_back(u[0]);
    row.push_back(u[1]);
    row.push_back(xs[MbIndex::soc]);
    row.push_back(graph.stored_energy(a));
    row.push_back(p[MbEdge::advective_in]);
    row.push_back(p[MbEdge::ambient_in]);
    row.push_back(p[MbEdge::advective_out]);
    row.push_back(xs[MbIndex::wf]);
    row.push_back(static_cast<double>(mode));
    row.push_back(mb_regions(xs[MbIndex::soc], mode, c).interface_radius);
    row.push_back(mb_surface_temperature(xs, mode, c));
    for (int i = 0; i < model.states(); ++i)
      if (i != MbIndex::soc) row.push_back(xs[static_cast<std::size_t>(i)]);
    for (int v = 0; v < graph.dynamic_count(); ++v) row.push_back(graph.vertex_temperature(v, a));
    traj.add_row(t, row);
  };

  out.mode_trace.push_back(static_cast<int>(mode));
  auto transition = [&](FsmMode to, const std::string& reason, double t) {
    apply_transition(mode, to, x, c.pcm);
    out.events.push_back({t, "mode_transition", static_cast<int>(mode), static_cast<int>(to),
                          reason, u[0]});
    mode = to;
    gates = mb_gate_mask(mode);
    out.mode_trace.push_back(static_cast<int>(mode));
  };
  auto state_check = [&](double t) {
    const auto decision =
        fsm_step(mode, x[MbIndex::soc], mb_surface_temperature(x, mode, c), c.pcm.t_sat);
    if (decision) transition(decision->next, decision->reason, t);
  };

  detail::RunHooks hooks;
  hooks.model_events = [&]() {
    std::vector<EventSpec> specs;
    auto surface = [&mode, &c](double, std::span<const double> xs) {
      return mb_surface_temperature(xs, mode, c) - c.pcm.t_sat;
    };
    auto soc_val = [](double, std::span<const double> xs) { return xs[MbIndex::soc]; };
    switch (mode) {
      case FsmMode::AllLiquid:
        specs.push_back({"surface subcooled", surface, EventDirection::Falling, 1});
        break;
      case FsmMode::Freezing:
        specs.push_back({"freeze complete",
                         [soc_val](double t, std::span<const double> xs) {
                           return soc_val(t, xs) - 1.0;
                         },
                         EventDirection::Rising, 2});
        specs.push_back({"surface superheated", surface, EventDirection::Rising, 1});
        break;
      case FsmMode::AllSolid:
        specs.push_back({"surface superheated", surface, EventDirection::Rising, 1});
        break;
      case FsmMode::Melting:
        specs.push_back({"melt complete", soc_val, EventDirection::Falling, 2});
        specs.push_back({"surface subcooled", surface, EventDirection::Falling, 1});
        break;
    }
    return specs;
  };
  hooks.on_model_event = [&](const EventHit& hit, double t) {
    if (hit.label == "surface subcooled") transition(FsmMode::Freezing, hit.label, t);
    else if (hit.label == "freeze complete") transition(FsmMode::AllSolid, hit.label, t);
    else if (hit.label == "surface superheated") transition(FsmMode::Melting, hit.label, t);
    else if (hit.label == "melt complete") transition(FsmMode::AllLiquid, hit.label, t);
    else return false;
    return true;
  };
  hooks.after_model_event = state_check;

  state_check(0.0);
  out.end_time = detail::run_schedule(
      sc, solver, x, u, [](std::span<const double> xs) { return xs[MbIndex::soc]; }, emit,
      out.events, hooks);
  out.final_state = x;
  out.final_mode = static_cast<int>(mode);
  out.trajectory = std::move(traj);
  out.stats = solver.stats();
  detail::finalize_result(out);
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch, comparison, grid sweep
// ---------------------------------------------------------------------------

inline std::vector<ModelRunResult> run_scenario(const Scenario& sc) {
  std::vector<ModelRunResult> out;
  if (sc.model != ModelSelect::Mb) out.push_back(run_scenario_fg(sc));
  if (sc.model != ModelSelect::Fg) out.push_back(run_scenario_mb(sc));
  return out;
}

struct ComparisonResult {
  ModelRunResult fg;
  ModelRunResult mb;
  SocErrorSeries delta;  // |soc_fg - soc_mb| on the union grid
};

inline ComparisonResult compare_models(const Scenario& sc) {
  ComparisonResult r;
  r.fg = run_scenario_fg(sc);
  r.mb = run_scenario_mb(sc);
  r.delta = delta_soc(r.fg.trajectory.time, r.fg.trajectory.column("soc"),
                      r.mb.trajectory.time, r.mb.trajectory.column("soc"));
  return r;
}

struct SweepRow {
  std::string model_label;  // "fg" | "mb"
  int sections = 0;         // 0 for mb
  std::optional<double> freeze_time;  // s
  double t_comp_mean = 0.0;           // s, mean integrator wall time over reps
  double n_steps_mean = 0.0;          // mean step attempts over reps
  std::string status = "ok";
};

/// Runs the scenario on the fixed-grid model for each section count (and on
/// the moving-boundary model when `include_mb`), repeating `reps` times for
/// a stable cost estimate. A failing cell is reported, not fatal.
inline std::vector<SweepRow> sweep_grid(const Scenario& sc, std::span<const int> section_counts,
                                        int reps = 1, bool include_mb = true) {
  if (reps < 1) throw std::invalid_argument("sweep_grid: reps must be >= 1");
  std::vector<SweepRow> rows;
  auto run_cell = [&](const std::string& label, int sections) {
    SweepRow row;
    row.model_label = label;
    row.sections = sections;
    try {
      std::vector<RunStats> stats;
      for (int rep = 0; rep < reps; ++rep) {
        ModelRunResult r = label == "fg" ? run_scenario_fg(sc, sections) : run_scenario_mb(sc);
        stats.push_back(r.stats);
        if (rep + 1 == reps) row.freeze_time = r.freeze_time;
      }
      const RunCost cost = run_stats_summary(stats);
      row.t_comp_mean = cost.t_comp;
      row.n_steps_mean = cost.n_steps;
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
    }
    rows.push_back(std::move(row));
  };
  for (int n : section_counts) run_cell("fg", n);
  if (include_mb) run_cell("mb", 0);
  return rows;
}

}  // namespace tes
