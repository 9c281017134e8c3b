#pragma once

// File output: trajectory/event/sweep CSVs, a machine-readable run report
// (JSON), and a dump of the thermal network structure. All numbers go
// through format_double (shortest round-trip form), so identical runs
// produce byte-identical files.

#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tes/format.hpp"
#include "tes/simulation.hpp"
#include "tes/thermal_graph.hpp"
#include "tes/timeseries.hpp"

namespace tes {

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("open_output: cannot open " + path);
  return out;
}

/// Quotes a CSV field only when it needs it.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

}  // namespace detail

inline void write_trajectory_csv(std::ostream& out, const TimeSeries& traj) {
  out << "time_s";
  for (const std::string& name : traj.names) out << ',' << detail::csv_field(name);
  out << '\n';
  for (std::size_t row = 0; row < traj.rows(); ++row) {
    out << format_double(traj.time[row]);
    for (const auto& col : traj.columns) out << ',' << format_double(col[row]);
    out << '\n';
  }
}

inline void write_events_csv(std::ostream& out, const std::vector<SimEvent>& events) {
  out << "time_s,kind,from_mode,to_mode,reason,t_inlet_after_c\n";
  for (const SimEvent& e : events) {
    out << format_double(e.time) << ',' << detail::csv_field(e.kind) << ',';
    if (e.kind == "mode_transition") out << e.from_mode << ',' << e.to_mode;
    else out << ',';
    out << ',' << detail::csv_field(e.reason) << ',' << format_double(e.t_inlet_after) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "model,n_sections,t_freeze_s,t_comp_s,n_steps,status\n";
  for (const SweepRow& r : rows) {
    out << r.model_label << ',';
    if (r.sections > 0) out << r.sections;
    out << ',';
    if (r.freeze_time) out << format_double(*r.freeze_time);
    out << ',' << format_double(r.t_comp_mean) << ',' << format_double(r.n_steps_mean) << ','
        << detail::csv_field(r.status) << '\n';
  }
}

/// Structure dump: vertex list, edge list, incidence matrix, input map.
inline void write_graph_csv(std::ostream& out, const ThermalGraph& g) {
  const int total = g.dynamic_count() + g.sink_count();
  out << "# vertices\nindex,name,kind\n";
  for (int v = 0; v < total; ++v)
    out << v << ',' << detail::csv_field(g.vertex_name(v)) << ','
        << (v < g.dynamic_count() ? "dynamic" : "sink") << '\n';
  out << "# edges\nindex,name,tail,head\n";
  for (int e = 0; e < g.edge_count(); ++e) {
    out << e << ',' << detail::csv_field(g.edge_name(e)) << ',';
    if (g.edge_tail(e) != ThermalGraph::kExternal) out << g.edge_tail(e);
    out << ',' << g.edge_head(e) << '\n';
  }
  out << "# incidence\n";
  const auto m = g.incidence();
  for (int v = 0; v < total; ++v) {
    out << detail::csv_field(g.vertex_name(v));
    for (int e = 0; e < g.edge_count(); ++e) out << ',' << m[v][e];
    out << '\n';
  }
  if (g.input_count() > 0) {
    out << "# input_map\nedge";
    for (const std::string& name : g.input_names()) out << ',' << detail::csv_field(name);
    out << '\n';
    for (int e = 0; e < g.edge_count(); ++e) {
      out << detail::csv_field(g.edge_name(e));
      for (int i = 0; i < g.input_count(); ++i)
        out << ',' << format_double(g.input_gain(e, i));
      out << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Run report (JSON)
// ---------------------------------------------------------------------------

inline nlohmann::json stats_json(const RunStats& s) {
  return {{"n_steps", s.total_steps()},
          {"accepted_steps", s.accepted_steps},
          {"rejected_steps", s.rejected_steps},
          {"rhs_evaluations", s.rhs_evaluations},
          {"jacobian_evaluations", s.jacobian_evaluations},
          {"lu_factorizations", s.lu_factorizations},
          {"newton_iterations", s.newton_iterations},
          {"event_count", s.event_count},
          {"wall_time_s", s.wall_time}};
}

inline nlohmann::json result_json(const ModelRunResult& r) {
  nlohmann::json j{{"model", r.model_label},
                   {"end_time_s", r.end_time},
                   {"rows", r.trajectory.rows()},
                   {"stats", stats_json(r.stats)},
                   {"audit",
                    {{"residual_kj", r.audit.residual},
                     {"throughput_kj", r.audit.throughput},
                     {"residual_fraction", r.audit.residual_fraction}}},
                   {"events", r.events.size()}};
  if (r.model_label == "fg") j["sections"] = r.sections;
  if (r.model_label == "mb") {
    j["mode_trace"] = r.mode_trace;
    j["final_mode"] = r.final_mode;
  }
  if (r.freeze_time) j["freeze_time_s"] = *r.freeze_time;
  return j;
}

inline nlohmann::json report_json(const std::string& scenario_name,
                                  const std::vector<ModelRunResult>& runs,
                                  const SocErrorSeries* delta = nullptr) {
  nlohmann::json j{{"scenario", scenario_name}, {"runs", nlohmann::json::array()}};
  for (const ModelRunResult& r : runs) j["runs"].push_back(result_json(r));
  if (delta) {
    j["delta_soc"] = {{"max", delta->max},
                      {"mean", delta->mean},
                      {"truncated", delta->truncated}};
  }
  return j;
}

/// One-line machine-readable error for the CLI's stderr.
inline std::string error_json(const std::string& kind, const std::string& message) {
  return nlohmann::json{{"error", kind}, {"message", message}}.dump();
}

// ---------------------------------------------------------------------------
// Path helpers
// ---------------------------------------------------------------------------

inline void write_file(const std::string& path,
                       const std::function<void(std::ostream&)>& body) {
  std::ofstream out = detail::open_output(path);
  body(out);
  if (!out) throw std::runtime_error("write_file: write failed for " + path);
}

}  // namespace tes
