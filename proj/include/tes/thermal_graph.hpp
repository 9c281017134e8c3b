#pragma once

// Graph representation of a lumped thermal network.
//
// Dynamic vertices carry a stored state (specific enthalpy, or any scalar
// with a capacitance law); sink vertices are boundary nodes with a reported
// value but no state. Directed edges carry heat flows in kW, positive from
// tail to head. Source edges inject power from outside the network and have
// no tail row in the incidence matrix.
//
// The state equation per dynamic vertex i is
//
//   C_i(args) * dx_i/dt = sum of edge powers into i - sum of powers out of i
//
// which is the row form of C xdot = -M_bar P with M_bar the dynamic-vertex
// block of the incidence matrix. Edge power laws may depend on the full
// state, the external input vector u, and an integer mode tag, but not on
// hidden mutable data: evaluation is pure.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tes {

/// Raised when a law evaluates to something the network cannot use
/// (non-finite power, zero or non-finite capacitance). The ODE solver treats
/// these as recoverable during trial steps.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments every law is evaluated against.
struct EvalArgs {
  double t = 0.0;
  std::span<const double> x;
  std::span<const double> u;
  int mode = 0;
};

using ScalarLaw = std::function<double(const EvalArgs&)>;

class ThermalGraph {
 public:
  static constexpr int kExternal = -1;

  // -- construction ---------------------------------------------------------

  /// Adds a state-carrying vertex. `capacitance` must never evaluate to zero;
  /// `temperature` reports the vertex temperature in degC; `stored_energy`
  /// reports the energy content in kJ used by the audit.
  int add_dynamic_vertex(std::string name, ScalarLaw capacitance, ScalarLaw temperature,
                         ScalarLaw stored_energy) {
    if (!sinks_.empty())
      throw std::invalid_argument(
          "ThermalGraph: add dynamic vertices before sink vertices");
    dynamics_.push_back({std::move(name), std::move(capacitance), std::move(temperature),
                         std::move(stored_energy)});
    return static_cast<int>(dynamics_.size()) - 1;
  }

  /// Adds a boundary vertex with a reported value but no state.
  int add_sink_vertex(std::string name, ScalarLaw value) {
    sinks_.push_back({std::move(name), std::move(value)});
    return static_cast<int>(dynamics_.size() + sinks_.size()) - 1;
  }

  /// Adds a directed edge tail -> head. Endpoints are vertex ids from the
  /// add_* calls; kExternal marks a boundary outside the network.
  int add_edge(std::string name, int tail, int head, ScalarLaw power) {
    check_endpoint(tail, "tail");
    check_endpoint(head, "head");
    if (tail == kExternal && head == kExternal)
      throw std::invalid_argument("ThermalGraph: edge needs at least one vertex endpoint");
    edges_.push_back({std::move(name), tail, head, std::move(power)});
    return static_cast<int>(edges_.size()) - 1;
  }

  /// Source edge: power injected from outside into `head`.
  int add_source_edge(std::string name, int head, ScalarLaw power) {
    return add_edge(std::move(name), kExternal, head, std::move(power));
  }

  /// Declares the external input vector and the constant matrix mapping it
  /// into edge powers (row e gives dP_e/du). Purely descriptive: the power
  /// laws themselves consume args.u.
  void set_input_map(std::vector<std::string> input_names,
                     std::vector<std::vector<double>> dpower_dinput) {
    if (dpower_dinput.size() != edges_.size())
      throw std::invalid_argument("ThermalGraph: input map needs one row per edge");
    for (const auto& row : dpower_dinput)
      if (row.size() != input_names.size())
        throw std::invalid_argument("ThermalGraph: input map row width != input count");
    input_names_ = std::move(input_names);
    input_map_ = std::move(dpower_dinput);
  }

  // -- shape ----------------------------------------------------------------

  int dynamic_count() const { return static_cast<int>(dynamics_.size()); }
  int sink_count() const { return static_cast<int>(sinks_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int input_count() const { return static_cast<int>(input_names_.size()); }

  const std::string& vertex_name(int v) const {
    return v < dynamic_count() ? dynamics_[v].name : sinks_[sink_index(v)].name;
  }
  const std::string& edge_name(int e) const { return edges_.at(e).name; }
  const std::vector<std::string>& input_names() const { return input_names_; }
  const std::vector<std::vector<double>>& input_map() const { return input_map_; }
  int edge_tail(int e) const { return edges_.at(e).tail; }
  int edge_head(int e) const { return edges_.at(e).head; }
  double input_gain(int e, int i) const {
    return input_map_.at(static_cast<std::size_t>(e)).at(static_cast<std::size_t>(i));
  }

  /// Full incidence matrix, (dynamic + sink) rows by edge columns: +1 where
  /// the vertex is the edge's tail, -1 where it is the head. Source edges
  /// contribute a single -1 entry.
  std::vector<std::vector<int>> incidence() const {
    std::vector<std::vector<int>> m(dynamics_.size() + sinks_.size(),
                                    std::vector<int>(edges_.size(), 0));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (edges_[e].tail != kExternal) m[edges_[e].tail][e] += 1;
      if (edges_[e].head != kExternal) m[edges_[e].head][e] -= 1;
    }
    return m;
  }

  // -- evaluation -----------------------------------------------------------

  double vertex_capacitance(int v, const EvalArgs& args) const {
    const double c = dynamics_.at(v).capacitance(args);
    if (!std::isfinite(c) || c == 0.0)
      throw EvaluationError("ThermalGraph: capacitance of vertex '" + dynamics_[v].name +
                            "' is " + (c == 0.0 ? "zero" : "not finite"));
    return c;
  }

  double vertex_temperature(int v, const EvalArgs& args) const {
    return dynamics_.at(v).temperature(args);
  }

  double vertex_stored_energy(int v, const EvalArgs& args) const {
    return dynamics_.at(v).stored_energy(args);
  }

  double sink_value(int v, const EvalArgs& args) const {
    return sinks_.at(sink_index(v)).value(args);
  }

  /// Power on edge e, kW. Gated-off edges are never evaluated by rhs(); this
  /// accessor always evaluates.
  double edge_power(int e, const EvalArgs& args) const {
    const double p = edges_.at(e).power(args);
    if (!std::isfinite(p))
      throw EvaluationError("ThermalGraph: power on edge '" + edges_[e].name +
                            "' is not finite");
    return p;
  }

  /// All edge powers; gated-off edges report 0 without being evaluated.
  std::vector<double> edge_powers(const EvalArgs& args, std::span<const char> gates = {}) const {
    check_gates(gates);
    std::vector<double> p(edges_.size(), 0.0);
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (gates.empty() || gates[e]) p[e] = edge_power(static_cast<int>(e), args);
    return p;
  }

  /// Total stored energy over the dynamic vertices, kJ.
  double stored_energy(const EvalArgs& args) const {
    double sum = 0.0;
    for (int v = 0; v < dynamic_count(); ++v) sum += dynamics_[v].stored_energy(args);
    return sum;
  }

  /// State derivative: dxdt_i = (net power into vertex i) / C_i. `gates`
  /// masks edges by index (empty = all active); a gated-off edge's law is not
  /// evaluated at all.
  void rhs(const EvalArgs& args, std::span<const char> gates, std::span<double> dxdt) const {
    check_gates(gates);
    if (dxdt.size() != dynamics_.size())
      throw std::invalid_argument("ThermalGraph: rhs output size != dynamic vertex count");
    for (auto& v : dxdt) v = 0.0;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (!gates.empty() && !gates[e]) continue;
      const double p = edge_power(static_cast<int>(e), args);
      if (edges_[e].tail >= 0 && edges_[e].tail < dynamic_count()) dxdt[edges_[e].tail] -= p;
      if (edges_[e].head >= 0 && edges_[e].head < dynamic_count()) dxdt[edges_[e].head] += p;
    }
    for (int v = 0; v < dynamic_count(); ++v) dxdt[v] /= vertex_capacitance(v, args);
  }

 private:
  struct Dynamic {
    std::string name;
    ScalarLaw capacitance;
    ScalarLaw temperature;
    ScalarLaw stored_energy;
  };
  struct Sink {
    std::string name;
    ScalarLaw value;
  };
  struct Edge {
    std::string name;
    int tail;
    int head;
    ScalarLaw power;
  };

  void check_endpoint(int v, const char* which) const {
    const int total = static_cast<int>(dynamics_.size() + sinks_.size());
    if (v != kExternal && (v < 0 || v >= total))
      throw std::invalid_argument(std::string("ThermalGraph: edge ") + which +
                                  " is not a known vertex");
  }

  int sink_index(int v) const {
    const int s = v - dynamic_count();
    if (s < 0 || s >= sink_count())
      throw std::invalid_argument("ThermalGraph: vertex id is not a sink vertex");
    return s;
  }

  void check_gates(std::span<const char> gates) const {
    if (!gates.empty() && gates.size() != edges_.size())
      throw std::invalid_argument("ThermalGraph: gate mask size != edge count");
  }

  std::vector<Dynamic> dynamics_;
  std::vector<Sink> sinks_;
  std::vector<Edge> edges_;
  std::vector<std::string> input_names_;
  std::vector<std::vector<double>> input_map_;
};

// ---------------------------------------------------------------------------
// Energy audit
// ---------------------------------------------------------------------------

/// Conservation check over a sampled trajectory. `net_boundary_power` is the
/// signed net inflow at each sample (kW); `gross_boundary_power` the sum of
/// magnitudes of all boundary flows. The residual compares the change in
/// stored energy against the trapezoid integral of the net inflow, and is
/// reported as a fraction of the integrated gross throughput.
struct EnergyAudit {
  double residual = 0.0;           // kJ
  double throughput = 0.0;         // kJ
  double residual_fraction = 0.0;  // residual / max(throughput, tiny)
};

inline double trapezoid(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size())
    throw std::invalid_argument("trapezoid: mismatched sample lengths");
  double sum = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i)
    sum += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
  return sum;
}

inline EnergyAudit energy_audit(std::span<const double> time, std::span<const double> stored,
                                std::span<const double> net_boundary_power,
                                std::span<const double> gross_boundary_power) {
  if (time.empty() || stored.size() != time.size() ||
      net_boundary_power.size() != time.size() || gross_boundary_power.size() != time.size())
    throw std::invalid_argument("energy_audit: need equal-length non-empty samples");
  EnergyAudit audit;
  audit.residual = std::abs((stored.back() - stored.front()) - trapezoid(time, net_boundary_power));
  audit.throughput = trapezoid(time, gross_boundary_power);
  audit.residual_fraction = audit.residual / std::max(audit.throughput, 1e-12);
  return audit;
}

}  // namespace tes
