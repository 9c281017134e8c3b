#pragma once

// Comparison metrics between two simulated SOC trajectories and summaries of
// run statistics.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tes/ode.hpp"
#include "tes/timeseries.hpp"

namespace tes {

/// Pointwise |soc_a - soc_b| on the union of both time grids, restricted to
/// the overlapping interval. `truncated` flags differing horizons.
struct SocErrorSeries {
  std::vector<double> time;
  std::vector<double> value;
  double max = 0.0;
  double mean = 0.0;
  bool truncated = false;
};

inline SocErrorSeries delta_soc(std::span<const double> time_a, std::span<const double> soc_a,
                                std::span<const double> time_b, std::span<const double> soc_b) {
  if (time_a.empty() || time_b.empty())
    throw std::invalid_argument("delta_soc: empty series");
  if (time_a.size() != soc_a.size() || time_b.size() != soc_b.size())
    throw std::invalid_argument("delta_soc: time/value length mismatch");

  const double t_lo = std::max(time_a.front(), time_b.front());
  const double t_hi = std::min(time_a.back(), time_b.back());
  if (!(t_hi >= t_lo)) throw std::invalid_argument("delta_soc: series do not overlap");

  SocErrorSeries out;
  out.truncated = time_a.front() != time_b.front() || time_a.back() != time_b.back();
  out.time.reserve(time_a.size() + time_b.size());
  std::size_t ia = 0, ib = 0;
  while (ia < time_a.size() || ib < time_b.size()) {
    double t;
    if (ib >= time_b.size() || (ia < time_a.size() && time_a[ia] <= time_b[ib])) {
      t = time_a[ia];
      if (ib < time_b.size() && time_b[ib] == t) ++ib;
      ++ia;
    } else {
      t = time_b[ib];
      ++ib;
    }
    if (t < t_lo || t > t_hi) continue;
    if (!out.time.empty() && t == out.time.back()) continue;
    out.time.push_back(t);
  }

  out.value.resize(out.time.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < out.time.size(); ++i) {
    const double d = std::abs(interpolate(time_a, soc_a, out.time[i]) -
                              interpolate(time_b, soc_b, out.time[i]));
    out.value[i] = d;
    out.max = std::max(out.max, d);
    sum += d;
  }
  out.mean = out.value.empty() ? 0.0 : sum / out.value.size();
  return out;
}

/// First time the series reaches `threshold`, linearly interpolated between
/// samples; empty when the threshold is never reached.
inline std::optional<double> freeze_time(std::span<const double> time,
                                         std::span<const double> soc, double threshold) {
  if (time.size() != soc.size()) throw std::invalid_argument("freeze_time: length mismatch");
  for (std::size_t i = 0; i < soc.size(); ++i) {
    if (soc[i] >= threshold) {
      if (i == 0 || soc[i] == soc[i - 1]) return time[i];
      const double w = (threshold - soc[i - 1]) / (soc[i] - soc[i - 1]);
      return time[i - 1] + w * (time[i] - time[i - 1]);
    }
  }
  return std::nullopt;
}

/// Means of wall-clock cost and step attempts (accepted plus rejected) over
/// repeated runs.
struct RunCost {
  double t_comp = 0.0;  // s
  double n_steps = 0.0;
};

inline RunCost run_stats_summary(std::span<const RunStats> runs) {
  if (runs.empty()) throw std::invalid_argument("run_stats_summary: no runs");
  RunCost cost;
  for (const RunStats& r : runs) {
    cost.t_comp += r.wall_time;
    cost.n_steps += static_cast<double>(r.total_steps());
  }
  cost.t_comp /= static_cast<double>(runs.size());
  cost.n_steps /= static_cast<double>(runs.size());
  return cost;
}

}  // namespace tes
