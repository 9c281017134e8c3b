#pragma once

// Column-oriented sampled trajectory. Rows are appended in strictly
// increasing time order; every named column has one value per row.

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tes {

struct TimeSeries {
  std::vector<double> time;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  explicit TimeSeries(std::vector<std::string> column_names = {})
      : names(std::move(column_names)), columns(names.size()) {}

  std::size_t rows() const { return time.size(); }

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    throw std::invalid_argument("TimeSeries: no column named " + std::string(name));
  }

  const std::vector<double>& column(std::string_view name) const {
    return columns[column_index(name)];
  }

  void add_row(double t, std::span<const double> values) {
    if (values.size() != names.size())
      throw std::invalid_argument("TimeSeries: row width does not match column count");
    if (!time.empty() && !(t > time.back()))
      throw std::invalid_argument("TimeSeries: row times must be strictly increasing");
    time.push_back(t);
    for (std::size_t i = 0; i < values.size(); ++i) columns[i].push_back(values[i]);
  }
};

/// Linear interpolation of samples (t, v) at `at`, clamped to the end values
/// outside the sampled range. `t` must be increasing.
inline double interpolate(std::span<const double> t, std::span<const double> v, double at) {
  if (t.empty() || t.size() != v.size())
    throw std::invalid_argument("interpolate: need equal-length non-empty samples");
  if (at <= t.front()) return v.front();
  if (at >= t.back()) return v.back();
  std::size_t hi = 1;
  while (t[hi] < at) ++hi;
  const double w = (at - t[hi - 1]) / (t[hi] - t[hi - 1]);
  return v[hi - 1] + w * (v[hi] - v[hi - 1]);
}

}  // namespace tes
