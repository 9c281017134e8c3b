#pragma once

// Adaptive one-step implicit integrator for stiff ODE systems
// x' = f(t, x), with root-finding on scalar event functions.
//
// Each step combines a trapezoidal half-stage over the fraction
// gamma = 2 - sqrt(2) of the step with a variable-coefficient BDF2 stage
// over the remainder. Both stages share the iteration matrix
// A = I - d*h*J, d = 1 - sqrt(2)/2, so one LU factorization serves the whole
// step. A third-order embedded solution provides the error estimate, which
// is passed through A^{-1} to keep it bounded for very stiff modes.
//
// Events are scanned on every accepted step by sampling the cubic Hermite
// interpolant, then bisected to a time tolerance. A crossing counts only if
// the left end is strictly on the "not yet fired" side, so integration can
// restart exactly at an event without retriggering it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tes/thermal_graph.hpp"  // EvaluationError

namespace tes {

using OdeRhs = std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;
using EventFn = std::function<double(double t, std::span<const double> x)>;

enum class EventDirection { Rising, Falling, Either };

struct EventSpec {
  std::string label;
  EventFn value;
  EventDirection direction = EventDirection::Either;
  int priority = 0;  // ties within the time tolerance resolve to higher priority
};

struct EventHit {
  int index = -1;  // position in the event list
  double time = 0.0;
  std::string label;
};

struct SolverConfig {
  double rel_tol = 1e-3;
  std::vector<double> abs_tol = {1e-6};  // per state; a single entry broadcasts
  double initial_step = 0.0;             // 0 = choose automatically
  double min_step = 1e-10;
  double max_step = 0.0;                 // 0 = only capped by the interval
  double event_time_tol = 1e-6;
  int max_newton_iterations = 10;
  int event_subsamples = 8;  // dense samples per step when scanning for events
  bool use_jacobian = true;  // false = iterate without the Jacobian (experiments only)
};

struct RunStats {
  long accepted_steps = 0;
  long rejected_steps = 0;
  long rhs_evaluations = 0;
  long jacobian_evaluations = 0;
  long lu_factorizations = 0;
  long newton_iterations = 0;
  long event_count = 0;
  double wall_time = 0.0;  // s

  long total_steps() const { return accepted_steps + rejected_steps; }
};

struct IntegrationResult {
  double end_time = 0.0;
  std::vector<double> state;
  std::vector<EventHit> events;  // empty when the interval end was reached
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrBdf2 {
 public:
  TrBdf2(int dimension, OdeRhs rhs, SolverConfig config = {})
      : n_(dimension), rhs_(std::move(rhs)), cfg_(std::move(config)) {
    if (n_ <= 0) throw std::invalid_argument("TrBdf2: dimension must be positive");
    if (!rhs_) throw std::invalid_argument("TrBdf2: rhs is empty");
    if (cfg_.abs_tol.empty())
      throw std::invalid_argument("TrBdf2: abs_tol must not be empty");
    if (cfg_.abs_tol.size() == 1) cfg_.abs_tol.assign(n_, cfg_.abs_tol[0]);
    if (cfg_.abs_tol.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("TrBdf2: abs_tol size != dimension");
    if (!(cfg_.rel_tol > 0.0) || !(cfg_.min_step > 0.0))
      throw std::invalid_argument("TrBdf2: tolerances and min_step must be positive");
  }

  void set_events(std::vector<EventSpec> events) { events_ = std::move(events); }

  /// Called after every error test with (t, h, weighted error, accepted).
  /// Newton/evaluation failures report with a negative error.
  void set_step_monitor(std::function<void(double, double, double, bool)> monitor) {
    monitor_ = std::move(monitor);
  }

  const RunStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }

  /// Integrates from (t0, x0) until t1 or the first event crossing.
  /// `sample_times` (increasing, inside (t0, t1]) are evaluated on the dense
  /// interpolant and handed to `on_sample` in order; times past an event are
  /// dropped. The end state is returned, not passed to `on_sample`.
  IntegrationResult integrate(double t0, std::span<const double> x0, double t1,
                              std::span<const double> sample_times = {},
                              const std::function<void(double, std::span<const double>)>&
                                  on_sample = {}) {
    if (x0.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("TrBdf2: state size != dimension");
    if (t1 < t0) throw std::invalid_argument("TrBdf2: t1 must be >= t0");
    const auto wall_start = std::chrono::steady_clock::now();

    std::vector<double> x(x0.begin(), x0.end());
    IntegrationResult result;
    result.end_time = t1;
    if (t1 == t0) {
      result.state = x;
      return result;
    }

    std::vector<double> f0(n_), xg(n_), x1(n_), f1(n_), fg(n_), scratch(n_), dense(n_);
    eval_rhs(t0, x, f0);  // a fault at the accepted initial state is not recoverable

    double t = t0;
    double h = initial_step(t0, x, f0, t1);
    std::size_t sample_pos = 0;

    Eigen::MatrixXd jacobian(n_, n_);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;

    while (t < t1) {
      const double remaining = t1 - t;
      bool last = false;
      if (1.1 * h >= remaining) {
        h = remaining;
        last = true;
      }

      bool have_jacobian = false;  // J is a function of (t, x): fresh per step, kept across retries
      bool rejected_here = false;
      double factored_h = -1.0;

      for (;;) {
        if (h < cfg_.min_step)
          throw SolverError("TrBdf2: step size underflow at t = " + std::to_string(t));
        if (cfg_.use_jacobian && !have_jacobian) {
          finite_difference_jacobian(t, x, f0, jacobian, scratch);
          have_jacobian = true;
          factored_h = -1.0;
        }
        if (cfg_.use_jacobian && factored_h != h) {
          lu.compute(Eigen::MatrixXd::Identity(n_, n_) - (kD * h) * jacobian);
          ++stats_.lu_factorizations;
          factored_h = h;
        }

        // Trapezoidal stage: solve xg = x + d*h*(f0 + f(t + gamma*h, xg)).
        for (int i = 0; i < n_; ++i) scratch[i] = x[i] + kD * h * f0[i];
        for (int i = 0; i < n_; ++i) xg[i] = x[i] + kGamma * h * f0[i];  // Euler predictor
        bool ok = newton_solve(t + kGamma * h, kD * h, scratch, lu, xg, x);

        // BDF2 stage: x1 = c1*xg - c0*x + d*h*f(t + h, x1).
        if (ok) {
          for (int i = 0; i < n_; ++i) scratch[i] = kC1 * xg[i] - kC0 * x[i];
          for (int i = 0; i < n_; ++i) x1[i] = scratch[i] + kD * h * recovered_fg(xg[i], x[i], f0[i], h);
          ok = newton_solve(t + h, kD * h, scratch, lu, x1, x);
        }
        if (ok) ok = try_eval_rhs(t + h, x1, f1);

        if (!ok) {
          ++stats_.rejected_steps;
          rejected_here = true;
          if (monitor_) monitor_(t, h, -1.0, false);
          h *= 0.5;
          last = false;
          continue;
        }

        // Embedded third-order comparison, filtered through A^{-1}.
        for (int i = 0; i < n_; ++i) {
          fg[i] = recovered_fg(xg[i], x[i], f0[i], h);
          scratch[i] = h * (kE0 * f0[i] + kE1 * fg[i] + kE2 * f1[i]);
        }
        if (cfg_.use_jacobian) {
          Eigen::Map<Eigen::VectorXd> est(scratch.data(), n_);
          est = lu.solve(est);
        }
        double err = 0.0;
        for (int i = 0; i < n_; ++i) {
          const double w = cfg_.abs_tol[i] + cfg_.rel_tol * std::max(std::abs(x[i]), std::abs(x1[i]));
          err += square(scratch[i] / w);
        }
        err = std::sqrt(err / n_);

        if (monitor_) monitor_(t, h, err, std::isfinite(err) && err <= 1.0);
        if (!std::isfinite(err) || err > 1.0) {
          ++stats_.rejected_steps;
          rejected_here = true;
          const double fac = std::isfinite(err)
                                 ? std::clamp(0.9 * std::pow(err, -1.0 / 3.0), 0.1, 0.5)
                                 : 0.1;
          h *= fac;
          last = false;
          continue;
        }

        // Accepted.
        ++stats_.accepted_steps;
        const double t_next = last ? t1 : t + h;

        EventScan hit = scan_events(t, x, f0, t_next, x1, f1, dense);
        const double t_end = hit.found ? hit.time : t_next;
        while (sample_pos < sample_times.size() && sample_times[sample_pos] <= t_end) {
          const double ts = sample_times[sample_pos];
          if (ts > t) {
            hermite(t, x, f0, t_next, x1, f1, ts, dense);
            if (on_sample) on_sample(ts, dense);
          }
          ++sample_pos;
        }
        if (hit.found) {
          hermite(t, x, f0, t_next, x1, f1, hit.time, dense);
          stats_.event_count += static_cast<long>(hit.hits.size());
          result.end_time = hit.time;
          result.state = dense;
          result.events = std::move(hit.hits);
          finish_wall(wall_start);
          return result;
        }

        t = t_next;
        x.swap(x1);
        f0.swap(f1);

        double grow = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 3.0) : 5.0;
        grow = std::clamp(grow, 0.2, rejected_here ? 1.0 : 5.0);
        h *= grow;
        if (cfg_.max_step > 0.0) h = std::min(h, cfg_.max_step);
        break;
      }
    }

    result.end_time = t1;
    result.state = x;
    finish_wall(wall_start);
    return result;
  }

 private:
  static constexpr double kGamma = 2.0 - std::numbers::sqrt2;
  static constexpr double kD = 1.0 - std::numbers::sqrt2 / 2.0;
  // BDF2 stage writes x1 = kC1*xg - kC0*x0 + d*h*f1.
  static constexpr double kC1 = 1.0 / (kGamma * (2.0 - kGamma));
  static constexpr double kC0 = (1.0 - kGamma) * (1.0 - kGamma) / (kGamma * (2.0 - kGamma));
  // Difference against the embedded third-order solution:
  // est = h*(kE0*f0 + kE1*fg + kE2*f1).
  static constexpr double kE0 = (std::numbers::sqrt2 - 1.0) / 3.0;
  static constexpr double kE1 = -1.0 / 3.0;
  static constexpr double kE2 = (2.0 - std::numbers::sqrt2) / 3.0;

  static double square(double v) { return v * v; }

  // The TR stage makes d*h*f(t+gamma*h, xg) = xg - x0 - d*h*f0 hold exactly at
  // convergence, which recovers the stage derivative without another rhs call.
  static double recovered_fg(double xg, double x0, double f0, double h) {
    return (xg - x0) / (kD * h) - f0;
  }

  void eval_rhs(double t, std::span<const double> x, std::span<double> out) {
    ++stats_.rhs_evaluations;
    rhs_(t, x, out);
  }

  /// rhs evaluation at a trial point: evaluation faults and non-finite output
  /// mean "reject this step", not "abort the run".
  bool try_eval_rhs(double t, std::span<const double> x, std::span<double> out) {
    try {
      eval_rhs(t, x, out);
    } catch (const EvaluationError&) {
      return false;
    }
    for (double v : out)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void finite_difference_jacobian(double t, std::span<const double> x,
                                  std::span<const double> f0, Eigen::MatrixXd& jac,
                                  std::vector<double>& work) {
    ++stats_.jacobian_evaluations;
    std::vector<double> xp(x.begin(), x.end());
    for (int j = 0; j < n_; ++j) {
      const double delta = kSqrtEps * std::max(std::abs(x[j]), 1.0);
      const double saved = xp[j];
      xp[j] = saved + delta;
      eval_rhs(t, xp, work);
      for (int i = 0; i < n_; ++i) jac(i, j) = (work[i] - f0[i]) / delta;
      xp[j] = saved;
    }
  }

  /// Solves y = psi + dh*f(tc, y) in place; `base` sets the error weights.
  bool newton_solve(double tc, double dh, const std::vector<double>& psi,
                    const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, std::vector<double>& y,
                    const std::vector<double>& base) {
    std::vector<double>& f = newton_f_;
    std::vector<double>& r = newton_r_;
    f.resize(n_);
    r.resize(n_);
    double previous = std::numeric_limits<double>::max();
    for (int it = 0; it < cfg_.max_newton_iterations; ++it) {
      if (!try_eval_rhs(tc, y, f)) return false;
      for (int i = 0; i < n_; ++i) r[i] = y[i] - psi[i] - dh * f[i];
      Eigen::Map<Eigen::VectorXd> rv(r.data(), n_);
      if (cfg_.use_jacobian) rv = lu.solve(rv);
      ++stats_.newton_iterations;
      double nd = 0.0;
      for (int i = 0; i < n_; ++i) {
        y[i] -= r[i];
        const double w = cfg_.abs_tol[i] + kNewtonRelFloor(cfg_.rel_tol) * std::abs(base[i]);
        nd += square(r[i] / w);
      }
      nd = std::sqrt(nd / n_);
      if (!std::isfinite(nd)) return false;
      if (nd <= kNewtonTol) return true;
      if (it > 0 && nd > 0.9 * previous) return false;  // stalled or diverging
      previous = nd;
    }
    return false;
  }

  static double kNewtonRelFloor(double rel_tol) { return std::min(rel_tol, 1e-3); }

  double initial_step(double t0, const std::vector<double>& x0, const std::vector<double>& f0,
                      double t1) {
    const double span_limit = t1 - t0;
    double h = cfg_.initial_step;
    if (h <= 0.0) {
      double d0 = 0.0, d1 = 0.0;
      for (int i = 0; i < n_; ++i) {
        const double w = cfg_.abs_tol[i] + cfg_.rel_tol * std::abs(x0[i]);
        d0 += square(x0[i] / w);
        d1 += square(f0[i] / w);
      }
      d0 = std::sqrt(d0 / n_);
      d1 = std::sqrt(d1 / n_);
      double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
      h0 = std::min(h0, span_limit);

      double h1 = h0 * 1e-3;  // fallback if the probe fails
      std::vector<double> xp(n_), fp(n_);
      for (int i = 0; i < n_; ++i) xp[i] = x0[i] + h0 * f0[i];
      if (try_eval_rhs(t0 + h0, xp, fp)) {
        double d2 = 0.0;
        for (int i = 0; i < n_; ++i) {
          const double w = cfg_.abs_tol[i] + cfg_.rel_tol * std::abs(x0[i]);
          d2 += square((fp[i] - f0[i]) / w);
        }
        d2 = std::sqrt(d2 / n_) / h0;
        const double dm = std::max(d1, d2);
        h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 3.0);
      }
      h = std::min(100.0 * h0, h1);
    }
    if (cfg_.max_step > 0.0) h = std::min(h, cfg_.max_step);
    h = std::min(h, span_limit);
    return std::max(h, cfg_.min_step);
  }

  // -- events ---------------------------------------------------------------

  struct EventScan {
    bool found = false;
    double time = 0.0;
    std::vector<EventHit> hits;
  };

  static bool crossed(double ga, double gb, EventDirection dir) {
    const bool up = ga < 0.0 && gb >= 0.0;
    const bool down = ga > 0.0 && gb <= 0.0;
    switch (dir) {
      case EventDirection::Rising: return up;
      case EventDirection::Falling: return down;
      default: return up || down;
    }
  }

  void hermite(double ta, std::span<const double> xa, std::span<const double> fa, double tb,
               std::span<const double> xb, std::span<const double> fb, double at,
               std::vector<double>& out) const {
    const double h = tb - ta;
    const double s = std::clamp((at - ta) / h, 0.0, 1.0);
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    for (int i = 0; i < n_; ++i)
      out[i] = h00 * xa[i] + h01 * xb[i] + h * (h10 * fa[i] + h11 * fb[i]);
  }

  EventScan scan_events(double ta, std::span<const double> xa, std::span<const double> fa,
                        double tb, std::span<const double> xb, std::span<const double> fb,
                        std::vector<double>& work) {
    EventScan scan;
    if (events_.empty()) return scan;
    const int k = std::max(2, cfg_.event_subsamples);
    const std::size_t ne = events_.size();

    // g on the subsample lattice; endpoints use the stage states exactly.
    grid_g_.assign(ne * (k + 1), 0.0);
    for (int s = 0; s <= k; ++s) {
      const double t = ta + (tb - ta) * s / k;
      std::span<const double> xs;
      if (s == 0) {
        xs = xa;
      } else if (s == k) {
        xs = xb;
      } else {
        hermite(ta, xa, fa, tb, xb, fb, t, work);
        xs = work;
      }
      for (std::size_t e = 0; e < ne; ++e) grid_g_[e * (k + 1) + s] = events_[e].value(t, xs);
    }

    std::vector<std::pair<double, int>> localized;  // (time, event index)
    for (std::size_t e = 0; e < ne; ++e) {
      for (int s = 0; s < k; ++s) {
        const double ga = grid_g_[e * (k + 1) + s];
        const double gb = grid_g_[e * (k + 1) + s + 1];
        if (!crossed(ga, gb, events_[e].direction)) continue;
        double lo = ta + (tb - ta) * s / k;
        double hi = ta + (tb - ta) * (s + 1) / k;
        double glo = ga;
        while (hi - lo > cfg_.event_time_tol) {
          const double mid = 0.5 * (lo + hi);
          hermite(ta, xa, fa, tb, xb, fb, mid, work);
          const double gm = events_[e].value(mid, work);
          if (crossed(glo, gm, events_[e].direction)) {
            hi = mid;
          } else {
            lo = mid;
            glo = gm;
          }
        }
        localized.emplace_back(hi, static_cast<int>(e));
        break;
      }
    }
    if (localized.empty()) return scan;

    const double t_first =
        std::min_element(localized.begin(), localized.end())->first;
    for (const auto& [te, e] : localized)
      if (te - t_first <= cfg_.event_time_tol)
        scan.hits.push_back({e, te, events_[e].label});
    std::sort(scan.hits.begin(), scan.hits.end(), [&](const EventHit& a, const EventHit& b) {
      if (events_[a.index].priority != events_[b.index].priority)
        return events_[a.index].priority > events_[b.index].priority;
      return a.index < b.index;
    });
    scan.found = true;
    scan.time = t_first;
    return scan;
  }

  void finish_wall(std::chrono::steady_clock::time_point start) {
    stats_.wall_time +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  static constexpr double kSqrtEps = 1.4901161193847656e-8;  // sqrt(DBL_EPSILON)
  // Newton stops when the weighted update is this fraction of the step
  // tolerance; the leftover iteration error is then well below the truncation
  // error the step controller works against.
  static constexpr double kNewtonTol = 0.03;

  int n_;
  OdeRhs rhs_;
  SolverConfig cfg_;
  std::vector<EventSpec> events_;
  std::function<void(double, double, double, bool)> monitor_;
  RunStats stats_;
  std::vector<double> newton_f_, newton_r_, grid_g_;
};

}  // namespace tes
