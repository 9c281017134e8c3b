#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tes/ode.hpp"

namespace tes {
namespace {

OdeRhs decay() {
  return [](double, std::span<const double> x, std::span<double> dxdt) { dxdt[0] = -x[0]; };
}

// -- accuracy on closed-form problems -----------------------------------------

TEST(TrBdf2Accuracy, ExponentialDecay) {
  // Error control is per step, so the global error grows with the step count;
  // at the default tolerance the end-point error stays within a few rel_tol.
  SolverConfig cfg;
  cfg.rel_tol = 1e-3;
  cfg.abs_tol = {1e-9};
  TrBdf2 solver(1, decay(), cfg);
  const std::vector<double> x0{1.0};
  const auto r = solver.integrate(0.0, x0, 1.0);
  ASSERT_TRUE(r.events.empty());
  EXPECT_DOUBLE_EQ(r.end_time, 1.0);
  const double exact = std::exp(-1.0);
  EXPECT_NEAR(r.state[0], exact, 10.0 * cfg.rel_tol * exact);
  EXPECT_GT(solver.stats().accepted_steps, 0);
  EXPECT_GT(solver.stats().rhs_evaluations, 0);
}

TEST(TrBdf2Accuracy, ExponentialDecayWithoutJacobian) {
  SolverConfig cfg;
  cfg.rel_tol = 1e-3;
  cfg.abs_tol = {1e-9};
  cfg.use_jacobian = false;
  TrBdf2 solver(1, decay(), cfg);
  const std::vector<double> x0{1.0};
  const auto r = solver.integrate(0.0, x0, 1.0);
  const double exact = std::exp(-1.0);
  EXPECT_NEAR(r.state[0], exact, 10.0 * cfg.rel_tol * exact);
  EXPECT_EQ(solver.stats().jacobian_evaluations, 0);
  EXPECT_EQ(solver.stats().lu_factorizations, 0);
}

TEST(TrBdf2Accuracy, StiffRelaxationTakesLargeSteps) {
  // x' = lambda (cos t - x) with lambda = 1e6. An explicit method would need
  // on the order of lambda steps per unit time; the implicit scheme should
  // track the slow particular solution with a few hundred.
  const double lam = 1e6;
  auto rhs = [lam](double t, std::span<const double> x, std::span<double> dxdt) {
    dxdt[0] = lam * (std::cos(t) - x[0]);
  };
  auto particular = [lam](double t) {
    return (lam * lam * std::cos(t) + lam * std::sin(t)) / (lam * lam + 1.0);
  };
  SolverConfig cfg;
  cfg.rel_tol = 1e-6;
  cfg.abs_tol = {1e-9};
  TrBdf2 solver(1, rhs, cfg);
  const std::vector<double> x0{particular(0.0)};
  const auto r = solver.integrate(0.0, x0, 2.0);
  EXPECT_NEAR(r.state[0], particular(2.0), 1e-4);
  EXPECT_LT(solver.stats().total_steps(), 2000);
  EXPECT_GT(solver.stats().jacobian_evaluations, 0);
  EXPECT_GE(solver.stats().lu_factorizations, solver.stats().jacobian_evaluations);
}

TEST(TrBdf2Accuracy, SecondOrderConvergenceOnSmoothProblem) {
  // x' = -x + cos t started on the particular solution (cos t + sin t)/2.
  // Fixed step size via initial_step == max_step and tolerances loose enough
  // that the controller never rejects; halving h must cut the global error
  // by about four.
  auto rhs = [](double t, std::span<const double> x, std::span<double> dxdt) {
    dxdt[0] = -x[0] + std::cos(t);
  };
  auto exact = [](double t) { return 0.5 * (std::cos(t) + std::sin(t)); };
  auto global_error = [&](double h) {
    SolverConfig cfg;
    cfg.rel_tol = 1.0;
    cfg.abs_tol = {1e6};
    cfg.initial_step = h;
    cfg.max_step = h;
    TrBdf2 solver(1, rhs, cfg);
    const std::vector<double> x0{exact(0.0)};
    const auto r = solver.integrate(0.0, x0, 2.0);
    EXPECT_EQ(solver.stats().rejected_steps, 0);
    return std::abs(r.state[0] - exact(2.0));
  };
  const double e1 = global_error(0.2);
  const double e2 = global_error(0.1);
  const double e3 = global_error(0.05);
  const double order12 = std::log2(e1 / e2);
  const double order23 = std::log2(e2 / e3);
  EXPECT_GE(order12, 1.8) << "e(0.2)=" << e1 << " e(0.1)=" << e2;
  EXPECT_GE(order23, 1.8) << "e(0.1)=" << e2 << " e(0.05)=" << e3;
}

// -- events --------------------------------------------------------------------

TEST(TrBdf2Events, LocalizesDecayCrossing) {
  SolverConfig cfg;
  cfg.rel_tol = 1e-8;
  cfg.abs_tol = {1e-10};
  cfg.max_step = 0.05;  // keeps the dense interpolant well inside the tolerance
  cfg.event_time_tol = 1e-7;
  TrBdf2 solver(1, decay(), cfg);
  solver.set_events({{"half", [](double, std::span<const double> x) { return x[0] - 0.5; },
                      EventDirection::Falling, 0}});
  const std::vector<double> x0{1.0};
  const auto r = solver.integrate(0.0, x0, 5.0);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].label, "half");
  EXPECT_NEAR(r.end_time, std::log(2.0), 1e-6);
  EXPECT_NEAR(r.state[0], 0.5, 1e-6);
  EXPECT_EQ(solver.stats().event_count, 1);
}

TEST(TrBdf2Events, RestartAtEventDoesNotRetrigger) {
  SolverConfig cfg;
  cfg.max_step = 0.05;
  TrBdf2 solver(1, decay(), cfg);
  solver.set_events({{"half", [](double, std::span<const double> x) { return x[0] - 0.5; },
                      EventDirection::Falling, 0}});
  const std::vector<double> x0{1.0};
  const auto first = solver.integrate(0.0, x0, 5.0);
  ASSERT_EQ(first.events.size(), 1u);
  const auto second = solver.integrate(first.end_time, first.state, 5.0);
  EXPECT_TRUE(second.events.empty());
  EXPECT_DOUBLE_EQ(second.end_time, 5.0);
}

TEST(TrBdf2Events, DirectionFilterIgnoresWrongWayCrossing) {
  TrBdf2 solver(1, decay());
  solver.set_events({{"rising_half",
                      [](double, std::span<const double> x) { return x[0] - 0.5; },
                      EventDirection::Rising, 0}});
  const std::vector<double> x0{1.0};
  const auto r = solver.integrate(0.0, x0, 2.0);
  EXPECT_TRUE(r.events.empty());
  EXPECT_DOUBLE_EQ(r.end_time, 2.0);
}

TEST(TrBdf2Events, SimultaneousHitsSortByPriority) {
  SolverConfig cfg;
  cfg.max_step = 0.05;
  TrBdf2 solver(1, decay(), cfg);
  auto g = [](double, std::span<const double> x) { return x[0] - 0.5; };
  solver.set_events({{"low", g, EventDirection::Falling, 1},
                     {"high", g, EventDirection::Falling, 5}});
  const std::vector<double> x0{1.0};
  const auto r = solver.integrate(0.0, x0, 5.0);
  ASSERT_EQ(r.events.size(), 2u);
  EXPECT_EQ(r.events[0].label, "high");
  EXPECT_EQ(r.events[1].label, "low");
}

TEST(TrBdf2Events, SamplesPastTheEventAreDropped) {
  SolverConfig cfg;
  cfg.rel_tol = 1e-6;
  cfg.abs_tol = {1e-9};
  cfg.max_step = 0.05;
  TrBdf2 solver(1, decay(), cfg);
  solver.set_events({{"half", [](double, std::span<const double> x) { return x[0] - 0.5; },
                      EventDirection::Falling, 0}});
  const std::vector<double> x0{1.0};
  const std::vector<double> samples{0.2, 0.5, 0.69, 0.8, 1.0};
  std::vector<double> seen;
  const auto r = solver.integrate(0.0, x0, 5.0, samples,
                                  [&](double t, std::span<const double> x) {
                                    seen.push_back(t);
                                    EXPECT_NEAR(x[0], std::exp(-t), 1e-4);
                                  });
  ASSERT_EQ(r.events.size(), 1u);
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_DOUBLE_EQ(seen[0], 0.2);
  EXPECT_DOUBLE_EQ(seen[1], 0.5);
  EXPECT_DOUBLE_EQ(seen[2], 0.69);
}

// -- dense sampling ------------------------------------------------------------

TEST(TrBdf2Sampling, DenseOutputTracksTheSolution) {
  // The bound covers the accumulated step error at this tolerance; the
  // interpolation between nodes contributes less.
  SolverConfig cfg;
  cfg.rel_tol = 1e-8;
  cfg.abs_tol = {1e-11};
  cfg.max_step = 0.05;
  TrBdf2 solver(1, decay(), cfg);
  const std::vector<double> x0{1.0};
  std::vector<double> samples;
  for (int i = 1; i <= 20; ++i) samples.push_back(0.05 * i);
  double last = 0.0;
  int count = 0;
  solver.integrate(0.0, x0, 1.0, samples, [&](double t, std::span<const double> x) {
    EXPECT_GT(t, last);
    last = t;
    ++count;
    EXPECT_NEAR(x[0], std::exp(-t), 2e-6);
  });
  EXPECT_EQ(count, 20);
}

// -- failure handling ----------------------------------------------------------

TEST(TrBdf2Failures, HardWallUnderflowsTheStep) {
  auto rhs = [](double t, std::span<const double> x, std::span<double> dxdt) {
    if (t > 0.1) throw EvaluationError("wall");
    dxdt[0] = -x[0];
  };
  TrBdf2 solver(1, rhs);
  const std::vector<double> x0{1.0};
  EXPECT_THROW(solver.integrate(0.0, x0, 1.0), SolverError);
  EXPECT_GT(solver.stats().rejected_steps, 0);
}

TEST(TrBdf2Failures, InitialStateFaultIsNotRecoverable) {
  auto rhs = [](double, std::span<const double>, std::span<double>) {
    throw EvaluationError("broken everywhere");
  };
  TrBdf2 solver(1, rhs);
  const std::vector<double> x0{1.0};
  EXPECT_THROW(solver.integrate(0.0, x0, 1.0), EvaluationError);
}

// -- configuration and bookkeeping ----------------------------------------------

TEST(TrBdf2Config, ConstructorValidation) {
  EXPECT_THROW(TrBdf2(0, decay()), std::invalid_argument);
  EXPECT_THROW(TrBdf2(1, OdeRhs{}), std::invalid_argument);
  SolverConfig cfg;
  cfg.abs_tol = {};
  EXPECT_THROW(TrBdf2(1, decay(), cfg), std::invalid_argument);
  cfg = {};
  cfg.abs_tol = {1e-6, 1e-6};
  EXPECT_THROW(TrBdf2(3, decay(), cfg), std::invalid_argument);
  cfg = {};
  cfg.rel_tol = 0.0;
  EXPECT_THROW(TrBdf2(1, decay(), cfg), std::invalid_argument);
}

TEST(TrBdf2Config, IntegrateArgumentValidation) {
  TrBdf2 solver(1, decay());
  const std::vector<double> wrong{1.0, 2.0};
  EXPECT_THROW(solver.integrate(0.0, wrong, 1.0), std::invalid_argument);
  const std::vector<double> x0{1.0};
  EXPECT_THROW(solver.integrate(1.0, x0, 0.0), std::invalid_argument);
}

TEST(TrBdf2Config, ZeroLengthIntervalIsIdentity) {
  TrBdf2 solver(1, decay());
  const std::vector<double> x0{0.7};
  const auto r = solver.integrate(2.0, x0, 2.0);
  EXPECT_DOUBLE_EQ(r.end_time, 2.0);
  ASSERT_EQ(r.state.size(), 1u);
  EXPECT_DOUBLE_EQ(r.state[0], 0.7);
  EXPECT_EQ(solver.stats().accepted_steps, 0);
}

TEST(TrBdf2Config, StepMonitorCountsMatchStats) {
  TrBdf2 solver(1, decay());
  long accepted = 0, rejected = 0;
  solver.set_step_monitor([&](double, double h, double, bool ok) {
    EXPECT_GT(h, 0.0);
    (ok ? accepted : rejected) += 1;
  });
  const std::vector<double> x0{1.0};
  solver.integrate(0.0, x0, 1.0);
  EXPECT_EQ(accepted, solver.stats().accepted_steps);
  EXPECT_EQ(rejected, solver.stats().rejected_steps);
  solver.reset_stats();
  EXPECT_EQ(solver.stats().accepted_steps, 0);
  EXPECT_EQ(solver.stats().rhs_evaluations, 0);
}

}  // namespace
}  // namespace tes
