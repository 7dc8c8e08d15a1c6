#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "forage/ode.hpp"

using namespace forage;

namespace {

ModelParams params(double alpha_b, double alpha_r, double tau_h, double tau_av) {
  ModelParams p;
  p.alpha_b = alpha_b;
  p.alpha_r = alpha_r;
  p.tau_h = tau_h;
  p.tau_av = tau_av;
  return p;
}

} // namespace

TEST(Ode, BlocksGrowLinearlyWithFixedHoming) {
  const auto s = make_scenario(Kind::DS, 16, 8, 10, 20, 1);
  const auto p = params(0.01, 0.02, 100.0, 2.0);
  OdeState x0 = initial_state(s);
  x0.n_s = 7.0;
  x0.n_h = 3.0;
  auto frozen = [&](const OdeState &x, OdeState &d) {
    generalized_rhs(x, p, s, d);
    d.n_s = d.n_h = d.n_av_s = d.n_av_h = 0.0;
  };
  IntegrateOptions io;
  io.dt = 0.5;
  io.horizon = 500.0;
  io.stride = 1;
  io.stop_at_steady = false;
  const auto rep = integrate(frozen, x0, io);
  double ad = 0.0;
  for (const auto &c : s.clusters)
    ad += c.area();
  for (const auto &smp : rep.trajectory)
    for (std::size_t j = 0; j < s.clusters.size(); ++j) {
      const double exact = s.clusters[j].block_count + smp.t * (3.0 / 100.0 - 0.01) * s.clusters[j].area() / ad;
      EXPECT_NEAR(smp.state.b[j], exact, 1e-9);
    }
}

TEST(Ode, AvoidingPopulationFollowsExponential) {
  const auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  const auto p = params(0.005, 0.3, 60.0, 2.0);
  IntegrateOptions io;
  io.dt = 0.01;
  io.horizon = 20.0;
  io.stride = 10;
  io.stop_at_steady = false;
  const auto rep = integrate([&](const OdeState &x, OdeState &d) { generalized_rhs(x, p, s, d); }, initial_state(s), io);
  for (const auto &smp : rep.trajectory)
    EXPECT_NEAR(smp.state.n_av(), 0.3 * 2.0 * (1.0 - std::exp(-smp.t / 2.0)), 1e-9) << smp.t;
}

TEST(Ode, ConservesRobotsAndReachesSteadyState) {
  const auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  const auto p = params(0.01, 0.05, 150.0, 2.0);
  SolveOptions so;
  so.stride = 1;
  const auto rep = solve_generalized(s, p, so);
  for (const auto &smp : rep.trajectory)
    EXPECT_NEAR(smp.state.robots(), 10.0, 1e-9);
  ASSERT_TRUE(rep.converged);
  EXPECT_NEAR(rep.steady_state.n_h, 0.01 * 150.0, 1e-5);
  EXPECT_NEAR(rep.steady_state.n_av(), 0.05 * 2.0, 1e-5);
  // carried blocks are held by homing robots, avoiding or not
  const auto &x = rep.steady_state;
  EXPECT_NEAR(x.blocks() + x.n_h + x.n_av_h, 20.0, 1e-5);
  EXPECT_NEAR(rep.performance, 0.01, 1e-15);
}

TEST(Ode, SteadyStateStableUnderStepHalving) {
  const auto s = make_scenario(Kind::RN, 8, 8, 10, 20, 1);
  const auto p = params(0.02, 0.1, 80.0, 2.0);
  SolveOptions a;
  a.dt = 0.2;
  SolveOptions b = a;
  b.dt = 0.1;
  const auto ra = solve_generalized(s, p, a), rb = solve_generalized(s, p, b);
  for (std::size_t i = 0; i < ra.steady_state.size(); ++i)
    EXPECT_NEAR(ra.steady_state[i], rb.steady_state[i], 1e-6);
}

TEST(Ode, OverdrawnSwarmIsUnstable) {
  const auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  const auto p = params(0.5, 0.0, 100.0, 2.0);
  EXPECT_THROW(solve_generalized(s, p), InstabilityError);
  EXPECT_THROW(solve_generalized(s, params(0.01, 0.0, 0.0, 2.0)), ModelDomainError);
}

TEST(Ode, IntegratorValidatesOptions) {
  const auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  IntegrateOptions io;
  io.dt = 0.0;
  const auto p = params(0.01, 0.0, 100.0, 2.0);
  EXPECT_THROW(integrate([&](const OdeState &x) { return generalized_rhs(x, p, s); }, initial_state(s), io),
               ValidationError);
}

TEST(Ode, LegacyBlocksNeverIncrease) {
  const auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  LegacyParams lp{1e-3, 1e-3, 1e-3, 50.0, 2.0};
  double last = 20.0;
  bool monotone = true;
  double robots_err = 0.0;
  solve_legacy(s, lp, 0.5, 20000.0, 0, [&](double, const OdeState &x) {
    monotone = monotone && x.b[0] <= last + 1e-12;
    last = x.b[0];
    robots_err = std::max(robots_err, std::abs(x.robots() - 10.0));
  });
  EXPECT_TRUE(monotone);
  EXPECT_LT(last, 20.0);
  EXPECT_LT(robots_err, 1e-9);
}

TEST(Ode, PerformanceNeedsPositiveRate) {
  EXPECT_THROW(predict_performance(params(0.01, 0, 1, 1), 0.0), ValidationError);
  EXPECT_NEAR(predict_performance(params(0.01, 0, 1, 1), 2.0), 0.005, 1e-15);
}

TEST(Ode, TrajectoryCsvHeader) {
  const auto s = make_scenario(Kind::DS, 16, 8, 10, 20, 1);
  SolveOptions so;
  so.stride = 100;
  const auto rep = solve_generalized(s, params(0.01, 0.05, 150.0, 2.0), so);
  std::ostringstream os;
  write_trajectory_csv(os, rep.trajectory);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,n_s,n_h,n_av_s,n_av_h,b_total");
}
