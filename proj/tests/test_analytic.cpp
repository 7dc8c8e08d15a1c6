#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "forage/analytic.hpp"

using namespace forage;

namespace {

// Independent evaluation of the unnormalised acquisition density.
double raw_density(const Scenario &s, Vec2 x) {
  for (const auto &c : s.clusters)
    if (c.rect().contains(x)) {
      const double rho = c.block_count / c.area();
      const double b = std::sqrt(distance(x, s.arena.nest_center)) - std::log(rho) / (2.0 * rho);
      return 1.0 / (b * b);
    }
  return 0.0;
}

// Midpoint rule on an n x n grid per cluster.
double grid_integral(const Scenario &s, const AcquisitionDensity &pdf, int n) {
  double total = 0.0;
  for (const auto &c : s.clusters) {
    const Rect r = c.rect();
    const double hx = r.width() / n, hy = r.height() / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        total += pdf(Vec2{r.lo.x + (i + 0.5) * hx, r.lo.y + (j + 0.5) * hy}) * hx * hy;
  }
  return total;
}

// Rejection sampling of acquisition locations.
Vec2 mc_mean(const Scenario &s, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double total_area = 0.0, gmax = 0.0;
  for (const auto &c : s.clusters) {
    total_area += c.area();
    const Rect r = c.rect();
    const Vec2 n = s.arena.nest_center;
    const Vec2 near{std::clamp(n.x, r.lo.x, r.hi.x), std::clamp(n.y, r.lo.y, r.hi.y)};
    const double rho = c.block_count / c.area();
    const double b = std::sqrt(distance(near, n)) - std::log(rho) / (2.0 * rho);
    gmax = std::max(gmax, 1.0 / (b * b));
  }
  double sx = 0.0, sy = 0.0;
  int accepted = 0;
  while (accepted < samples) {
    double u = rng.uniform() * total_area;
    const BlockCluster *pick = &s.clusters.back();
    for (const auto &c : s.clusters) {
      if (u < c.area()) {
        pick = &c;
        break;
      }
      u -= c.area();
    }
    const Rect r = pick->rect();
    const Vec2 x{rng.uniform(r.lo.x, r.hi.x), rng.uniform(r.lo.y, r.hi.y)};
    if (rng.uniform() * gmax < raw_density(s, x)) {
      sx += x.x;
      sy += x.y;
      ++accepted;
    }
  }
  return {sx / samples, sy / samples};
}

double simpson(auto f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i)
    s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

} // namespace

TEST(AcquisitionDensity, IntegratesToOne) {
  for (Kind k : all_kinds) {
    const auto [w, h] = arena_dims_for_area(k, 128);
    const auto s = make_scenario(k, w, h, 10, 20, 7);
    const AcquisitionDensity pdf(s);
    EXPECT_NEAR(grid_integral(s, pdf, 400), 1.0, 1e-5) << to_string(k);
  }
}

TEST(AcquisitionDensity, ZeroOutsideSupportAndDecreasing) {
  const auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  const AcquisitionDensity pdf(s);
  EXPECT_EQ(pdf(s.arena.nest_center), 0.0);
  EXPECT_EQ(pdf(Vec2{4.0, 4.0}), 0.0);
  EXPECT_GT(pdf(Vec2{9.0, 4.0}), pdf(Vec2{12.0, 4.0}));
  EXPECT_GT(pdf(Vec2{12.0, 4.0}), pdf(Vec2{15.0, 4.0}));
}

TEST(AcquisitionDensity, MeanMatchesMonteCarlo) {
  const auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  const Vec2 q = expected_acq_location(s);
  const Vec2 mc = mc_mean(s, 1'000'000, 11);
  EXPECT_NEAR(q.x, mc.x, 0.01 * std::abs(mc.x));
  EXPECT_NEAR(q.y, mc.y, 0.01 * std::abs(mc.y));
  // biased toward the nest-proximal edge of the cluster
  EXPECT_GT(q.x, 8.0);
  EXPECT_LT(q.x, s.clusters[0].center.x);
}

TEST(AcquisitionDensity, DualSourceMeanOnSymmetryAxis) {
  const auto s = make_scenario(Kind::DS, 16, 8, 10, 20, 1);
  const AcquisitionDensity pdf(s);
  EXPECT_NEAR(pdf.mean().x, s.arena.nest_center.x, 1e-6);
  EXPECT_NEAR(pdf.mean().y, s.arena.nest_center.y, 1e-6);
  // each source is equally far from the nest
  EXPECT_GT(pdf.mean_cluster_distance(), 4.0);
  const auto single = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  const AcquisitionDensity ss(single);
  EXPECT_NEAR(ss.mean_cluster_distance(), distance(ss.mean(), single.arena.nest_center), 1e-9);
}

TEST(AcquisitionDensity, ZeroDensityClusterRejected) {
  auto s = make_scenario(Kind::DS, 16, 8, 10, 20, 1);
  s.clusters[0].block_count = 0.0;
  EXPECT_THROW(AcquisitionDensity{s}, ModelDomainError);
}

TEST(CongestionShortening, MatchesMonteCarlo) {
  Rng rng(5);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i)
    sum += std::hypot(rng.uniform() - 0.5, rng.uniform() - 0.5);
  EXPECT_NEAR(congestion_shortening(1.0), sum / n, 1e-3);
  EXPECT_NEAR(congestion_shortening(1.0), 0.382598, 1e-6);
  EXPECT_NEAR(congestion_shortening(6.0), 6.0 * congestion_shortening(1.0), 1e-12);
  EXPECT_EQ(congestion_shortening(0.0), 0.0);
  EXPECT_NEAR(mean_distance_to_center(1.0, 1.0), congestion_shortening(1.0), 1e-12);
}

TEST(CongestionShortening, RectangleMatchesMonteCarlo) {
  Rng rng(6);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i)
    sum += std::hypot(3.0 * (rng.uniform() - 0.5), rng.uniform() - 0.5);
  EXPECT_NEAR(mean_distance_to_center(3.0, 1.0), sum / n, 2e-3);
}

TEST(HomingTime, SingleRobot) {
  EXPECT_NEAR(homing_time_single(10.0, 0.4, 0.5), 19.2, 1e-12);
  EXPECT_EQ(homing_time_single(0.3, 0.4, 0.5), 0.0);
  EXPECT_THROW(homing_time_single(1.0, 0.0, 0.0), ValidationError);
}

TEST(HomingTime, InterferenceSurcharge) {
  EXPECT_NEAR(homing_time(20.0, 0.0, 2.0, 10), 20.0, 1e-12);
  EXPECT_NEAR(homing_time(20.0, 0.5, 2.0, 10), 22.0, 1e-12);
  EXPECT_NEAR(homing_time(20.0, 0.5, 4.0, 10) - 20.0, 2.0 * (homing_time(20.0, 0.5, 2.0, 10) - 20.0), 1e-12);
  EXPECT_THROW(homing_time(20.0, 0.5, 2.0, 0), ValidationError);
}

TEST(Diffusion, AngularFactorMatchesQuadrature) {
  const double theta = std::numbers::pi / 36.0;
  // integral of (1 + cos 2t) over the uniform density on [-theta, theta]
  const double q = simpson([&](double t) { return (1.0 + std::cos(2.0 * t)) / (2.0 * theta); }, -theta, theta, 2000);
  EXPECT_NEAR(angular_factor(theta), q, 1e-9);
  EXPECT_NEAR(angular_factor(theta), 1.99493077, 1e-8);
  EXPECT_NEAR(angular_factor(std::numbers::pi / 2.0), 1.0, 1e-15);
  EXPECT_THROW(angular_factor(0.0), ValidationError);
}

TEST(Diffusion, Scaling) {
  auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  const auto a = diffusion_quantities(s, 2.0, 0.2);
  s.robot_count = 20;
  const auto b = diffusion_quantities(s, 2.0, 0.2);
  const auto c = diffusion_quantities(s, 4.0, 0.2);
  EXPECT_NEAR(b.d_swarm, 2.0 * a.d_swarm, 1e-15);
  EXPECT_NEAR(c.d_swarm, 2.0 * b.d_swarm, 1e-15);
  s.search_speed = 0.2;
  EXPECT_NEAR(diffusion_quantities(s, 2.0, 0.2).d_xy, 4.0 * a.d_xy, 1e-15);
  EXPECT_NEAR(diffusion_quantities(s, 1.0, 0.2, -1).d_theta, 2.0 - 1.99493077, 1e-8);
  EXPECT_THROW(diffusion_quantities(s, 1.0, 0.2, 0), ValidationError);
}

TEST(Rates, BlockEncounter) {
  DiffusionQuantities dq;
  dq.d_swarm = 1.0;
  EXPECT_NEAR(block_encounter_rate(Vec2{2, 0}, Vec2{0, 0}, dq), 0.5, 1e-15);
  EXPECT_NEAR(block_encounter_rate(Vec2{4, 0}, Vec2{0, 0}, dq), 0.125, 1e-15);
  EXPECT_THROW(block_encounter_rate(Vec2{1, 1}, Vec2{1, 1}, dq), ModelDomainError);
}

TEST(Rates, AvoidingEstimateAndLittlesLaw) {
  DiffusionQuantities dq;
  dq.d_theta = 2.0;
  dq.d_swarm = 10.0;
  EXPECT_EQ(estimate_n_avoiding(0.0, dq, 3.0), 0.0);
  EXPECT_NEAR(estimate_n_avoiding(0.2, dq, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(robot_encounter_rate(2.0, 4.0, 0.05).value, 0.4, 1e-15);
  EXPECT_EQ(robot_encounter_rate(0.0, 4.0, 0.05).value, 0.0);
  const auto r = robot_encounter_rate(2.0, 4.0, 0.25);
  EXPECT_NEAR(r.value, 0.0, 1e-15);
  EXPECT_FALSE(r.clamped);
  EXPECT_TRUE(robot_encounter_rate(2.0, 4.0, 0.5).clamped);
}

TEST(DeriveParams, ComposesByHand) {
  auto s = make_scenario(Kind::SS, 10, 5, 1, 20, 1);
  const CalibrationInputs in{1.5, 2.0, 2.0, 0.01, 0.02};
  const auto p = derive_params(s, in);
  const double dth = angular_factor(s.crw_half_angle);
  const double dxy = s.search_speed * s.search_speed / (4.0 * 0.2) * dth;
  const double dn = 1.5 * dxy / dth;
  const double nav = 0.02 * dn / dth * 2.0;
  const double ar = nav / 2.0 - 0.01 * nav;
  const double d = distance(expected_acq_location(s), s.arena.nest_center);
  EXPECT_NEAR(p.alpha_b, 2.0 * dn / (d * d), 1e-12);
  EXPECT_NEAR(p.n_av_hat, nav, 1e-15);
  EXPECT_NEAR(p.alpha_r, ar, 1e-15);
  const double th1 = (d - congestion_shortening(s.arena.nest_side)) / s.homing_speed;
  EXPECT_NEAR(p.tau_h1, th1, 1e-9);
  EXPECT_NEAR(p.tau_h, th1 * (1.0 + ar * 2.0), 1e-9);
}

TEST(DeriveParams, InvariantsAcrossKinds) {
  for (Kind k : all_kinds) {
    const auto [w, h] = arena_dims_for_area(k, 1000);
    const auto s = make_scenario(k, w, h, 10, 20, 3);
    const auto p = derive_params(s, CalibrationInputs{3.0, 5.0, 2.0, 0.005, 0.01});
    EXPECT_GE(p.tau_h, p.tau_h1);
    for (double v : {p.alpha_b, p.alpha_r, p.tau_h, p.tau_av})
      EXPECT_TRUE(std::isfinite(v));
  }
  auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  EXPECT_THROW(derive_params(s, CalibrationInputs{NAN, 1, 2, 0, 0}), ValidationError);
}

TEST(DeriveParams, ConstantDensityScaling) {
  const auto [w1, h1] = arena_dims_for_area(Kind::SS, 1000);
  const auto [w2, h2] = arena_dims_for_area(Kind::SS, 2000);
  const auto a = make_scenario(Kind::SS, w1, h1, 10, 20, 1);
  const auto b = make_scenario(Kind::SS, w2, h2, 20, 20, 1);
  const CalibrationInputs in{2.0, 3.0, 2.0, 0.003, 0.01};
  const auto pa = derive_params(a, in), pb = derive_params(b, in);
  const double da = derive_geometry(a).acq_distance, db = derive_geometry(b).acq_distance;
  EXPECT_NEAR(pb.alpha_b / pa.alpha_b, 2.0 * (da * da) / (db * db), 1e-9);
}

TEST(KeyValues, TwelveSignificantDigits) {
  EXPECT_EQ(format_g12(1.0 / 3.0), "0.333333333333");
  const auto kv = parse_key_values("a = 1\n# c\nb = x y\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("b"), "x y");
}
