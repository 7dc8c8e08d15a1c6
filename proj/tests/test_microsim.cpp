#include <gtest/gtest.h>

#include <sstream>

#include "forage/analytic.hpp"
#include "forage/microsim.hpp"
#include "forage/stats.hpp"

using namespace forage;

TEST(StateMachine, LegalTransitions) {
  using S = RobotState;
  EXPECT_TRUE(is_legal_transition(S::Searching, S::Homing));
  EXPECT_TRUE(is_legal_transition(S::Homing, S::Searching));
  EXPECT_TRUE(is_legal_transition(S::AvoidingWhileHoming, S::Homing));
  EXPECT_FALSE(is_legal_transition(S::AvoidingWhileSearching, S::Homing));
  EXPECT_FALSE(is_legal_transition(S::AvoidingWhileHoming, S::Searching));
  EXPECT_FALSE(is_legal_transition(S::Searching, S::AvoidingWhileHoming));
}

TEST(SimWorld, TransitionsAndBlocksStayConsistent) {
  for (Kind k : all_kinds) {
    const auto [w, h] = arena_dims_for_area(k, 200);
    SimWorld world(make_scenario(k, w, h, 10, 20, 3), 17);
    std::vector<RobotState> before;
    for (int step = 0; step < 3000; ++step) {
      before.clear();
      for (const auto &r : world.robots())
        before.push_back(r.state);
      world.step();
      int carried = 0;
      for (std::size_t i = 0; i < before.size(); ++i) {
        const auto &r = world.robots()[i];
        ASSERT_TRUE(is_legal_transition(before[i], r.state)) << to_string(before[i]) << " -> " << to_string(r.state);
        const bool loaded = r.state == RobotState::Homing || r.state == RobotState::AvoidingWhileHoming;
        ASSERT_EQ(loaded, r.carried_block.has_value());
        carried += loaded;
      }
      ASSERT_EQ(world.floor_blocks() + carried, 20);
    }
    EXPECT_GT(world.tallies().collected, 0) << to_string(k);
  }
}

TEST(SimWorld, SameSeedSameRun) {
  const auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  const auto a = run(s, 2000, 2, 99);
  const auto b = run(s, 2000, 2, 99);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    EXPECT_EQ(a[r].n_h, b[r].n_h);
    EXPECT_EQ(a[r].n_av_s, b[r].n_av_s);
    EXPECT_EQ(a[r].collected_cum, b[r].collected_cum);
  }
  const auto c = run(s, 2000, 1, 100);
  EXPECT_NE(a[0].collected_cum, c[0].collected_cum);
}

TEST(SimWorld, ValueStepMatchesInPlaceStep) {
  const auto s = make_scenario(Kind::RN, 8, 8, 5, 20, 1);
  SimWorld a(s, 4);
  SimWorld b = step(a);
  a.step();
  EXPECT_EQ(a.clock(), b.clock());
  for (std::size_t i = 0; i < a.robots().size(); ++i)
    EXPECT_EQ(a.robots()[i].position.x, b.robots()[i].position.x);
}

TEST(SimWorld, AvoidanceQueueObeysLittlesLaw) {
  const auto s = make_scenario(Kind::SS, 32, 16, 20, 20, 1);
  const auto series = run(s, 10000, 2, 5);
  for (const auto &ts : series) {
    double occ = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k)
      occ += ts.n_av_s[k] + ts.n_av_h[k];
    occ /= ts.size();
    const double lambda = ts.tallies.episodes_started / ts.times.back();
    const double wait = ts.tallies.avoid_time_completed / ts.tallies.episodes_completed;
    EXPECT_NEAR(occ, lambda * wait, 0.05 * occ);
  }
}

TEST(SingleRobot, MeasurementIsConsistent) {
  const auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  const auto m = measure_single_robot(s, 20000, 3);
  EXPECT_FALSE(m.insufficient_horizon);
  EXPECT_NEAR(m.tau_av, SimConfig{}.avoid_duration, 1e-9);
  EXPECT_GT(m.alpha_r1, 0.0);
  EXPECT_NEAR(m.n_av1, m.alpha_r1 * m.tau_av, 0.01 * m.n_av1);
  const auto short_run = measure_single_robot(s, 0.2, 3);
  EXPECT_TRUE(short_run.insufficient_horizon);
}

TEST(Nest, TargetEndpoints) {
  const Vec2 e{0, 0}, c{2, 2};
  EXPECT_EQ(nest_target_choice(e, c, 0.0).x, 0.0);
  EXPECT_EQ(nest_target_choice(e, c, 1.0).y, 2.0);
  const Rect nest{{0, 0}, {2, 2}};
  const Vec2 entry = nest_entry_point(nest, Vec2{5, 1});
  EXPECT_NEAR(entry.x, 2.0, 1e-12);
  EXPECT_NEAR(entry.y, 1.0, 1e-12);
}

TEST(Nest, AreaUniformDropsReproduceShortening) {
  // rays through uniform nest points, drop along entry-to-centre
  const Rect nest{{0, 0}, {1, 1}};
  const Vec2 c = nest.center();
  Rng rng(8);
  double sum = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const Vec2 q{rng.uniform(), rng.uniform()};
    const Vec2 far = c + 10.0 * (q - c);
    const Vec2 drop = nest_target_choice(nest_entry_point(nest, far), c, rng);
    sum += distance(drop, c);
  }
  EXPECT_NEAR(sum / n, congestion_shortening(1.0), 0.05 * congestion_shortening(1.0));
}

TEST(SimWorld, RejectsBadInputs) {
  auto s = make_scenario(Kind::SS, 16, 8, 10, 20, 1);
  EXPECT_THROW(run(s, 1000, 0, 1), ValidationError);
  s.robot_count = 0;
  EXPECT_THROW(run(s, 1000, 1, 1), ValidationError);
  s.robot_count = 10;
  SimConfig cfg;
  cfg.dt = 5.0;
  EXPECT_THROW(SimWorld(s, 1, cfg), ValidationError);
}

TEST(Output, TimeseriesAndManifest) {
  const auto s = make_scenario(Kind::SS, 16, 8, 5, 20, 1);
  const auto series = run(s, 200, 2, 42);
  std::ostringstream ts, mf;
  write_timeseries_csv(ts, series[0]);
  EXPECT_EQ(ts.str().substr(0, ts.str().find('\n')), "t,n_s,n_h,n_av_s,n_av_h,collected_cum");
  write_run_manifest(mf, s, SimConfig{}, 200, 42, series);
  const auto kv = parse_key_values(mf.str());
  EXPECT_EQ(kv.at("seed"), "42");
  EXPECT_EQ(kv.at("replicates"), "2");
  EXPECT_EQ(kv.at("replicate_seed.1"), std::to_string(derive_seed(42, 1)));
}
