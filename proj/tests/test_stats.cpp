#include <gtest/gtest.h>

#include <vector>

#include "forage/stats.hpp"

using namespace forage;

namespace {

TimeSeries flat_series(int n_h, int n_av, double horizon, int samples) {
  TimeSeries ts;
  for (int k = 1; k <= samples; ++k) {
    ts.times.push_back(horizon * k / samples);
    ts.n_s.push_back(10 - n_h - n_av);
    ts.n_h.push_back(n_h);
    ts.n_av_s.push_back(n_av);
    ts.n_av_h.push_back(0);
    ts.collected_cum.push_back(k);
  }
  return ts;
}

} // namespace

TEST(TInterval, KnownQuantile) {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const auto iv = t_interval(xs);
  // t_{0.975, 4} = 2.776445105
  const double hw = 2.776445105 * std::sqrt(2.5) / std::sqrt(5.0);
  EXPECT_NEAR(iv.mean, 3.0, 1e-15);
  EXPECT_NEAR(iv.hi - iv.mean, hw, 1e-8);
  EXPECT_TRUE(iv.contains(3.0));
  EXPECT_FALSE(iv.contains(6.0));
}

TEST(TInterval, DegenerateSamples) {
  const std::vector<double> one{4.0};
  const auto iv = t_interval(one);
  EXPECT_EQ(iv.lo, 4.0);
  EXPECT_EQ(iv.hi, 4.0);
  EXPECT_EQ(t_interval(std::vector<double>{}).per_replicate.size(), 0u);
}

TEST(SteadyStats, AveragesAfterBurnIn) {
  std::vector<TimeSeries> s{flat_series(2, 1, 100, 100), flat_series(4, 1, 100, 100)};
  const auto st = steady_stats(s, 20);
  EXPECT_NEAR(st.n_h.mean, 3.0, 1e-12);
  EXPECT_NEAR(st.n_av.mean, 1.0, 1e-12);
  EXPECT_NEAR(st.n_av.half_width(), 0.0, 1e-12);
  EXPECT_NEAR(st.collection_rate.mean, 1.0, 1e-12);
  EXPECT_FALSE(st.non_stationary);
  EXPECT_EQ(st.replicates, 2);
}

TEST(SteadyStats, FlagsDrift) {
  TimeSeries ts = flat_series(0, 0, 100, 100);
  for (std::size_t k = 0; k < ts.size(); ++k)
    ts.n_h[k] = static_cast<int>(k / 10);
  std::vector<TimeSeries> s{ts, ts};
  EXPECT_TRUE(steady_stats(s, 10).non_stationary);
}

TEST(SteadyStats, RejectsBadWindow) {
  std::vector<TimeSeries> s{flat_series(1, 1, 100, 10)};
  EXPECT_THROW(steady_stats(s, 100), ValidationError);
  EXPECT_THROW(steady_stats(std::vector<TimeSeries>{}, 0), ValidationError);
}
