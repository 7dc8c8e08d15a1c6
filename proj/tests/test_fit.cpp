#include <gtest/gtest.h>

#include <cmath>

#include "forage/fit.hpp"

using namespace forage;

namespace {

SingleRobotMeasurement single() {
  SingleRobotMeasurement m;
  m.tau_av = 2.0;
  m.alpha_r1 = 0.004;
  m.n_av1 = 0.008;
  return m;
}

std::vector<CalibrationPoint> synthetic(Kind k, std::vector<int> sizes, double sigma, double chi) {
  std::vector<CalibrationPoint> out;
  for (int n : sizes) {
    const auto [w, h] = arena_dims_for_area(k, n / 0.01);
    CalibrationPoint c;
    c.scenario = make_scenario(k, w, h, n, 20, 1);
    c.single = single();
    const auto [nh, nav] = predict_steady(c.scenario, derive_geometry(c.scenario), calibration_inputs(c.single, sigma, chi));
    c.n_h = nh;
    c.n_av = nav;
    out.push_back(c);
  }
  return out;
}

} // namespace

TEST(LogGridSearch, FindsInteriorMinimum) {
  auto f = [](const std::array<double, 2> &x) {
    return std::pow(std::log10(x[0]) - 0.3, 2) + std::pow(std::log10(x[1]) + 1.1, 2);
  };
  const auto r = log_grid_search<2>(f, {SearchAxis{}, SearchAxis{}});
  EXPECT_NEAR(std::log10(r.best[0]), 0.3, 2e-3);
  EXPECT_NEAR(std::log10(r.best[1]), -1.1, 2e-3);
}

TEST(LogGridSearch, FlatObjectiveIsUnidentifiable) {
  auto f = [](const std::array<double, 1> &) { return 1.0; };
  EXPECT_THROW(log_grid_search<1>(f, {SearchAxis{}}), UnidentifiableFitError);
  auto g = [](const std::array<double, 1> &) -> double { throw ModelDomainError("x"); };
  EXPECT_THROW(log_grid_search<1>(g, {SearchAxis{}}), UnidentifiableFitError);
  EXPECT_THROW(log_grid_search<1>(f, {SearchAxis{1.0, 1.0}}), ValidationError);
}

TEST(LogGridSearch, TiesResolveTowardSmallerParameters) {
  // minimum attained on the whole lower half
  auto f = [](const std::array<double, 1> &x) { return x[0] < 1.0 ? 0.0 : 1.0; };
  const auto r = log_grid_search<1>(f, {SearchAxis{}});
  EXPECT_DOUBLE_EQ(r.best[0], 1e-3);
}

TEST(CharacterizationFit, RecoversUnitCharacterizations) {
  const auto pts = synthetic(Kind::SS, {5, 10, 20}, 1.0, 1.0);
  const auto r = fit_characterizations(Kind::SS, pts);
  EXPECT_NEAR(r.sigma_m, 1.0, 1e-9);
  EXPECT_NEAR(r.chi_m, 1.0, 1e-9);
  EXPECT_LT(r.residual, 1e-12);
  EXPECT_EQ(r.calibration_points.size(), 3u);
}

TEST(CharacterizationFit, RecoversOffGridValues) {
  const auto pts = synthetic(Kind::DS, {5, 10, 20}, 3.0, 7.0);
  const auto r = fit_characterizations(Kind::DS, pts);
  EXPECT_NEAR(r.sigma_m, 3.0, 0.03 * 3.0);
  EXPECT_NEAR(r.chi_m, 7.0, 0.03 * 7.0);
}

TEST(CharacterizationFit, Deterministic) {
  const auto pts = synthetic(Kind::SS, {5, 20}, 2.0, 5.0);
  const auto a = fit_characterizations(Kind::SS, pts);
  const auto b = fit_characterizations(Kind::SS, pts);
  EXPECT_EQ(a.sigma_m, b.sigma_m);
  EXPECT_EQ(a.chi_m, b.chi_m);
  EXPECT_EQ(a.residual, b.residual);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(CharacterizationFit, SingleSwarmSizeIsUnidentifiable) {
  auto pts = synthetic(Kind::SS, {10, 10}, 1.0, 1.0);
  EXPECT_THROW(fit_characterizations(Kind::SS, pts), UnidentifiableFitError);
  pts = synthetic(Kind::SS, {5, 10}, 1.0, 1.0);
  EXPECT_THROW(fit_characterizations(Kind::DS, pts), ValidationError);
}

TEST(CharacterizationFit, KeyValueRoundTrip) {
  FitResult f;
  f.sigma_m = 1.25;
  f.chi_m = 3.5;
  f.residual = 1e-7;
  f.scenario_kind = Kind::DS;
  f.evaluations = 99;
  f.calibration_points = {{5, 0.5, 0.06}, {10, 0.7, 0.09}};
  std::map<std::string, std::string> kv;
  for (const auto &[k, v] : to_key_values(f))
    kv[k] = v;
  const auto g = fit_result_from_key_values(kv);
  EXPECT_EQ(g.scenario_kind, Kind::DS);
  EXPECT_EQ(g.sigma_m, 1.25);
  ASSERT_EQ(g.calibration_points.size(), 2u);
  EXPECT_EQ(g.calibration_points[1].n, 10);
  EXPECT_NEAR(g.calibration_points[1].n_av, 0.09, 1e-15);
  FitResult rn = f;
  rn.scenario_kind = Kind::RN;
  rn.chi_m = 7.0;
  EXPECT_NEAR(f.relative_chi(rn), 0.5, 1e-15);
  EXPECT_THROW(f.relative_chi(f), ValidationError);
}

TEST(PredictSteady, RejectsOverfullSwarm) {
  const auto s = make_scenario(Kind::SS, 16, 8, 2, 20, 1);
  EXPECT_THROW(predict_steady(s, derive_geometry(s), calibration_inputs(single(), 1e3, 1.0)), ModelDomainError);
}

TEST(LegacyFit, WarnsWhenUnderdetermined) {
  const LegacyParams truth{2e-4, 1e-4, 1e-4, 100.0, 2.0};
  LegacyFitOptions opt;
  opt.horizon = 2000.0;
  opt.burn_in = 400.0;
  opt.search.rounds = 6;
  std::vector<CalibrationPoint> pts;
  for (int n : {5, 10}) {
    CalibrationPoint c;
    c.scenario = make_scenario(Kind::SS, 16, 8, n, 20, 1);
    std::tie(c.n_h, c.n_av) = legacy_window_average(c.scenario, truth, opt.dt, opt.horizon, opt.burn_in);
    pts.push_back(c);
  }
  EXPECT_NEAR(legacy_objective(pts, truth, opt), 0.0, 1e-20);
  const auto r = fit_legacy_params(pts, opt);
  ASSERT_TRUE(r.warning.has_value());
  EXPECT_EQ(*r.warning, "underdetermined: 5 parameters from 4 observations");
  EXPECT_TRUE(std::isfinite(r.residual));
  EXPECT_LT(r.residual, legacy_objective(pts, LegacyParams{1e-6, 1e-6, 1e-6, 10.0, 0.5}, opt));
}
