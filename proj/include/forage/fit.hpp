#ifndef FORAGE_FIT_HPP
#define FORAGE_FIT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "forage/analytic.hpp"
#include "forage/core.hpp"
#include "forage/microsim.hpp"
#include "forage/ode.hpp"
#include "forage/scenario.hpp"

namespace forage {

// ---------------------------------------------------------------------------
// Deterministic log-grid search
// ---------------------------------------------------------------------------

struct SearchAxis {
  double lo = 1e-3;
  double hi = 1e3;
};

struct SearchOptions {
  int per_decade = 8;   // initial grid density
  int rounds = 3;       // refinement rounds that shrink the step
  int refine = 4;       // step divisor per round
  int half_width = 4;   // local grid spans +/- half_width steps
  int max_moves = 200;  // cap on re-centring rounds without shrinking
  int moves_per_level = 1000; // re-centring rounds allowed at one step size
  double flat_spread = 1e-12;
};

template <std::size_t D> struct SearchResult {
  std::array<double, D> best{};
  double value = std::numeric_limits<double>::infinity();
  long evaluations = 0;
  double grid_min = 0.0, grid_max = 0.0; // finite objective range over the initial grid
};

namespace detail {

// Evaluates all points (in parallel) and returns the first strict minimum in
// the given order; points are generated in ascending lexicographic order, so
// ties resolve toward smaller parameters.
template <std::size_t D, class F>
std::pair<std::size_t, std::vector<double>> evaluate_all(F &f, const std::vector<std::array<double, D>> &pts) {
  std::vector<double> vals(pts.size());
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    double v;
    try {
      v = f(pts[static_cast<std::size_t>(i)]);
    } catch (const Error &) {
      v = std::numeric_limits<double>::infinity();
    }
    vals[static_cast<std::size_t>(i)] = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  });
  std::size_t arg = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] < vals[arg])
      arg = i;
  return {arg, std::move(vals)};
}

template <std::size_t D>
std::vector<std::array<double, D>> tensor_grid(const std::array<std::vector<double>, D> &axes) {
  std::vector<std::array<double, D>> pts;
  std::array<std::size_t, D> idx{};
  while (true) {
    std::array<double, D> p;
    for (std::size_t d = 0; d < D; ++d)
      p[d] = axes[d][idx[d]];
    pts.push_back(p);
    std::size_t d = D;
    while (d-- > 0) {
      if (++idx[d] < axes[d].size())
        break;
      idx[d] = 0;
      if (d == 0)
        return pts;
    }
  }
}

} // namespace detail

/// Minimises f over a box in log space: a full grid, then local grids around
/// the incumbent whose step shrinks by `refine` each time the incumbent is
/// interior (otherwise the local grid re-centres at the same step).
template <std::size_t D, class F>
SearchResult<D> log_grid_search(F &&f, const std::array<SearchAxis, D> &box, const SearchOptions &opt = {}) {
  std::array<double, D> llo, lhi;
  std::array<std::vector<double>, D> axes;
  const double step0 = 1.0 / opt.per_decade;
  for (std::size_t d = 0; d < D; ++d) {
    if (!(box[d].lo > 0.0) || !(box[d].hi > box[d].lo))
      throw ValidationError("search bounds must satisfy 0 < lo < hi");
    llo[d] = std::log10(box[d].lo);
    lhi[d] = std::log10(box[d].hi);
    const int n = static_cast<int>(std::ceil((lhi[d] - llo[d]) / step0 - 1e-9));
    for (int k = 0; k <= n; ++k)
      axes[d].push_back(std::pow(10.0, std::min(llo[d] + k * step0, lhi[d])));
  }

  SearchResult<D> res;
  auto pts = detail::tensor_grid<D>(axes);
  auto [arg, vals] = detail::evaluate_all<D>(f, pts);
  res.evaluations = static_cast<long>(pts.size());
  double mn = std::numeric_limits<double>::infinity(), mx = -mn;
  for (double v : vals)
    if (std::isfinite(v)) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  if (!std::isfinite(mn))
    throw UnidentifiableFitError("objective is infeasible over the whole grid");
  res.grid_min = mn;
  res.grid_max = mx;
  if ((mx - mn) <= opt.flat_spread * std::max(std::abs(mx), std::numeric_limits<double>::min()))
    throw UnidentifiableFitError("objective is flat across the grid");
  res.best = pts[arg];
  res.value = vals[arg];

  double step = step0;
  int shrinks = 0, moves = 0, level_moves = 0;
  while (shrinks < opt.rounds && moves < opt.max_moves) {
    const double local = step / opt.refine;
    std::array<std::vector<double>, D> loc;
    std::array<double, D> centre;
    for (std::size_t d = 0; d < D; ++d) {
      centre[d] = std::log10(res.best[d]);
      for (int k = -opt.half_width; k <= opt.half_width; ++k) {
        const double l = centre[d] + k * local;
        if (l < llo[d] - 1e-12 || l > lhi[d] + 1e-12)
          continue;
        loc[d].push_back(std::pow(10.0, std::clamp(l, llo[d], lhi[d])));
      }
    }
    auto lp = detail::tensor_grid<D>(loc);
    auto [la, lv] = detail::evaluate_all<D>(f, lp);
    res.evaluations += static_cast<long>(lp.size());
    bool boundary = false;
    if (lv[la] < res.value) {
      res.value = lv[la];
      res.best = lp[la];
      for (std::size_t d = 0; d < D; ++d) {
        const double off = std::abs(std::log10(res.best[d]) - centre[d]);
        const bool at_box = std::log10(res.best[d]) <= llo[d] + 1e-12 || std::log10(res.best[d]) >= lhi[d] - 1e-12;
        if (off > (opt.half_width - 0.5) * local && !at_box)
          boundary = true;
      }
    }
    if (boundary && level_moves < opt.moves_per_level) {
      ++moves;
      ++level_moves;
      step = local * opt.refine; // same resolution, new centre
    } else {
      ++shrinks;
      level_moves = 0;
      step = local;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Characterization fit
// ---------------------------------------------------------------------------

/// One calibration run: the scenario, its simulated steady means and the
/// single-robot avoidance measurement for its arena.
struct CalibrationPoint {
  Scenario scenario;
  double n_h = 0.0;
  double n_av = 0.0;
  SingleRobotMeasurement single;
};

struct CalibrationRecord {
  int n = 0;
  double n_h = 0.0;
  double n_av = 0.0;
};

struct FitResult {
  double sigma_m = 0.0;
  double chi_m = 0.0;
  double residual = 0.0;
  std::vector<CalibrationRecord> calibration_points;
  Kind scenario_kind = Kind::SS;
  long evaluations = 0;

  /// chi relative to the random-distribution reference fit.
  double relative_chi(const FitResult &rn) const {
    if (rn.scenario_kind != Kind::RN)
      throw ValidationError("relative chi needs an RN reference fit");
    return chi_m / rn.chi_m;
  }
};

struct FitOptions {
  SearchAxis sigma{1e-3, 1e3};
  SearchAxis chi{1e-3, 1e3};
  SearchOptions search{};
  DeriveOptions derive{};
};

inline CalibrationInputs calibration_inputs(const SingleRobotMeasurement &m, double sigma_m, double chi_m) {
  CalibrationInputs in;
  in.sigma_m = sigma_m;
  in.chi_m = chi_m;
  in.tau_av = m.tau_av;
  in.alpha_r1 = m.alpha_r1;
  in.n_av1 = m.n_av1;
  return in;
}

/// Steady (N_h, N_av) predicted by the generalised model.
inline std::pair<double, double> predict_steady(const Scenario &s, const ScenarioGeometry &g,
                                                const CalibrationInputs &in, const DeriveOptions &opt = {}) {
  const auto p = derive_params(s, g, in, opt);
  // no non-negative steady state exists once the loaded pools exceed the swarm
  if (!(p.alpha_b * p.tau_h + p.alpha_r * p.tau_av < s.robot_count))
    throw ModelDomainError("steady homing and avoiding populations exceed the swarm size");
  const auto rep = solve_generalized(s, p);
  if (!rep.converged)
    throw NumericError("model did not reach steady state");
  return {rep.steady_state.n_h, rep.steady_state.n_av()};
}

namespace detail {

inline void check_calibration(std::span<const CalibrationPoint> pts) {
  std::set<int> sizes;
  for (const auto &c : pts)
    sizes.insert(c.scenario.robot_count);
  if (sizes.size() < 2)
    throw UnidentifiableFitError("fit needs calibration points with at least two distinct swarm sizes");
}

inline std::vector<CalibrationRecord> records(std::span<const CalibrationPoint> pts) {
  std::vector<CalibrationRecord> out;
  for (const auto &c : pts)
    out.push_back({c.scenario.robot_count, c.n_h, c.n_av});
  return out;
}

} // namespace detail

/// Sum over points of [(N_h_hat - N_h)/N]^2 + [(N_av_hat - N_av)/N]^2.
inline double characterization_objective(std::span<const CalibrationPoint> pts,
                                         std::span<const ScenarioGeometry> geoms, double sigma_m, double chi_m,
                                         const DeriveOptions &opt = {}) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto &c = pts[i];
    const auto [nh, nav] = predict_steady(c.scenario, geoms[i], calibration_inputs(c.single, sigma_m, chi_m), opt);
    const double n = c.scenario.robot_count;
    total += std::pow((nh - c.n_h) / n, 2) + std::pow((nav - c.n_av) / n, 2);
  }
  return total;
}

/// Joint fit of (sigma_m, chi_m) for one scenario family.
inline FitResult fit_characterizations(Kind kind, std::span<const CalibrationPoint> pts, const FitOptions &opt = {}) {
  detail::check_calibration(pts);
  for (const auto &c : pts)
    if (c.scenario.kind != kind)
      throw ValidationError("calibration point kind does not match the fitted family");
  std::vector<ScenarioGeometry> geoms;
  for (const auto &c : pts)
    geoms.push_back(derive_geometry(c.scenario));

  auto f = [&](const std::array<double, 2> &x) { return characterization_objective(pts, geoms, x[0], x[1], opt.derive); };
  const auto r = log_grid_search<2>(f, {opt.sigma, opt.chi}, opt.search);
  FitResult fr;
  fr.sigma_m = r.best[0];
  fr.chi_m = r.best[1];
  fr.residual = r.value;
  fr.calibration_points = detail::records(pts);
  fr.scenario_kind = kind;
  fr.evaluations = r.evaluations;
  return fr;
}

inline std::vector<std::pair<std::string, std::string>> to_key_values(const FitResult &f) {
  std::vector<std::pair<std::string, std::string>> kv{{"kind", std::string(to_string(f.scenario_kind))},
                                                      {"sigma_m", format_g12(f.sigma_m)},
                                                      {"chi_m", format_g12(f.chi_m)},
                                                      {"residual", format_g12(f.residual)},
                                                      {"evaluations", std::to_string(f.evaluations)}};
  for (std::size_t i = 0; i < f.calibration_points.size(); ++i) {
    const auto &c = f.calibration_points[i];
    kv.emplace_back("calib" + std::to_string(i), std::to_string(c.n) + " " + format_g12(c.n_h) + " " + format_g12(c.n_av));
  }
  return kv;
}

inline FitResult fit_result_from_key_values(const std::map<std::string, std::string> &kv) {
  auto get = [&](const std::string &k) -> const std::string & {
    auto it = kv.find(k);
    if (it == kv.end())
      throw ValidationError("fit result is missing '" + k + "'");
    return it->second;
  };
  FitResult f;
  f.scenario_kind = parse_kind(get("kind"));
  f.sigma_m = std::stod(get("sigma_m"));
  f.chi_m = std::stod(get("chi_m"));
  f.residual = std::stod(get("residual"));
  f.evaluations = std::stol(get("evaluations"));
  for (int i = 0;; ++i) {
    auto it = kv.find("calib" + std::to_string(i));
    if (it == kv.end())
      break;
    std::istringstream is(it->second);
    CalibrationRecord c;
    is >> c.n >> c.n_h >> c.n_av;
    f.calibration_points.push_back(c);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Baseline (five-parameter) fit
// ---------------------------------------------------------------------------

struct LegacyFitOptions {
  SearchAxis alpha_r{1e-6, 1e-2};
  SearchAxis alpha_r_prime{1e-6, 1e-2};
  SearchAxis alpha_b{1e-6, 1e-2};
  SearchAxis tau_h{10.0, 1e4};
  SearchAxis tau_av{0.5, 50.0};
  SearchOptions search{1, 24, 2, 1, 400, 2, 1e-12};
  double dt = 0.5;
  double horizon = 20000.0; // matches the observation window of the calibration runs
  double burn_in = 4000.0;
};

struct LegacyFitResult {
  LegacyParams params;
  double residual = 0.0;
  long evaluations = 0;
  std::vector<CalibrationRecord> calibration_points;
  std::optional<std::string> warning;
};

/// The baseline model depletes its block pool, so it has no non-trivial steady
/// state; predictions are its post-burn-in time averages over the window.
inline std::pair<double, double> legacy_window_average(const Scenario &s, const LegacyParams &p, double dt,
                                                       double horizon, double burn_in) {
  double nh = 0.0, nav = 0.0;
  long k = 0;
  solve_legacy(s, p, dt, horizon, 0, [&](double t, const OdeState &x) {
    if (t > burn_in) {
      nh += x.n_h;
      nav += x.n_av();
      ++k;
    }
  });
  if (k == 0)
    throw ValidationError("burn-in must end before the horizon");
  return {nh / k, nav / k};
}

inline double legacy_objective(std::span<const CalibrationPoint> pts, const LegacyParams &p,
                               const LegacyFitOptions &opt) {
  double total = 0.0;
  for (const auto &c : pts) {
    const auto [nh, nav] = legacy_window_average(c.scenario, p, opt.dt, opt.horizon, opt.burn_in);
    const double n = c.scenario.robot_count;
    total += std::pow((nh - c.n_h) / n, 2) + std::pow((nav - c.n_av) / n, 2);
  }
  return total;
}

inline LegacyFitResult fit_legacy_params(std::span<const CalibrationPoint> pts, const LegacyFitOptions &opt = {}) {
  detail::check_calibration(pts);
  auto unpack = [](const std::array<double, 5> &x) { return LegacyParams{x[0], x[1], x[2], x[3], x[4]}; };
  auto f = [&](const std::array<double, 5> &x) { return legacy_objective(pts, unpack(x), opt); };
  const auto r = log_grid_search<5>(f, {opt.alpha_r, opt.alpha_r_prime, opt.alpha_b, opt.tau_h, opt.tau_av}, opt.search);
  LegacyFitResult out;
  out.params = unpack(r.best);
  out.residual = r.value;
  out.evaluations = r.evaluations;
  out.calibration_points = detail::records(pts);
  const std::size_t observations = 2 * pts.size();
  if (observations < 5)
    out.warning = "underdetermined: 5 parameters from " + std::to_string(observations) + " observations";
  return out;
}

} // namespace forage

#endif // FORAGE_FIT_HPP
