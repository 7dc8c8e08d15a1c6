#ifndef FORAGE_HARNESS_HPP
#define FORAGE_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "forage/analytic.hpp"
#include "forage/core.hpp"
#include "forage/fit.hpp"
#include "forage/microsim.hpp"
#include "forage/ode.hpp"
#include "forage/scenario.hpp"
#include "forage/stats.hpp"

namespace forage {

enum class Regime { ConstRhoLarge, ConstRhoSmall, VarRhoLarge, VarRhoSmall };

inline std::string_view to_string(Regime r) {
  switch (r) {
  case Regime::ConstRhoLarge:
    return "const-rho-large";
  case Regime::ConstRhoSmall:
    return "const-rho-small";
  case Regime::VarRhoLarge:
    return "var-rho-large";
  case Regime::VarRhoSmall:
    return "var-rho-small";
  }
  return "?";
}

inline Regime parse_regime(std::string_view s) {
  for (auto r : {Regime::ConstRhoLarge, Regime::ConstRhoSmall, Regime::VarRhoLarge, Regime::VarRhoSmall})
    if (s == to_string(r))
      return r;
  throw ValidationError("unknown regime '" + std::string(s) + "'");
}

inline bool is_var_rho(Regime r) { return r == Regime::VarRhoLarge || r == Regime::VarRhoSmall; }

struct ExperimentPlan {
  Regime regime = Regime::ConstRhoSmall;
  std::vector<Kind> kinds{Kind::SS, Kind::DS};
  std::vector<int> sizes{5, 10, 20, 50}; // const-rho only
  std::vector<double> densities{0.01};
  double horizon = 20000.0;
  int replicates = 8;
  std::uint64_t seed = 1;
  int total_blocks = 20;
  double fixed_area = 512.0; // var-rho arena area (m^2)
  std::vector<int> calibration_sizes{5, 10, 20};
  int calibration_replicates = 8;
  double calibration_horizon = 20000.0;
  double single_robot_horizon = 200000.0;
  int dtheta_sign = +1;
  double mu_h = 1.0;
  bool legacy_baseline = false;
};

inline void validate(const ExperimentPlan &p) {
  if (p.kinds.empty())
    throw ValidationError("plan needs at least one scenario kind");
  if (p.densities.empty())
    throw ValidationError("plan needs at least one density");
  if (!is_var_rho(p.regime) && p.sizes.empty())
    throw ValidationError("constant-density plans need at least one swarm size");
  if (p.replicates < 2 || p.calibration_replicates < 2)
    throw ValidationError("interval reporting needs at least two replicates");
  if (!(p.horizon > 0.0) || !(p.calibration_horizon > 0.0) || !(p.single_robot_horizon > 0.0))
    throw ValidationError("horizons must be positive");
  for (double r : p.densities)
    if (!(r > 0.0))
      throw ValidationError("densities must be positive");
  for (int n : p.sizes)
    if (n < 1)
      throw ValidationError("swarm sizes must be >= 1");
  if (p.dtheta_sign != 1 && p.dtheta_sign != -1)
    throw ValidationError("dtheta sign must be +1 or -1");
}

inline nlohmann::json to_json(const ExperimentPlan &p) {
  nlohmann::json j;
  j["regime"] = std::string(to_string(p.regime));
  std::vector<std::string> kinds;
  for (auto k : p.kinds)
    kinds.emplace_back(to_string(k));
  j["kinds"] = kinds;
  j["sizes"] = p.sizes;
  j["densities"] = p.densities;
  j["horizon"] = p.horizon;
  j["replicates"] = p.replicates;
  j["seed"] = p.seed;
  j["total_blocks"] = p.total_blocks;
  j["fixed_area"] = p.fixed_area;
  j["calibration_sizes"] = p.calibration_sizes;
  j["calibration_replicates"] = p.calibration_replicates;
  j["calibration_horizon"] = p.calibration_horizon;
  j["single_robot_horizon"] = p.single_robot_horizon;
  j["dtheta_sign"] = p.dtheta_sign;
  j["mu_h"] = p.mu_h;
  j["legacy_baseline"] = p.legacy_baseline;
  return j;
}

inline ExperimentPlan plan_from_json(const nlohmann::json &j) {
  ExperimentPlan p;
  try {
    if (j.contains("regime"))
      p.regime = parse_regime(j.at("regime").get<std::string>());
    if (j.contains("kinds")) {
      p.kinds.clear();
      for (const auto &k : j.at("kinds"))
        p.kinds.push_back(parse_kind(k.get<std::string>()));
    }
    auto opt = [&](const char *key, auto &field) {
      if (j.contains(key))
        j.at(key).get_to(field);
    };
    opt("sizes", p.sizes);
    opt("densities", p.densities);
    opt("horizon", p.horizon);
    opt("replicates", p.replicates);
    opt("seed", p.seed);
    opt("total_blocks", p.total_blocks);
    opt("fixed_area", p.fixed_area);
    opt("calibration_sizes", p.calibration_sizes);
    opt("calibration_replicates", p.calibration_replicates);
    opt("calibration_horizon", p.calibration_horizon);
    opt("single_robot_horizon", p.single_robot_horizon);
    opt("dtheta_sign", p.dtheta_sign);
    opt("mu_h", p.mu_h);
    opt("legacy_baseline", p.legacy_baseline);
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("malformed plan: ") + e.what());
  }
  validate(p);
  return p;
}

/// Built-in desk-scale plans for the four regimes.
inline ExperimentPlan default_plan(Regime r) {
  ExperimentPlan p;
  p.regime = r;
  switch (r) {
  case Regime::ConstRhoSmall:
    p.sizes = {5, 10, 20, 50};
    p.densities = {0.01};
    break;
  case Regime::ConstRhoLarge:
    p.sizes = {50, 100, 200};
    p.densities = {0.01};
    break;
  case Regime::VarRhoSmall:
  case Regime::VarRhoLarge:
    p.kinds = {Kind::SS};
    p.densities = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
    p.fixed_area = r == Regime::VarRhoSmall ? 512.0 : 2048.0;
    break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Plan points
// ---------------------------------------------------------------------------

struct PlanPoint {
  Kind kind = Kind::SS;
  int n = 0;
  double rho = 0.0;
  double width = 0.0, height = 0.0;
};

inline std::vector<PlanPoint> plan_points(const ExperimentPlan &p) {
  validate(p);
  std::vector<PlanPoint> out;
  for (auto k : p.kinds)
    for (double rho : p.densities) {
      if (is_var_rho(p.regime)) {
        const auto [w, h] = arena_dims_for_area(k, p.fixed_area);
        out.push_back({k, std::max(1, static_cast<int>(std::lround(rho * p.fixed_area))), rho, w, h});
      } else {
        for (int n : p.sizes) {
          const auto [w, h] = arena_dims_for_area(k, n / rho);
          out.push_back({k, n, rho, w, h});
        }
      }
    }
  return out;
}

namespace detail {

inline std::uint64_t point_seed(std::uint64_t base, std::string_view tag, Kind k, int n, double rho) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*s/%.*s/%d/%.9g", static_cast<int>(tag.size()), tag.data(),
                static_cast<int>(to_string(k).size()), to_string(k).data(), n, rho);
  return derive_seed(base, fnv1a(buf));
}

inline std::string fit_key(Kind k, double rho) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s@%.9g", std::string(to_string(k)).c_str(), rho);
  return buf;
}

} // namespace detail

inline Scenario point_scenario(const ExperimentPlan &p, const PlanPoint &pt) {
  return make_scenario(pt.kind, pt.width, pt.height, pt.n, p.total_blocks,
                       detail::point_seed(p.seed, "scenario", pt.kind, pt.n, pt.rho));
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

struct Calibration {
  Kind kind = Kind::SS;
  double rho = 0.0;
  FitResult fit;
  std::optional<LegacyFitResult> legacy;
  std::vector<CalibrationPoint> points;
};

/// Calibration runs at N in calibration_sizes on arenas scaled to density rho,
/// with seeds disjoint from the comparison runs.
inline std::vector<CalibrationPoint> calibration_points(const ExperimentPlan &p, Kind kind, double rho) {
  std::vector<CalibrationPoint> out;
  for (int n : p.calibration_sizes) {
    const auto [w, h] = arena_dims_for_area(kind, n / rho);
    const auto s = make_scenario(kind, w, h, n, p.total_blocks, detail::point_seed(p.seed, "calib-scenario", kind, n, rho));
    const auto series = run(s, p.calibration_horizon, p.calibration_replicates,
                            detail::point_seed(p.seed, "calib", kind, n, rho));
    const auto st = steady_stats(series, SimConfig{}.burn_in_fraction * p.calibration_horizon);
    CalibrationPoint c;
    c.scenario = s;
    c.n_h = st.n_h.mean;
    c.n_av = st.n_av.mean;
    c.single = measure_single_robot(s, p.single_robot_horizon, detail::point_seed(p.seed, "single", kind, n, rho));
    out.push_back(std::move(c));
  }
  return out;
}

inline Calibration calibrate(const ExperimentPlan &p, Kind kind, double rho) {
  Calibration c;
  c.kind = kind;
  c.rho = rho;
  c.points = calibration_points(p, kind, rho);
  FitOptions fo;
  fo.derive.dtheta_sign = p.dtheta_sign;
  c.fit = fit_characterizations(kind, c.points, fo);
  if (p.legacy_baseline) {
    LegacyFitOptions lo;
    lo.horizon = p.calibration_horizon;
    lo.burn_in = SimConfig{}.burn_in_fraction * p.calibration_horizon;
    c.legacy = fit_legacy_params(c.points, lo);
  }
  return c;
}

inline std::map<std::string, Calibration> calibrate_plan(const ExperimentPlan &p) {
  std::map<std::string, Calibration> out;
  for (auto k : p.kinds)
    for (double rho : p.densities)
      out.emplace(detail::fit_key(k, rho), calibrate(p, k, rho));
  return out;
}

/// Calibration file: one key-value block per (kind, density), blank-line separated.
inline void write_calibrations(std::ostream &os, const std::map<std::string, Calibration> &cals) {
  for (const auto &[key, c] : cals) {
    auto kv = to_key_values(c.fit);
    kv.emplace_back("rho", format_g12(c.rho));
    if (c.legacy) {
      const auto &l = c.legacy->params;
      kv.emplace_back("legacy_residual", format_g12(c.legacy->residual));
      kv.emplace_back("legacy_params", format_g12(l.alpha_r) + " " + format_g12(l.alpha_r_prime) + " " +
                                           format_g12(l.alpha_b) + " " + format_g12(l.tau_h) + " " +
                                           format_g12(l.tau_av));
    }
    os << render_key_values(kv) << '\n';
  }
}

inline std::map<std::string, Calibration> read_calibrations(std::istream &is) {
  std::map<std::string, Calibration> out;
  std::string line, block;
  auto flush = [&] {
    if (block.find('=') == std::string::npos) {
      block.clear();
      return;
    }
    const auto kv = parse_key_values(block);
    Calibration c;
    c.fit = fit_result_from_key_values(kv);
    c.kind = c.fit.scenario_kind;
    c.rho = std::stod(kv.at("rho"));
    if (auto it = kv.find("legacy_params"); it != kv.end()) {
      LegacyFitResult l;
      std::istringstream ps(it->second);
      ps >> l.params.alpha_r >> l.params.alpha_r_prime >> l.params.alpha_b >> l.params.tau_h >> l.params.tau_av;
      l.residual = std::stod(kv.at("legacy_residual"));
      c.legacy = l;
    }
    out.emplace(detail::fit_key(c.kind, c.rho), std::move(c));
    block.clear();
  };
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      flush();
    else
      block += line + '\n';
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

struct Prediction {
  double n_h = 0.0;
  double n_av = 0.0;
  double p = 0.0;
  ModelParams params;
};

inline Prediction predict_point(const Scenario &s, const FitResult &fit, const SingleRobotMeasurement &single,
                                const DeriveOptions &dopt = {}, double mu_h = 1.0) {
  Prediction pr;
  pr.params = derive_params(s, calibration_inputs(single, fit.sigma_m, fit.chi_m), dopt);
  SolveOptions so;
  so.mu_h = mu_h;
  const auto rep = solve_generalized(s, pr.params, so);
  if (!rep.converged)
    throw NumericError("model did not reach steady state");
  pr.n_h = rep.steady_state.n_h;
  pr.n_av = rep.steady_state.n_av();
  pr.p = rep.performance;
  return pr;
}

struct ComparisonRow {
  Regime regime = Regime::ConstRhoSmall;
  Kind kind = Kind::SS;
  int n = 0;
  double rho = 0.0;
  double pred_nh = 0.0, pred_nav = 0.0, pred_p = 0.0;
  Interval sim_nh, sim_nav, sim_p;
  bool in_ci_nh = false, in_ci_nav = false;
  bool non_stationary = false;
  double sigma_m = 0.0, chi_m = 0.0;
  std::optional<std::string> failure;
};

inline ComparisonRow compare_point(const ExperimentPlan &p, const PlanPoint &pt, const Calibration &cal) {
  ComparisonRow row;
  row.regime = p.regime;
  row.kind = pt.kind;
  row.n = pt.n;
  row.rho = pt.rho;
  row.sigma_m = cal.fit.sigma_m;
  row.chi_m = cal.fit.chi_m;
  const auto s = point_scenario(p, pt);
  const auto single = measure_single_robot(s, p.single_robot_horizon, detail::point_seed(p.seed, "single-pt", pt.kind, pt.n, pt.rho));
  DeriveOptions dopt;
  dopt.dtheta_sign = p.dtheta_sign;
  const auto pr = predict_point(s, cal.fit, single, dopt, p.mu_h);
  row.pred_nh = pr.n_h;
  row.pred_nav = pr.n_av;
  row.pred_p = pr.p;
  const auto series = run(s, p.horizon, p.replicates, detail::point_seed(p.seed, "sim", pt.kind, pt.n, pt.rho));
  const auto st = steady_stats(series, SimConfig{}.burn_in_fraction * p.horizon);
  row.sim_nh = st.n_h;
  row.sim_nav = st.n_av;
  row.sim_p = st.collection_rate;
  row.non_stationary = st.non_stationary;
  row.in_ci_nh = row.sim_nh.contains(row.pred_nh);
  row.in_ci_nav = row.sim_nav.contains(row.pred_nav);
  return row;
}

struct PlanResult {
  ExperimentPlan plan;
  std::vector<ComparisonRow> rows;
  std::map<std::string, Calibration> calibrations;
  double runtime_seconds = 0.0;
};

/// Calibrates (unless calibrations are supplied), then predicts and simulates
/// every plan point. Per-point failures are recorded on the row.
inline PlanResult run_plan(const ExperimentPlan &p, std::optional<std::map<std::string, Calibration>> cals = {}) {
  validate(p);
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult res;
  res.plan = p;
  std::map<std::string, std::string> cal_errors;
  if (cals) {
    res.calibrations = std::move(*cals);
  } else {
    for (auto k : p.kinds)
      for (double rho : p.densities) {
        try {
          res.calibrations.emplace(detail::fit_key(k, rho), calibrate(p, k, rho));
        } catch (const Error &e) {
          cal_errors[detail::fit_key(k, rho)] = std::string("calibration failed: ") + e.what();
        }
      }
  }
  for (const auto &pt : plan_points(p)) {
    ComparisonRow row;
    row.regime = p.regime;
    row.kind = pt.kind;
    row.n = pt.n;
    row.rho = pt.rho;
    const auto key = detail::fit_key(pt.kind, pt.rho);
    const auto it = res.calibrations.find(key);
    if (it == res.calibrations.end()) {
      const auto e = cal_errors.find(key);
      row.failure = e != cal_errors.end() ? e->second : "no calibration for this kind and density";
    } else {
      try {
        row = compare_point(p, pt, it->second);
      } catch (const Error &e) {
        row.failure = e.what();
      }
    }
    res.rows.push_back(std::move(row));
  }
  res.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------------------
// Outputs
// ---------------------------------------------------------------------------

inline constexpr const char *rows_csv_header =
    "kind,N,rho,pred_nh,pred_nav,pred_p,sim_nh_mean,sim_nh_lo,sim_nh_hi,sim_nav_mean,sim_nav_lo,sim_nav_hi,"
    "sim_p_mean,in_ci_nh,in_ci_nav";

inline void write_rows_csv(std::ostream &os, const std::vector<ComparisonRow> &rows) {
  os << rows_csv_header << '\n';
  for (const auto &r : rows) {
    if (r.failure) {
      os << to_string(r.kind) << ',' << r.n << ',' << format_g12(r.rho) << ",nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,0,0\n";
      continue;
    }
    os << to_string(r.kind) << ',' << r.n << ',' << format_g12(r.rho);
    for (double v : {r.pred_nh, r.pred_nav, r.pred_p, r.sim_nh.mean, r.sim_nh.lo, r.sim_nh.hi, r.sim_nav.mean,
                     r.sim_nav.lo, r.sim_nav.hi, r.sim_p.mean})
      os << ',' << format_g12(v);
    os << ',' << (r.in_ci_nh ? 1 : 0) << ',' << (r.in_ci_nav ? 1 : 0) << '\n';
  }
}

inline std::vector<ComparisonRow> read_rows_csv(std::istream &is, Regime regime) {
  std::vector<ComparisonRow> rows;
  std::string line;
  if (!std::getline(is, line) || line != rows_csv_header)
    throw ValidationError("rows file has an unexpected header");
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      f.push_back(cell);
    if (f.size() != 15)
      throw ValidationError("rows file line has " + std::to_string(f.size()) + " fields");
    ComparisonRow r;
    r.regime = regime;
    r.kind = parse_kind(f[0]);
    r.n = std::stoi(f[1]);
    r.rho = std::stod(f[2]);
    if (f[3] == "nan") {
      r.failure = "failed";
      rows.push_back(r);
      continue;
    }
    r.pred_nh = std::stod(f[3]);
    r.pred_nav = std::stod(f[4]);
    r.pred_p = std::stod(f[5]);
    r.sim_nh = {std::stod(f[6]), std::stod(f[7]), std::stod(f[8]), {}};
    r.sim_nav = {std::stod(f[9]), std::stod(f[10]), std::stod(f[11]), {}};
    r.sim_p.mean = r.sim_p.lo = r.sim_p.hi = std::stod(f[12]);
    r.in_ci_nh = f[13] == "1";
    r.in_ci_nav = f[14] == "1";
    rows.push_back(r);
  }
  return rows;
}

struct RegimeSummary {
  int rows = 0;
  int failed = 0;
  double within_ci_nh = 0.0;
  double within_ci_nav = 0.0;
  double within_ci = 0.0; // over all (row, quantity) pairs
  double worst_rel_nh = 0.0, worst_rel_nav = 0.0, worst_rel_p = 0.0;
  /// Per kind: smallest density from which the N_av prediction stays outside the interval.
  std::map<Kind, double> divergence_density;
};

inline double relative_error(double pred, double obs) {
  return std::abs(pred - obs) / std::max(std::abs(obs), 1e-12);
}

inline RegimeSummary summarize(const std::vector<ComparisonRow> &rows) {
  RegimeSummary s;
  int ok = 0, nh = 0, nav = 0;
  for (const auto &r : rows) {
    ++s.rows;
    if (r.failure) {
      ++s.failed;
      continue;
    }
    ++ok;
    nh += r.in_ci_nh;
    nav += r.in_ci_nav;
    s.worst_rel_nh = std::max(s.worst_rel_nh, relative_error(r.pred_nh, r.sim_nh.mean));
    s.worst_rel_nav = std::max(s.worst_rel_nav, relative_error(r.pred_nav, r.sim_nav.mean));
    s.worst_rel_p = std::max(s.worst_rel_p, relative_error(r.pred_p, r.sim_p.mean));
  }
  if (ok > 0) {
    s.within_ci_nh = static_cast<double>(nh) / ok;
    s.within_ci_nav = static_cast<double>(nav) / ok;
    s.within_ci = static_cast<double>(nh + nav) / (2.0 * ok);
  }
  std::map<Kind, std::vector<const ComparisonRow *>> by_kind;
  for (const auto &r : rows)
    if (!r.failure)
      by_kind[r.kind].push_back(&r);
  for (auto &[k, v] : by_kind) {
    std::sort(v.begin(), v.end(), [](auto *a, auto *b) { return a->rho < b->rho; });
    std::optional<double> from;
    for (auto it = v.rbegin(); it != v.rend() && !(*it)->in_ci_nav; ++it)
      from = (*it)->rho;
    if (from && v.size() > 1)
      s.divergence_density[k] = *from;
  }
  return s;
}

inline std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string render_report(const PlanResult &res) {
  std::ostringstream os;
  const auto &p = res.plan;
  os << "forage experiment report\n";
  os << "intervals: two-sided 95% Student-t across replicates of post-burn-in time averages\n\n";
  std::map<Regime, std::vector<ComparisonRow>> by_regime;
  for (const auto &r : res.rows)
    by_regime[r.regime].push_back(r);
  for (const auto &[regime, rows] : by_regime) {
    const auto s = summarize(rows);
    os << "[" << to_string(regime) << "]\n";
    os << "rows = " << s.rows << "\n";
    os << "failed_rows = " << s.failed << "\n";
    os << "within_ci_nh = " << fixed(s.within_ci_nh) << "\n";
    os << "within_ci_nav = " << fixed(s.within_ci_nav) << "\n";
    os << "within_ci_all = " << fixed(s.within_ci) << "\n";
    os << "worst_relative_error_nh = " << fixed(s.worst_rel_nh) << "\n";
    os << "worst_relative_error_nav = " << fixed(s.worst_rel_nav) << "\n";
    os << "worst_relative_error_p = " << fixed(s.worst_rel_p) << "\n";
    if (is_var_rho(regime)) {
      for (auto k : p.kinds) {
        const auto it = s.divergence_density.find(k);
        os << "divergence_density." << to_string(k) << " = "
           << (it == s.divergence_density.end() ? std::string("none") : format_g12(it->second)) << "\n";
      }
    }
    for (const auto &r : rows)
      if (r.failure)
        os << "failed." << to_string(r.kind) << ".N" << r.n << ".rho" << format_g12(r.rho) << " = " << *r.failure << "\n";
      else if (r.non_stationary)
        os << "non_stationary." << to_string(r.kind) << ".N" << r.n << ".rho" << format_g12(r.rho) << " = 1\n";
    os << "\n";
  }
  const Calibration *rn = nullptr;
  for (const auto &[k, c] : res.calibrations)
    if (c.kind == Kind::RN)
      rn = &c;
  os << "[fits]\n";
  for (const auto &[key, c] : res.calibrations) {
    os << key << ".sigma_m = " << format_g12(c.fit.sigma_m) << "\n";
    os << key << ".chi_m = " << format_g12(c.fit.chi_m) << "\n";
    if (rn && rn->rho == c.rho)
      os << key << ".chi_relative_rn = " << format_g12(c.fit.relative_chi(rn->fit)) << "\n";
    os << key << ".residual = " << format_g12(c.fit.residual) << "\n";
    if (c.legacy) {
      os << key << ".legacy_residual = " << format_g12(c.legacy->residual) << "\n";
      if (c.legacy->warning)
        os << key << ".legacy_warning = " << *c.legacy->warning << "\n";
    }
  }
  os << "\nruntime_seconds = " << fixed(res.runtime_seconds, 1) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// SVG plots: categorical x-axis, simulated mean with interval bars, predictions
// ---------------------------------------------------------------------------

enum class Quantity { NH, NAV, P };

inline std::string_view to_string(Quantity q) {
  switch (q) {
  case Quantity::NH:
    return "N_h";
  case Quantity::NAV:
    return "N_av";
  case Quantity::P:
    return "P";
  }
  return "?";
}

inline std::string render_svg(const std::vector<ComparisonRow> &rows, Quantity q, const std::string &title) {
  struct Pt {
    std::string label;
    double mean, lo, hi, pred;
  };
  std::vector<Pt> pts;
  for (const auto &r : rows) {
    if (r.failure)
      continue;
    const Interval &iv = q == Quantity::NH ? r.sim_nh : q == Quantity::NAV ? r.sim_nav : r.sim_p;
    const double pred = q == Quantity::NH ? r.pred_nh : q == Quantity::NAV ? r.pred_nav : r.pred_p;
    std::string label = std::string(to_string(r.kind)) + " " + std::to_string(r.n);
    if (is_var_rho(r.regime))
      label += " @" + format_g12(r.rho);
    pts.push_back({label, iv.mean, iv.lo, iv.hi, pred});
  }
  const double W = 720, H = 420, ml = 70, mr = 20, mt = 40, mb = 90;
  double ymax = 0.0;
  for (const auto &p : pts)
    ymax = std::max({ymax, p.hi, p.pred, p.mean});
  ymax = ymax > 0.0 ? ymax * 1.1 : 1.0;
  auto X = [&](std::size_t i) { return ml + (i + 0.5) * (W - ml - mr) / std::max<std::size_t>(pts.size(), 1); };
  auto Y = [&](double v) { return mt + (H - mt - mb) * (1.0 - v / ymax); };

  std::ostringstream os;
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml, H - mb, W - mr, H - mb);
  os << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml, mt, ml, H - mb);
  os << buf;
  for (int k = 0; k <= 4; ++k) {
    const double v = ymax * k / 4.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\">%.3g</text>\n", ml - 6, Y(v) + 4, v);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"16\" y=\"%g\" transform=\"rotate(-90 16 %g)\" text-anchor=\"middle\">%s</text>\n",
                (mt + H - mb) / 2, (mt + H - mb) / 2, std::string(to_string(q)).c_str());
  os << buf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto &p = pts[i];
    const double x = X(i);
    std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n", x, Y(p.lo), x, Y(p.hi));
    os << buf;
    for (double v : {p.lo, p.hi}) {
      std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#1f77b4\"/>\n", x - 5, Y(v), x + 5, Y(v));
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3.5\" fill=\"#1f77b4\"/>\n", x, Y(p.mean));
    os << buf;
    std::snprintf(buf, sizeof buf, "<path d=\"M %.2f %.2f l 5 -5 l 5 5 l -5 5 z\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n", x - 5, Y(p.pred));
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%g\" text-anchor=\"end\" transform=\"rotate(-45 %.2f %g)\">%s</text>\n", x, H - mb + 14, x, H - mb + 14, p.label.c_str());
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "<circle cx=\"%g\" cy=\"%g\" r=\"3.5\" fill=\"#1f77b4\"/><text x=\"%g\" y=\"%g\">simulated mean, 95%% CI</text>\n", W - 250, mt + 5, W - 240, mt + 9);
  os << buf;
  std::snprintf(buf, sizeof buf, "<path d=\"M %g %g l 5 -5 l 5 5 l -5 5 z\" fill=\"none\" stroke=\"#d62728\"/><text x=\"%g\" y=\"%g\">model prediction</text>\n", W - 255, mt + 22, W - 240, mt + 26);
  os << buf;
  os << "</svg>\n";
  return os.str();
}

inline void write_plots(const std::vector<ComparisonRow> &rows, const std::filesystem::path &dir);

/// Writes rows.csv, report.txt, calibration.txt, plan.json and one SVG per
/// (regime, quantity) into `dir`.
inline void write_outputs(const PlanResult &res, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "rows.csv");
    write_rows_csv(f, res.rows);
  }
  {
    std::ofstream f(dir / "report.txt");
    f << render_report(res);
  }
  {
    std::ofstream f(dir / "calibration.txt");
    write_calibrations(f, res.calibrations);
  }
  {
    std::ofstream f(dir / "plan.json");
    f << to_json(res.plan).dump(2) << '\n';
  }
  write_plots(res.rows, dir);
}

inline void write_plots(const std::vector<ComparisonRow> &rows, const std::filesystem::path &dir) {
  std::map<Regime, std::vector<ComparisonRow>> by_regime;
  for (const auto &r : rows)
    by_regime[r.regime].push_back(r);
  for (const auto &[regime, rr] : by_regime)
    for (auto q : {Quantity::NH, Quantity::NAV, Quantity::P}) {
      const std::string name = std::string(to_string(regime)) + "-" + (q == Quantity::NH ? "nh" : q == Quantity::NAV ? "nav" : "p") + ".svg";
      std::ofstream f(dir / name);
      f << render_svg(rr, q, std::string(to_string(regime)) + ": " + std::string(to_string(q)));
    }
}

} // namespace forage

#endif // FORAGE_HARNESS_HPP
