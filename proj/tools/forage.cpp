// forage: scenario generation, calibration, prediction, simulation and
// model-vs-simulation comparison from the command line.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "forage/analytic.hpp"
#include "forage/fit.hpp"
#include "forage/harness.hpp"
#include "forage/microsim.hpp"
#include "forage/ode.hpp"
#include "forage/scenario.hpp"
#include "forage/stats.hpp"

namespace fs = std::filesystem;
using namespace forage;

namespace {

struct Common {
  std::string plan_file;
  std::string regime = "const-rho-small";
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<int> replicates;
  std::optional<double> horizon;
  std::string fit_from;
  std::string dtheta_sign = "plus";
};

void add_common(CLI::App *sub, Common &c, bool plan) {
  if (plan) {
    sub->add_option("--plan", c.plan_file, "experiment plan (JSON)");
    sub->add_option("--regime", c.regime, "built-in plan when --plan is absent")
        ->check(CLI::IsMember({"const-rho-large", "const-rho-small", "var-rho-large", "var-rho-small"}));
    sub->add_option("--fit-from", c.fit_from, "directory holding calibration.txt from a prior run");
  }
  sub->add_option("--seed", c.seed, "64-bit base seed");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--replicates", c.replicates, "simulation replicates");
  sub->add_option("--horizon", c.horizon, "simulated seconds per replicate");
  sub->add_option("--dtheta-sign", c.dtheta_sign, "sign in the angular diffusion factor")
      ->check(CLI::IsMember({"plus", "minus"}));
}

ExperimentPlan load_plan(const Common &c) {
  ExperimentPlan p;
  if (!c.plan_file.empty()) {
    std::ifstream f(c.plan_file);
    if (!f)
      throw ValidationError("cannot open plan " + c.plan_file);
    p = plan_from_json(nlohmann::json::parse(f));
  } else {
    p = default_plan(parse_regime(c.regime));
  }
  if (c.seed)
    p.seed = *c.seed;
  if (c.replicates)
    p.replicates = p.calibration_replicates = *c.replicates;
  if (c.horizon)
    p.horizon = p.calibration_horizon = *c.horizon;
  p.dtheta_sign = c.dtheta_sign == "minus" ? -1 : +1;
  validate(p);
  return p;
}

std::map<std::string, Calibration> load_calibrations(const std::string &dir) {
  std::ifstream f(fs::path(dir) / "calibration.txt");
  if (!f)
    throw ValidationError("no calibration.txt in " + dir);
  return read_calibrations(f);
}

Scenario load_scenario(const std::string &file) {
  std::ifstream f(file);
  if (!f)
    throw ValidationError("cannot open scenario " + file);
  return scenario_from_json(nlohmann::json::parse(f));
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Swarm foraging model and simulator"};
  app.require_subcommand(1);

  // generate
  auto *gen = app.add_subcommand("generate", "write a scenario file");
  std::string g_kind = "SS";
  double g_w = 0, g_h = 0, g_rho = 0;
  int g_n = 10, g_b = 20;
  std::uint64_t g_seed = 1;
  std::string g_out = "scenario.json";
  gen->add_option("--kind", g_kind)->check(CLI::IsMember({"SS", "DS", "RN", "PL"}));
  gen->add_option("--width", g_w, "arena width (m)");
  gen->add_option("--height", g_h, "arena height (m)");
  gen->add_option("--rho", g_rho, "swarm density; sizes the arena when width/height are absent");
  gen->add_option("--robots", g_n);
  gen->add_option("--blocks", g_b);
  gen->add_option("--seed", g_seed);
  gen->add_option("--out", g_out, "output file");

  // calibrate / compare / sweep / report
  Common cal_c, cmp_c, swp_c, rep_c;
  bool legacy = false;
  auto *cal = app.add_subcommand("calibrate", "fit the characterizations for a plan");
  add_common(cal, cal_c, true);
  cal->add_flag("--legacy", legacy, "also fit the five-parameter baseline model");
  auto *cmp = app.add_subcommand("compare", "calibrate (or load fits), predict, simulate and compare one plan");
  add_common(cmp, cmp_c, true);
  auto *swp = app.add_subcommand("sweep", "run the built-in plans for several regimes");
  add_common(swp, swp_c, false);
  std::vector<std::string> swp_regimes{"const-rho-small", "var-rho-small"};
  swp->add_option("--regimes", swp_regimes, "regimes to run")
      ->check(CLI::IsMember({"const-rho-large", "const-rho-small", "var-rho-large", "var-rho-small"}));
  auto *rep = app.add_subcommand("report", "regenerate report and plots from an output directory");
  rep->add_option("--out", rep_c.out, "directory holding rows.csv and plan.json")->required();

  // predict
  auto *pre = app.add_subcommand("predict", "solve the model for one scenario");
  Common pre_c;
  std::string p_scenario;
  double p_sigma = 1.0, p_chi = 1.0, p_single_horizon = 200000.0;
  pre->add_option("--scenario", p_scenario)->required();
  pre->add_option("--sigma", p_sigma, "diffusion characterization (ignored with --fit-from)");
  pre->add_option("--chi", p_chi, "avoidance characterization (ignored with --fit-from)");
  pre->add_option("--fit-from", pre_c.fit_from, "directory holding calibration.txt");
  pre->add_option("--single-horizon", p_single_horizon, "single-robot measurement horizon (s)");
  pre->add_option("--seed", pre_c.seed);
  pre->add_option("--out", pre_c.out);
  pre->add_option("--dtheta-sign", pre_c.dtheta_sign)->check(CLI::IsMember({"plus", "minus"}));

  // simulate
  auto *sim = app.add_subcommand("simulate", "run simulator replicates for one scenario");
  Common sim_c;
  std::string s_scenario;
  sim->add_option("--scenario", s_scenario)->required();
  add_common(sim, sim_c, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Kind k = parse_kind(g_kind);
      if (g_w <= 0 || g_h <= 0) {
        if (g_rho <= 0)
          throw ValidationError("give --width/--height or --rho");
        std::tie(g_w, g_h) = arena_dims_for_area(k, g_n / g_rho);
      }
      const auto s = make_scenario(k, g_w, g_h, g_n, g_b, g_seed);
      std::ofstream f(g_out);
      f << to_json(s).dump(2) << '\n';
      std::cout << "wrote " << g_out << " (hash " << scenario_hash(s) << ")\n";
    } else if (*cal) {
      auto p = load_plan(cal_c);
      p.legacy_baseline = legacy;
      const auto cals = calibrate_plan(p);
      fs::create_directories(cal_c.out);
      std::ofstream f(fs::path(cal_c.out) / "calibration.txt");
      write_calibrations(f, cals);
      std::ofstream pf(fs::path(cal_c.out) / "plan.json");
      pf << to_json(p).dump(2) << '\n';
      write_calibrations(std::cout, cals);
    } else if (*cmp) {
      const auto p = load_plan(cmp_c);
      std::optional<std::map<std::string, Calibration>> cals;
      if (!cmp_c.fit_from.empty())
        cals = load_calibrations(cmp_c.fit_from);
      const auto res = run_plan(p, cals);
      write_outputs(res, cmp_c.out);
      std::cout << render_report(res);
    } else if (*swp) {
      for (const auto &r : swp_regimes) {
        Common c = swp_c;
        c.regime = r;
        const auto res = run_plan(load_plan(c));
        write_outputs(res, fs::path(swp_c.out) / r);
        std::cout << render_report(res) << '\n';
      }
    } else if (*rep) {
      const fs::path dir = rep_c.out;
      std::ifstream pf(dir / "plan.json");
      if (!pf)
        throw ValidationError("no plan.json in " + dir.string());
      PlanResult res;
      res.plan = plan_from_json(nlohmann::json::parse(pf));
      std::ifstream rf(dir / "rows.csv");
      if (!rf)
        throw ValidationError("no rows.csv in " + dir.string());
      res.rows = read_rows_csv(rf, res.plan.regime);
      if (std::ifstream cf(dir / "calibration.txt"); cf)
        res.calibrations = read_calibrations(cf);
      std::ofstream(dir / "report.txt") << render_report(res);
      write_plots(res.rows, dir);
      std::cout << render_report(res);
    } else if (*pre) {
      const auto s = load_scenario(p_scenario);
      FitResult fit;
      fit.sigma_m = p_sigma;
      fit.chi_m = p_chi;
      fit.scenario_kind = s.kind;
      if (!pre_c.fit_from.empty()) {
        const auto cals = load_calibrations(pre_c.fit_from);
        const Calibration *best = nullptr;
        for (const auto &[key, c] : cals)
          if (c.kind == s.kind &&
              (!best || std::abs(c.rho - swarm_density(s)) < std::abs(best->rho - swarm_density(s))))
            best = &c;
        if (!best)
          throw ValidationError("no calibration for kind " + std::string(to_string(s.kind)));
        fit = best->fit;
      }
      const auto single = measure_single_robot(s, p_single_horizon, pre_c.seed.value_or(s.seed));
      DeriveOptions d;
      d.dtheta_sign = pre_c.dtheta_sign == "minus" ? -1 : +1;
      const auto params = derive_params(s, calibration_inputs(single, fit.sigma_m, fit.chi_m), d);
      SolveOptions so;
      so.stride = 10;
      const auto sol = solve_generalized(s, params, so);
      fs::create_directories(pre_c.out);
      std::ofstream(fs::path(pre_c.out) / "trajectory.csv") << [&] {
        std::ostringstream os;
        write_trajectory_csv(os, sol.trajectory);
        return os.str();
      }();
      auto kv = to_key_values(params);
      kv.emplace_back("steady_n_h", format_g12(sol.steady_state.n_h));
      kv.emplace_back("steady_n_av", format_g12(sol.steady_state.n_av()));
      kv.emplace_back("performance", format_g12(sol.performance));
      kv.emplace_back("converged", sol.converged ? "1" : "0");
      std::cout << render_key_values(kv);
    } else if (*sim) {
      const auto s = load_scenario(s_scenario);
      const double horizon = sim_c.horizon.value_or(20000.0);
      const int reps = sim_c.replicates.value_or(8);
      const std::uint64_t seed = sim_c.seed.value_or(s.seed);
      const auto series = run(s, horizon, reps, seed);
      fs::create_directories(sim_c.out);
      for (const auto &ts : series) {
        std::ofstream f(fs::path(sim_c.out) / ("replicate_" + std::to_string(ts.replicate_id) + ".csv"));
        write_timeseries_csv(f, ts);
      }
      std::ofstream mf(fs::path(sim_c.out) / "manifest.txt");
      write_run_manifest(mf, s, SimConfig{}, horizon, seed, series);
      const auto st = steady_stats(series, SimConfig{}.burn_in_fraction * horizon);
      std::cout << "replay_seed = " << seed << '\n';
      std::cout << "n_h = " << st.n_h.mean << " [" << st.n_h.lo << ", " << st.n_h.hi << "]\n";
      std::cout << "n_av = " << st.n_av.mean << " [" << st.n_av.lo << ", " << st.n_av.hi << "]\n";
      std::cout << "collection_rate = " << st.collection_rate.mean << '\n';
      if (st.non_stationary)
        std::cout << "warning: post-burn-in drift exceeds threshold\n";
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
