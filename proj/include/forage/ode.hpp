#ifndef FORAGE_ODE_HPP
#define FORAGE_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "forage/analytic.hpp"
#include "forage/core.hpp"
#include "forage/scenario.hpp"

namespace forage {

/// Mean population counts: robots per FSM state and blocks per cluster.
struct OdeState {
  double n_s = 0.0;
  double n_h = 0.0;
  double n_av_s = 0.0;
  double n_av_h = 0.0;
  std::vector<double> b;

  double robots() const { return n_s + n_h + n_av_s + n_av_h; }
  double n_av() const { return n_av_s + n_av_h; }
  double blocks() const {
    double t = 0.0;
    for (double v : b)
      t += v;
    return t;
  }
  std::size_t size() const { return 4 + b.size(); }
  double &operator[](std::size_t i) { return i == 0 ? n_s : i == 1 ? n_h : i == 2 ? n_av_s : i == 3 ? n_av_h : b[i - 4]; }
  double operator[](std::size_t i) const { return const_cast<OdeState &>(*this)[i]; }

  static std::string component_name(std::size_t i) {
    static const char *names[] = {"n_s", "n_h", "n_av_s", "n_av_h"};
    return i < 4 ? names[i] : "b[" + std::to_string(i - 4) + "]";
  }
};

/// out = a + h * d, component-wise.
inline void axpy(OdeState &out, const OdeState &a, double h, const OdeState &d) {
  out.b.resize(a.b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = a[i] + h * d[i];
}

/// All robots searching, clusters at their configured block counts.
inline OdeState initial_state(const Scenario &s) {
  OdeState x;
  x.n_s = s.robot_count;
  for (const auto &c : s.clusters)
    x.b.push_back(c.block_count);
  return x;
}

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

/// Generalised model. The robot-encounter flow alpha_r leaves the searching
/// and homing pools in proportion to their occupancy and enters the matching
/// avoidance pool, so the four robot derivatives sum to zero. Collected blocks
/// are redistributed over clusters in proportion to their area.
inline void generalized_rhs(const OdeState &x, const ModelParams &p, const Scenario &s, OdeState &d) {
  const double active = x.n_s + x.n_h;
  const double w_s = active > 0.0 ? x.n_s / active : 0.5;
  const double w_h = 1.0 - w_s;
  const double deliver = x.n_h / p.tau_h;
  d.n_s = -p.alpha_b - p.alpha_r * w_s + deliver + x.n_av_s / p.tau_av;
  d.n_h = p.alpha_b - p.alpha_r * w_h - deliver + x.n_av_h / p.tau_av;
  d.n_av_s = p.alpha_r * w_s - x.n_av_s / p.tau_av;
  d.n_av_h = p.alpha_r * w_h - x.n_av_h / p.tau_av;
  d.b.resize(x.b.size());
  double ad = 0.0;
  for (const auto &c : s.clusters)
    ad += c.area();
  for (std::size_t j = 0; j < x.b.size(); ++j)
    d.b[j] = (deliver - p.alpha_b) * s.clusters[j].area() / ad;
}

inline OdeState generalized_rhs(const OdeState &x, const ModelParams &p, const Scenario &s) {
  OdeState d;
  generalized_rhs(x, p, s, d);
  return d;
}

/// Free parameters of the baseline model with a finite block pool.
struct LegacyParams {
  double alpha_r = 0.0;       // searching-robot pairwise encounter rate
  double alpha_r_prime = 0.0; // homing-robot pairwise encounter rate
  double alpha_b = 0.0;       // per-robot, per-block encounter rate
  double tau_h = 1.0;
  double tau_av = 1.0;
};

/// Baseline model with a single depleting block pool (x.b[0]). Encounter
/// outflows of each pool feed the avoidance pool of the same context.
inline void legacy_rhs(const OdeState &x, const LegacyParams &p, const Scenario &s, OdeState &d) {
  const double n = s.robot_count;
  const double pool = x.b.empty() ? 0.0 : x.b[0];
  const double free_blocks = pool - x.n_h - x.n_av_h;
  const double pickup = p.alpha_b * x.n_s * free_blocks;
  const double enc_s = p.alpha_r * x.n_s * (x.n_s + n);
  const double enc_h = p.alpha_r_prime * x.n_h * (x.n_h + n);
  d.n_s = -pickup - enc_s + x.n_h / p.tau_h + x.n_av_s / p.tau_av;
  d.n_h = pickup - enc_h - x.n_h / p.tau_h + x.n_av_h / p.tau_av;
  d.n_av_s = enc_s - x.n_av_s / p.tau_av;
  d.n_av_h = enc_h - x.n_av_h / p.tau_av;
  d.b.assign(x.b.size(), 0.0);
  if (!d.b.empty())
    d.b[0] = -x.n_h / p.tau_h;
}

inline OdeState legacy_rhs(const OdeState &x, const LegacyParams &p, const Scenario &s) {
  OdeState d;
  legacy_rhs(x, p, s, d);
  return d;
}

// ---------------------------------------------------------------------------
// Fixed-step RK4
// ---------------------------------------------------------------------------

struct IntegrateOptions {
  double dt = 0.1;
  double horizon = 1000.0;
  int stride = 10;             // keep every stride-th step in the trajectory (0 = none)
  double steady_tolerance = 1e-9; // times N
  int steady_window = 100;
  bool stop_at_steady = true;
};

struct Sample {
  double t = 0.0;
  OdeState state;
};

struct SolveReport {
  std::vector<Sample> trajectory;
  OdeState steady_state;
  double steady_time = 0.0;
  bool converged = false;
  double performance = 0.0; // blocks/s
};

namespace detail {

inline void check_state(OdeState &x, double robot_cap, double block_cap, double t) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    double &v = x[i];
    const double cap = i < 4 ? robot_cap : block_cap;
    if (!std::isfinite(v) || v > cap)
      throw InstabilityError("integration diverged in component " + OdeState::component_name(i) + " at t = " +
                             std::to_string(t));
    if (v < 0.0) {
      if (v > -1e-9)
        v = 0.0;
      else
        throw InstabilityError("component " + OdeState::component_name(i) + " went negative (" +
                               std::to_string(v) + ") at t = " + std::to_string(t));
    }
  }
}

} // namespace detail

/// Integrates dx/dt = rhs(x) from `initial` with classical RK4.
///
/// Steady state is declared once max |dx/dt| < steady_tolerance * N for
/// `steady_window` consecutive steps. Robot components above 10 N, block
/// components above 10 max(N, B(0)), non-finite values, or negatives below
/// -1e-9 raise InstabilityError; smaller negatives are clamped to zero.
template <class Rhs, class Observer>
SolveReport integrate(Rhs &&rhs, const OdeState &initial, const IntegrateOptions &opt, Observer &&observe) {
  if (!(opt.dt > 0.0))
    throw ValidationError("dt must be positive");
  if (opt.horizon < opt.dt)
    throw ValidationError("horizon must be at least one step");
  const double n = initial.robots();
  const double robot_cap = 10.0 * std::max(n, 1.0);
  const double block_cap = 10.0 * std::max({n, initial.blocks(), 1.0});
  const double tol = opt.steady_tolerance * std::max(n, 1.0);
  const long steps = static_cast<long>(std::llround(opt.horizon / opt.dt));

  SolveReport rep;
  OdeState x = initial, tmp = initial, k1 = initial, k2 = initial, k3 = initial, k4 = initial;
  auto eval = [&](const OdeState &in, OdeState &out) {
    if constexpr (std::is_invocable_v<Rhs &, const OdeState &, OdeState &>)
      rhs(in, out);
    else
      out = rhs(in);
  };
  if (opt.stride > 0)
    rep.trajectory.push_back({0.0, x});
  int quiet = 0;
  double t = 0.0;
  for (long k = 1; k <= steps; ++k) {
    eval(x, k1);
    double max_rate = 0.0;
    for (std::size_t i = 0; i < k1.size(); ++i)
      max_rate = std::max(max_rate, std::abs(k1[i]));
    if (max_rate < tol) {
      if (++quiet >= opt.steady_window && !rep.converged) {
        rep.converged = true;
        rep.steady_time = t;
        if (opt.stop_at_steady)
          break;
      }
    } else {
      quiet = 0;
    }
    axpy(tmp, x, 0.5 * opt.dt, k1);
    eval(tmp, k2);
    axpy(tmp, x, 0.5 * opt.dt, k2);
    eval(tmp, k3);
    axpy(tmp, x, opt.dt, k3);
    eval(tmp, k4);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += opt.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = k * opt.dt;
    detail::check_state(x, robot_cap, block_cap, t);
    observe(t, x);
    if (opt.stride > 0 && k % opt.stride == 0)
      rep.trajectory.push_back({t, x});
  }
  if (!rep.converged)
    rep.steady_time = t;
  rep.steady_state = x;
  if (opt.stride > 0 && (rep.trajectory.empty() || rep.trajectory.back().t != t))
    rep.trajectory.push_back({t, x});
  return rep;
}

template <class Rhs> SolveReport integrate(Rhs &&rhs, const OdeState &initial, const IntegrateOptions &opt) {
  return integrate(std::forward<Rhs>(rhs), initial, opt, [](double, const OdeState &) {});
}

// ---------------------------------------------------------------------------
// Predictions
// ---------------------------------------------------------------------------

/// P = alpha_b / mu_h.
inline double predict_performance(const ModelParams &p, double mu_h = 1.0) {
  if (!(mu_h > 0.0))
    throw ValidationError("mu_h must be positive");
  if (!std::isfinite(p.alpha_b))
    throw ValidationError("alpha_b must be finite");
  return p.alpha_b / mu_h;
}

struct SolveOptions {
  double dt = 0.0;      // 0: a tenth of the fastest time constant
  double horizon = 0.0; // 0: 400 x the slowest time constant
  int stride = 0;
  double mu_h = 1.0;
};

inline IntegrateOptions integrate_options_for(const ModelParams &p, const SolveOptions &o) {
  IntegrateOptions io;
  const double fast = std::min(p.tau_av, p.tau_h > 0.0 ? p.tau_h : p.tau_av);
  const double slow = std::max(p.tau_av, p.tau_h);
  io.dt = o.dt > 0.0 ? o.dt : std::min(1.0, 0.1 * fast);
  io.horizon = o.horizon > 0.0 ? o.horizon : std::max(400.0 * slow, 100.0 * io.dt);
  io.stride = o.stride;
  return io;
}

/// Integrates the generalised model from the all-searching state to steady state.
inline SolveReport solve_generalized(const Scenario &s, const ModelParams &p, const SolveOptions &o = {}) {
  if (!(p.tau_h > 0.0) || !(p.tau_av > 0.0))
    throw ModelDomainError("tau_h and tau_av must be positive to integrate the model");
  auto rep = integrate([&](const OdeState &x, OdeState &d) { generalized_rhs(x, p, s, d); }, initial_state(s),
                       integrate_options_for(p, o));
  rep.performance = predict_performance(p, o.mu_h);
  return rep;
}

/// Integrates the baseline model; the block pool starts at total_blocks.
template <class Observer>
SolveReport solve_legacy(const Scenario &s, const LegacyParams &p, double dt, double horizon, int stride,
                         Observer &&observe) {
  OdeState x0;
  x0.n_s = s.robot_count;
  x0.b = {static_cast<double>(s.total_blocks)};
  IntegrateOptions io;
  io.dt = dt;
  io.horizon = horizon;
  io.stride = stride;
  io.stop_at_steady = false;
  return integrate([&](const OdeState &x, OdeState &d) { legacy_rhs(x, p, s, d); }, x0, io,
                   std::forward<Observer>(observe));
}

inline SolveReport solve_legacy(const Scenario &s, const LegacyParams &p, double dt, double horizon, int stride = 0) {
  return solve_legacy(s, p, dt, horizon, stride, [](double, const OdeState &) {});
}

/// Trajectory export: `t,n_s,n_h,n_av_s,n_av_h,b_total`.
inline void write_trajectory_csv(std::ostream &os, const std::vector<Sample> &traj) {
  os << "t,n_s,n_h,n_av_s,n_av_h,b_total\n";
  char buf[256];
  for (const auto &smp : traj) {
    const auto &x = smp.state;
    std::snprintf(buf, sizeof buf, "%.6f,%.12g,%.12g,%.12g,%.12g,%.12g\n", smp.t, x.n_s, x.n_h, x.n_av_s, x.n_av_h,
                  x.blocks());
    os << buf;
  }
}

} // namespace forage

#endif // FORAGE_ODE_HPP
