#ifndef FORAGE_ANALYTIC_HPP
#define FORAGE_ANALYTIC_HPP

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "forage/core.hpp"
#include "forage/quadrature.hpp"
#include "forage/scenario.hpp"

namespace forage {

// ---------------------------------------------------------------------------
// Block acquisition density
// ---------------------------------------------------------------------------

/// Spatial density of block acquisition locations for a swarm whose
/// searching robots random-walk outward from the nest:
///
///   p(x) = C / (sqrt(|x - x_n|) - ln(rho_j) / (2 rho_j))^2,   x in cluster j
///
/// and zero outside the distributable area. rho_j is the expected steady
/// block density B_j(0) / A_j. The normalising constant C is computed once by
/// quadrature at construction.
class AcquisitionDensity {
public:
  explicit AcquisitionDensity(const Scenario &s, const quadrature::AdaptiveOptions &q = {})
      : nest_(s.arena.nest_center) {
    for (std::size_t j = 0; j < s.clusters.size(); ++j) {
      const auto &c = s.clusters[j];
      const double rho = c.density();
      if (!(rho > 0.0))
        throw ModelDomainError("cluster " + std::to_string(j) + " has zero block density");
      rects_.push_back(c.rect());
      offsets_.push_back(-std::log(rho) / (2.0 * rho));
    }
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < rects_.size(); ++j) {
      auto f = [&](Vec2 p) {
        const double g = unnormalised(j, p);
        return std::array<double, 3>{g, g * p.x, g * p.y};
      };
      // first moments may cross zero; measure their change against the scale of x * g
      const Rect &r = rects_[j];
      const double xs = std::max(std::abs(r.lo.x), std::abs(r.hi.x));
      const double ys = std::max(std::abs(r.lo.y), std::abs(r.hi.y));
      auto cell = quadrature::integrate_panels<3>(f, r, 1);
      const auto m = quadrature::integrate_adaptive<3>(f, r, q, {0.0, xs * std::abs(cell[0]), ys * std::abs(cell[0])});
      mass += m[0];
      mx += m[1];
      my += m[2];
      cluster_mass_.push_back(m[0]);
      cluster_mean_.push_back({m[1] / m[0], m[2] / m[0]});
    }
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw NumericError("acquisition density has no mass");
    norm_ = 1.0 / mass;
    mean_ = {mx / mass, my / mass};
    for (std::size_t j = 0; j < rects_.size(); ++j)
      distance_ += cluster_mass_[j] / mass * distance(cluster_mean_[j], nest_);
  }

  /// Density at x (1/m^2); zero outside every cluster.
  double operator()(Vec2 x) const {
    for (std::size_t j = 0; j < rects_.size(); ++j)
      if (rects_[j].contains(x))
        return norm_ * unnormalised(j, x);
    return 0.0;
  }

  double normaliser() const { return norm_; }
  /// Expected acquisition location (E[x_acq], E[y_acq]).
  Vec2 mean() const { return mean_; }
  /// Acquisition-weighted distance from each cluster's conditional mean to the nest.
  double mean_cluster_distance() const { return distance_; }
  Vec2 nest() const { return nest_; }
  const std::vector<Rect> &supports() const { return rects_; }

  /// Unnormalised density inside cluster j.
  double unnormalised(std::size_t j, Vec2 x) const {
    const double base = std::sqrt(distance(x, nest_)) + offsets_[j];
    if (!(base > 0.0))
      throw ModelDomainError("acquisition density denominator is not positive (dense cluster too close to the nest)");
    return 1.0 / (base * base);
  }

private:
  Vec2 nest_;
  std::vector<Rect> rects_;
  std::vector<double> offsets_;
  std::vector<double> cluster_mass_;
  std::vector<Vec2> cluster_mean_;
  double norm_ = 0.0;
  Vec2 mean_;
  double distance_ = 0.0;
};

inline double acq_pdf(const Scenario &s, Vec2 x) { return AcquisitionDensity(s)(x); }

inline Vec2 expected_acq_location(const Scenario &s) { return AcquisitionDensity(s).mean(); }

// ---------------------------------------------------------------------------
// Homing time
// ---------------------------------------------------------------------------

/// Mean distance from the centre of a uniformly random point in a rectangle
/// with the given sides.
inline double mean_distance_to_center(double side_x, double side_y) {
  const double p = 0.5 * side_x, q = 0.5 * side_y;
  if (p <= 0.0 || q <= 0.0)
    return 0.0;
  const double d = std::hypot(p, q);
  const double integral = (2.0 * p * q * d + p * p * p * std::log((q + d) / p) + q * q * q * std::log((p + d) / q)) / 6.0;
  return integral / (p * q);
}

/// Mean shortening of the homing path from dropping at a random point of a
/// square nest of side L instead of its centre: (L/6)(sqrt 2 + ln(1 + sqrt 2)).
inline double congestion_shortening(double nest_side) {
  if (nest_side <= 0.0)
    return 0.0;
  return nest_side / 6.0 * (std::numbers::sqrt2 + std::log(1.0 + std::numbers::sqrt2));
}

inline double homing_time_single(double distance_to_nest, double d_cr, double homing_speed) {
  if (!(homing_speed > 0.0))
    throw ValidationError("homing speed must be positive");
  return std::max(0.0, distance_to_nest - d_cr) / homing_speed;
}

inline double homing_time_single(const Scenario &s, Vec2 x_eacq) {
  return homing_time_single(distance(x_eacq, s.arena.nest_center), congestion_shortening(s.arena.nest_side),
                            s.homing_speed);
}

/// Interference-adjusted homing time tau_h = tau_h1 (1 + alpha_r tau_av / N).
inline double homing_time(double tau_h1, double alpha_r, double tau_av, int n) {
  if (n < 1)
    throw ValidationError("swarm size must be >= 1");
  return tau_h1 * (1.0 + alpha_r * tau_av / n);
}

// ---------------------------------------------------------------------------
// Diffusion and encounter rates
// ---------------------------------------------------------------------------

struct DiffusionQuantities {
  double d_xy = 0.0;    // m^2/s
  double d_theta = 0.0; // dimensionless
  double d_swarm = 0.0; // m^2/s, D(N)
  double sigma_m = 0.0;
};

/// Angular factor int (1 +/- cos 2t) f(t) dt for f uniform on [-theta, theta].
inline double angular_factor(double theta, int sign = +1) {
  if (!(theta > 0.0) || theta > std::numbers::pi)
    throw ValidationError("CRW half angle must lie in (0, pi]");
  return 1.0 + sign * std::sin(2.0 * theta) / (2.0 * theta);
}

inline DiffusionQuantities diffusion_quantities(const Scenario &s, double sigma_m, double t_ref, int sign = +1) {
  if (!(t_ref > 0.0))
    throw ValidationError("diffusion reference time must be positive");
  if (sign != 1 && sign != -1)
    throw ValidationError("diffusion sign must be +1 or -1");
  DiffusionQuantities dq;
  dq.sigma_m = sigma_m;
  dq.d_theta = angular_factor(s.crw_half_angle, sign);
  if (!(dq.d_theta > 0.0))
    throw ModelDomainError("angular diffusion factor is not positive for this sign and CRW angle");
  dq.d_xy = s.search_speed * s.search_speed / (4.0 * t_ref) * dq.d_theta;
  dq.d_swarm = s.robot_count * sigma_m * dq.d_xy / dq.d_theta;
  return dq;
}

/// Aggregate block-encounter rate: inverse RMS diffusion time over distance d.
inline double block_encounter_rate(double d, const DiffusionQuantities &dq) {
  if (!(d > 0.0))
    throw ModelDomainError("expected acquisition location coincides with the nest");
  if (!(dq.d_swarm > 0.0))
    throw ModelDomainError("swarm diffusion constant must be positive");
  return 2.0 * dq.d_swarm / (d * d);
}

inline double block_encounter_rate(Vec2 x_eacq, Vec2 x_nest, const DiffusionQuantities &dq) {
  return block_encounter_rate(distance(x_eacq, x_nest), dq);
}

inline double estimate_n_avoiding(double n_av1, const DiffusionQuantities &dq, double chi_m) {
  if (n_av1 < 0.0)
    throw ValidationError("single-robot avoidance occupancy must be >= 0");
  return n_av1 * dq.d_swarm / dq.d_theta * chi_m;
}

struct EncounterRate {
  double value = 0.0;
  bool clamped = false; // wall correction exceeded the total; value forced to 0
};

/// Little's-law robot encounter rate, minus the single-robot wall share.
inline EncounterRate robot_encounter_rate(double n_av_hat, double tau_av, double alpha_r1) {
  if (!(tau_av > 0.0))
    throw ValidationError("tau_av must be positive");
  const double r = n_av_hat / tau_av - alpha_r1 * n_av_hat;
  if (r < 0.0)
    return {0.0, true};
  return {r, false};
}

// ---------------------------------------------------------------------------
// Parameter derivation
// ---------------------------------------------------------------------------

/// Quantities measured or fitted outside the analytic derivation.
struct CalibrationInputs {
  double sigma_m = 1.0;
  double chi_m = 1.0;
  double tau_av = 2.0;   // s, measured avoidance duration
  double alpha_r1 = 0.0; // 1/s, single-robot interference rate
  double n_av1 = 0.0;    // single-robot avoidance occupancy
};

struct DeriveOptions {
  double t_ref = 0.2; // s, one control period
  int dtheta_sign = +1;
};

struct ModelParams {
  double tau_h1 = 0.0;
  double tau_h = 0.0;
  double tau_av = 0.0;
  double alpha_b = 0.0;
  double alpha_r = 0.0;
  double alpha_r1 = 0.0;
  double n_av1 = 0.0;
  double n_av_hat = 0.0;
  double chi_m = 0.0;
  double d_cr = 0.0;
  Vec2 x_eacq;
  double acq_distance = 0.0;
  DiffusionQuantities diffusion;
  bool alpha_r_clamped = false;
};

/// Geometry-only part of the derivation; independent of the fitted inputs,
/// so fits compute it once per scenario.
struct ScenarioGeometry {
  Vec2 x_eacq;
  double acq_distance = 0.0; // per-cluster acquisition distance, mass weighted
  double d_cr = 0.0;
  double tau_h1 = 0.0;
};

inline ScenarioGeometry derive_geometry(const Scenario &s) {
  const AcquisitionDensity acq(s);
  ScenarioGeometry g;
  g.x_eacq = acq.mean();
  g.acq_distance = acq.mean_cluster_distance();
  g.d_cr = congestion_shortening(s.arena.nest_side);
  g.tau_h1 = homing_time_single(g.acq_distance, g.d_cr, s.homing_speed);
  return g;
}

inline ModelParams derive_params(const Scenario &s, const ScenarioGeometry &g, const CalibrationInputs &in,
                                 const DeriveOptions &opt = {}) {
  for (double v : {in.sigma_m, in.chi_m, in.tau_av, in.alpha_r1, in.n_av1})
    if (!std::isfinite(v))
      throw ValidationError("calibration inputs must be finite");
  ModelParams p;
  p.x_eacq = g.x_eacq;
  p.acq_distance = g.acq_distance;
  p.d_cr = g.d_cr;
  p.tau_h1 = g.tau_h1;
  p.tau_av = in.tau_av;
  p.alpha_r1 = in.alpha_r1;
  p.n_av1 = in.n_av1;
  p.chi_m = in.chi_m;
  p.diffusion = diffusion_quantities(s, in.sigma_m, opt.t_ref, opt.dtheta_sign);
  p.alpha_b = block_encounter_rate(g.acq_distance, p.diffusion);
  p.n_av_hat = estimate_n_avoiding(in.n_av1, p.diffusion, in.chi_m);
  const auto ar = robot_encounter_rate(p.n_av_hat, in.tau_av, in.alpha_r1);
  p.alpha_r = ar.value;
  p.alpha_r_clamped = ar.clamped;
  p.tau_h = homing_time(g.tau_h1, p.alpha_r, in.tau_av, s.robot_count);
  return p;
}

inline ModelParams derive_params(const Scenario &s, const CalibrationInputs &in, const DeriveOptions &opt = {}) {
  return derive_params(s, derive_geometry(s), in, opt);
}

// ---------------------------------------------------------------------------
// Key-value rendering (12 significant digits)
// ---------------------------------------------------------------------------

inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::vector<std::pair<std::string, std::string>> to_key_values(const ModelParams &p) {
  auto f = format_g12;
  return {{"tau_h1", f(p.tau_h1)},
          {"tau_h", f(p.tau_h)},
          {"tau_av", f(p.tau_av)},
          {"alpha_b", f(p.alpha_b)},
          {"alpha_r", f(p.alpha_r)},
          {"alpha_r1", f(p.alpha_r1)},
          {"n_av1", f(p.n_av1)},
          {"n_av_hat", f(p.n_av_hat)},
          {"chi_m", f(p.chi_m)},
          {"sigma_m", f(p.diffusion.sigma_m)},
          {"d_cr", f(p.d_cr)},
          {"x_eacq", f(p.x_eacq.x)},
          {"y_eacq", f(p.x_eacq.y)},
          {"acq_distance", f(p.acq_distance)},
          {"d_xy", f(p.diffusion.d_xy)},
          {"d_theta", f(p.diffusion.d_theta)},
          {"d_swarm", f(p.diffusion.d_swarm)},
          {"alpha_r_clamped", p.alpha_r_clamped ? "1" : "0"}};
}

inline std::string render_key_values(const std::vector<std::pair<std::string, std::string>> &kv) {
  std::ostringstream os;
  for (const auto &[k, v] : kv)
    os << k << " = " << v << '\n';
  return os.str();
}

/// Parses `key = value` lines; blank lines and '#' comments are skipped.
inline std::map<std::string, std::string> parse_key_values(const std::string &text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#')
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("expected 'key = value', got '" + line + "'");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline ModelParams model_params_from_key_values(const std::map<std::string, std::string> &kv) {
  auto get = [&](const char *k) {
    const auto it = kv.find(k);
    if (it == kv.end())
      throw ValidationError(std::string("missing key '") + k + "'");
    return std::stod(it->second);
  };
  ModelParams p;
  p.tau_h1 = get("tau_h1");
  p.tau_h = get("tau_h");
  p.tau_av = get("tau_av");
  p.alpha_b = get("alpha_b");
  p.alpha_r = get("alpha_r");
  p.alpha_r1 = get("alpha_r1");
  p.n_av1 = get("n_av1");
  p.n_av_hat = get("n_av_hat");
  p.chi_m = get("chi_m");
  p.diffusion.sigma_m = get("sigma_m");
  p.d_cr = get("d_cr");
  p.x_eacq = {get("x_eacq"), get("y_eacq")};
  p.diffusion.d_xy = get("d_xy");
  p.diffusion.d_theta = get("d_theta");
  p.diffusion.d_swarm = get("d_swarm");
  p.alpha_r_clamped = get("alpha_r_clamped") != 0.0;
  return p;
}

} // namespace forage

#endif // FORAGE_ANALYTIC_HPP
