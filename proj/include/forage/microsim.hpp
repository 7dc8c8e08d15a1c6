#ifndef FORAGE_MICROSIM_HPP
#define FORAGE_MICROSIM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "forage/core.hpp"
#include "forage/scenario.hpp"

namespace forage {

enum class RobotState : std::uint8_t { Searching, Homing, AvoidingWhileSearching, AvoidingWhileHoming };

inline std::string_view to_string(RobotState s) {
  switch (s) {
  case RobotState::Searching:
    return "Searching";
  case RobotState::Homing:
    return "Homing";
  case RobotState::AvoidingWhileSearching:
    return "AvoidingWhileSearching";
  case RobotState::AvoidingWhileHoming:
    return "AvoidingWhileHoming";
  }
  return "?";
}

inline bool is_avoiding(RobotState s) {
  return s == RobotState::AvoidingWhileSearching || s == RobotState::AvoidingWhileHoming;
}

/// Edges of the single-robot state diagram (self-loops included).
inline bool is_legal_transition(RobotState from, RobotState to) {
  using S = RobotState;
  if (from == to)
    return true;
  switch (from) {
  case S::Searching:
    return to == S::Homing || to == S::AvoidingWhileSearching;
  case S::Homing:
    return to == S::Searching || to == S::AvoidingWhileHoming;
  case S::AvoidingWhileSearching:
    return to == S::Searching;
  case S::AvoidingWhileHoming:
    return to == S::Homing;
  }
  return false;
}

struct Robot {
  Vec2 position;
  double heading = 0.0;
  RobotState state = RobotState::Searching;
  std::optional<int> carried_block;
  double avoidance_timer = 0.0;
  std::optional<Vec2> nest_target;
  double homing_started = 0.0;
};

struct Block {
  Vec2 position;
  int cluster = 0;
  bool on_floor = true;
};

/// How far along the entry-to-centre segment a homing robot drops its block.
enum class DropRule {
  UniformFraction, // u ~ U(0, 1)
  UniformArea,     // drop points uniform over the nest area: 1 - u = sqrt(U)
};

struct SimConfig {
  double dt = 0.2;
  double robot_radius = 0.15;
  double sensing_radius = 0.3;
  double avoid_duration = 2.0;
  double block_footprint = 0.2;
  double avoid_turn_min = 0.5 * std::numbers::pi; // turn relative to the threat bearing
  double avoid_turn_max = std::numbers::pi;
  int sample_stride = 50;
  double burn_in_fraction = 0.2;
  DropRule drop_rule = DropRule::UniformArea;
  bool nest_free_zone = true; // robots inside the nest do not sense each other
};

/// Cumulative event tallies of one world.
struct Tallies {
  long collected = 0;
  long episodes_started = 0;
  long episodes_completed = 0;
  double avoid_time_completed = 0.0; // s, over completed episodes
  double avoid_occupancy = 0.0;      // robot-seconds spent avoiding
  long homings_completed = 0;
  double homing_time_completed = 0.0; // s, pickup to drop
};

// ---------------------------------------------------------------------------
// Nest geometry helpers
// ---------------------------------------------------------------------------

/// Point where the segment from `from` to the nest centre crosses the nest
/// boundary; `from` itself when it is already inside the nest.
inline Vec2 nest_entry_point(const Rect &nest, Vec2 from) {
  if (nest.contains(from))
    return from;
  const Vec2 c = nest.center();
  const Vec2 d = c - from;
  double t_enter = 0.0;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {from.x - nest.lo.x, nest.hi.x - from.x, from.y - nest.lo.y, nest.hi.y - from.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] < 0.0)
      t_enter = std::max(t_enter, q[i] / p[i]);
  }
  return from + t_enter * d;
}

/// entry + u (centre - entry).
inline Vec2 nest_target_choice(Vec2 entry, Vec2 center, double u) { return entry + u * (center - entry); }

inline Vec2 nest_target_choice(Vec2 entry, Vec2 center, Rng &rng, DropRule rule = DropRule::UniformArea) {
  const double v = rng.uniform();
  const double u = rule == DropRule::UniformFraction ? v : 1.0 - std::sqrt(v);
  return nest_target_choice(entry, center, u);
}

// ---------------------------------------------------------------------------
// World
// ---------------------------------------------------------------------------

/// Agent-based foraging world: correlated random walk search, phototactic
/// homing, timed reactive avoidance of robots and walls, and immediate
/// redistribution of delivered blocks.
class SimWorld {
public:
  SimWorld(Scenario s, std::uint64_t seed, SimConfig cfg = {})
      : scenario_(std::move(s)), cfg_(cfg), rng_seed_(seed), rng_(seed) {
    validate(scenario_);
    nest_ = scenario_.arena.nest();
    if (!(cfg_.dt > 0.0))
      throw ValidationError("dt must be positive");
    if (scenario_.search_speed * cfg_.dt > cfg_.block_footprint)
      throw ValidationError("search step exceeds the block footprint; blocks could be skipped");
    if (!(cfg_.sensing_radius > 0.0) || !(cfg_.avoid_duration > 0.0))
      throw ValidationError("sensing radius and avoidance duration must be positive");

    double acc = 0.0;
    for (const auto &c : scenario_.clusters) {
      acc += c.area();
      cluster_cdf_.push_back(acc);
    }
    for (auto &v : cluster_cdf_)
      v /= acc;

    block_cell_ = std::max(1.0, cfg_.block_footprint);
    block_nx_ = std::max(1, static_cast<int>(std::ceil(scenario_.arena.width / block_cell_)));
    block_ny_ = std::max(1, static_cast<int>(std::ceil(scenario_.arena.height / block_cell_)));
    block_cells_.assign(static_cast<std::size_t>(block_nx_) * block_ny_, {});
    for (int b = 0; b < scenario_.total_blocks; ++b) {
      blocks_.push_back({});
      place_block(b);
    }

    const Rect nest = scenario_.arena.nest();
    const double r = cfg_.robot_radius;
    for (int i = 0; i < scenario_.robot_count; ++i) {
      Robot rb;
      rb.position = {rng_.uniform(std::max(nest.lo.x, r), std::min(nest.hi.x, scenario_.arena.width - r)),
                     rng_.uniform(std::max(nest.lo.y, r), std::min(nest.hi.y, scenario_.arena.height - r))};
      rb.heading = rng_.uniform(-std::numbers::pi, std::numbers::pi);
      robots_.push_back(rb);
    }
    robot_nx_ = std::max(1, static_cast<int>(std::ceil(scenario_.arena.width / cfg_.sensing_radius)));
    robot_ny_ = std::max(1, static_cast<int>(std::ceil(scenario_.arena.height / cfg_.sensing_radius)));
  }

  const Scenario &scenario() const { return scenario_; }
  const SimConfig &config() const { return cfg_; }
  std::span<const Robot> robots() const { return robots_; }
  std::span<const Block> blocks() const { return blocks_; }
  double clock() const { return clock_; }
  long steps() const { return steps_; }
  std::uint64_t rng_seed() const { return rng_seed_; }
  const Tallies &tallies() const { return tallies_; }

  std::array<int, 4> state_counts() const {
    std::array<int, 4> c{};
    for (const auto &r : robots_)
      ++c[static_cast<int>(r.state)];
    return c;
  }
  int floor_blocks() const {
    int n = 0;
    for (const auto &b : blocks_)
      n += b.on_floor;
    return n;
  }

  /// Advances the world by one control period.
  void step() {
    sense();
    for (std::size_t i = 0; i < robots_.size(); ++i)
      move(static_cast<int>(i));
    ++steps_;
    clock_ = steps_ * cfg_.dt;
    for (const auto &r : robots_)
      if (is_avoiding(r.state))
        tallies_.avoid_occupancy += cfg_.dt;
  }

private:
  Vec2 velocity(const Robot &r) const {
    const double v = r.state == RobotState::Homing ? scenario_.homing_speed : scenario_.search_speed;
    return v * unit_from_angle(r.heading);
  }

  // --- blocks ---------------------------------------------------------------

  std::size_t block_cell_index(Vec2 p) const {
    const int cx = std::clamp(static_cast<int>(p.x / block_cell_), 0, block_nx_ - 1);
    const int cy = std::clamp(static_cast<int>(p.y / block_cell_), 0, block_ny_ - 1);
    return static_cast<std::size_t>(cy) * block_nx_ + cx;
  }

  /// Drops block b at a uniform point of a cluster chosen with probability A_j / A_d.
  void place_block(int b) {
    const double u = rng_.uniform();
    const int j = static_cast<int>(std::upper_bound(cluster_cdf_.begin(), cluster_cdf_.end() - 1, u) -
                                   cluster_cdf_.begin());
    const Rect r = scenario_.clusters[static_cast<std::size_t>(j)].rect();
    blocks_[b].position = {rng_.uniform(r.lo.x, r.hi.x), rng_.uniform(r.lo.y, r.hi.y)};
    blocks_[b].cluster = j;
    blocks_[b].on_floor = true;
    block_cells_[block_cell_index(blocks_[b].position)].push_back(b);
  }

  /// Lowest-id floor block whose square footprint contains p, removed from the floor.
  std::optional<int> take_block_at(Vec2 p) {
    const double h = 0.5 * cfg_.block_footprint;
    const int x0 = std::clamp(static_cast<int>((p.x - h) / block_cell_), 0, block_nx_ - 1);
    const int x1 = std::clamp(static_cast<int>((p.x + h) / block_cell_), 0, block_nx_ - 1);
    const int y0 = std::clamp(static_cast<int>((p.y - h) / block_cell_), 0, block_ny_ - 1);
    const int y1 = std::clamp(static_cast<int>((p.y + h) / block_cell_), 0, block_ny_ - 1);
    int best = -1;
    std::size_t best_cell = 0, best_pos = 0;
    for (int cy = y0; cy <= y1; ++cy)
      for (int cx = x0; cx <= x1; ++cx) {
        const auto ci = static_cast<std::size_t>(cy) * block_nx_ + cx;
        const auto &cell = block_cells_[ci];
        for (std::size_t k = 0; k < cell.size(); ++k) {
          const Vec2 q = blocks_[cell[k]].position;
          if (std::abs(q.x - p.x) <= h && std::abs(q.y - p.y) <= h && (best < 0 || cell[k] < best)) {
            best = cell[k];
            best_cell = ci;
            best_pos = k;
          }
        }
      }
    if (best < 0)
      return std::nullopt;
    auto &cell = block_cells_[best_cell];
    cell[best_pos] = cell.back();
    cell.pop_back();
    blocks_[best].on_floor = false;
    return best;
  }

  // --- sensing ----------------------------------------------------------------

  void rebuild_robot_grid() {
    if (cell_head_.empty())
      cell_head_.assign(static_cast<std::size_t>(robot_nx_) * robot_ny_, -1);
    for (auto c : used_cells_)
      cell_head_[c] = -1;
    used_cells_.clear();
    cell_next_.assign(robots_.size(), -1);
    for (int i = static_cast<int>(robots_.size()) - 1; i >= 0; --i) {
      const auto c = robot_cell(robots_[static_cast<std::size_t>(i)].position);
      if (cell_head_[c] < 0)
        used_cells_.push_back(c);
      cell_next_[static_cast<std::size_t>(i)] = cell_head_[c];
      cell_head_[c] = i;
    }
  }

  std::size_t robot_cell(Vec2 p) const {
    const int cx = std::clamp(static_cast<int>(p.x / cfg_.sensing_radius), 0, robot_nx_ - 1);
    const int cy = std::clamp(static_cast<int>(p.y / cfg_.sensing_radius), 0, robot_ny_ - 1);
    return static_cast<std::size_t>(cy) * robot_nx_ + cx;
  }

  /// Robots (not already avoiding) that sense an approaching wall or robot
  /// within the sensing radius start an avoidance episode. Positions and
  /// velocities are those at the start of the step, so detection is symmetric.
  void sense() {
    rebuild_robot_grid();
    velocities_.resize(robots_.size());
    for (std::size_t i = 0; i < robots_.size(); ++i)
      velocities_[i] = velocity(robots_[i]);
    const double rs = cfg_.sensing_radius;
    const double w = scenario_.arena.width, h = scenario_.arena.height;

    pending_.assign(robots_.size(), std::nullopt);
    for (std::size_t i = 0; i < robots_.size(); ++i) {
      const Robot &r = robots_[i];
      if (is_avoiding(r.state))
        continue;
      const Vec2 p = r.position, v = velocities_[i];
      const bool in_nest = cfg_.nest_free_zone && nest_.contains(p);
      double best = rs;
      std::optional<double> bearing;
      // walls: outward normal bearings
      const std::array<std::pair<double, Vec2>, 4> walls{{{p.x, {-1, 0}}, {w - p.x, {1, 0}}, {p.y, {0, -1}}, {h - p.y, {0, 1}}}};
      for (const auto &[dist, n] : walls)
        if (dist < best && dot(v, n) > 0.0) {
          best = dist;
          bearing = std::atan2(n.y, n.x);
        }
      const int cx = std::clamp(static_cast<int>(p.x / rs), 0, robot_nx_ - 1);
      const int cy = std::clamp(static_cast<int>(p.y / rs), 0, robot_ny_ - 1);
      for (int gy = std::max(cy - 1, 0); gy <= std::min(cy + 1, robot_ny_ - 1); ++gy)
        for (int gx = std::max(cx - 1, 0); gx <= std::min(cx + 1, robot_nx_ - 1); ++gx)
          for (int j = cell_head_[static_cast<std::size_t>(gy) * robot_nx_ + gx]; j >= 0; j = cell_next_[j]) {
            if (static_cast<std::size_t>(j) == i)
              continue;
            if (in_nest && nest_.contains(robots_[j].position))
              continue;
            const Vec2 dp = robots_[j].position - p;
            const double d = norm(dp);
            if (d < best && dot(dp, velocities_[j] - v) < 0.0) {
              best = d;
              bearing = std::atan2(dp.y, dp.x);
            }
          }
      if (bearing)
        pending_[i] = *bearing;
    }
    for (std::size_t i = 0; i < robots_.size(); ++i)
      if (pending_[i])
        start_avoidance(robots_[i], *pending_[i]);
  }

  void start_avoidance(Robot &r, double threat_bearing) {
    r.state = r.state == RobotState::Homing ? RobotState::AvoidingWhileHoming : RobotState::AvoidingWhileSearching;
    r.avoidance_timer = cfg_.avoid_duration;
    const double rel = wrap_angle(r.heading - threat_bearing);
    const double side = rel > 0.0 ? 1.0 : rel < 0.0 ? -1.0 : (rng_.uniform() < 0.5 ? -1.0 : 1.0);
    r.heading = wrap_angle(threat_bearing + side * rng_.uniform(cfg_.avoid_turn_min, cfg_.avoid_turn_max));
    ++tallies_.episodes_started;
  }

  // --- motion -------------------------------------------------------------------

  void advance(Robot &r, double speed) {
    r.position += speed * cfg_.dt * unit_from_angle(r.heading);
    const double lo = cfg_.robot_radius;
    const double hx = scenario_.arena.width - cfg_.robot_radius, hy = scenario_.arena.height - cfg_.robot_radius;
    if (r.position.x < lo) {
      r.position.x = 2.0 * lo - r.position.x;
      r.heading = wrap_angle(std::numbers::pi - r.heading);
    } else if (r.position.x > hx) {
      r.position.x = 2.0 * hx - r.position.x;
      r.heading = wrap_angle(std::numbers::pi - r.heading);
    }
    if (r.position.y < lo) {
      r.position.y = 2.0 * lo - r.position.y;
      r.heading = wrap_angle(-r.heading);
    } else if (r.position.y > hy) {
      r.position.y = 2.0 * hy - r.position.y;
      r.heading = wrap_angle(-r.heading);
    }
    r.position.x = std::clamp(r.position.x, lo, hx);
    r.position.y = std::clamp(r.position.y, lo, hy);
  }

  void move(int i) {
    Robot &r = robots_[static_cast<std::size_t>(i)];
    if (is_avoiding(r.state) && r.avoidance_timer <= 1e-9) {
      // pickups and drops resume next step
      finish_avoidance(r);
      advance(r, r.state == RobotState::Homing ? scenario_.homing_speed : scenario_.search_speed);
      return;
    }
    switch (r.state) {
    case RobotState::Searching: {
      r.heading = wrap_angle(r.heading + rng_.uniform(-scenario_.crw_half_angle, scenario_.crw_half_angle));
      advance(r, scenario_.search_speed);
      if (auto b = take_block_at(r.position)) {
        r.carried_block = *b;
        r.state = RobotState::Homing;
        const Rect nest = scenario_.arena.nest();
        r.nest_target = nest_target_choice(nest_entry_point(nest, r.position), nest.center(), rng_, cfg_.drop_rule);
        r.homing_started = clock_ + cfg_.dt;
      }
      break;
    }
    case RobotState::Homing: {
      const Vec2 to = *r.nest_target - r.position;
      const double d = norm(to);
      const double stepl = scenario_.homing_speed * cfg_.dt;
      if (d <= stepl) {
        r.position = *r.nest_target;
        place_block(*r.carried_block);
        r.carried_block.reset();
        r.nest_target.reset();
        r.state = RobotState::Searching;
        r.heading = rng_.uniform(-std::numbers::pi, std::numbers::pi);
        ++tallies_.collected;
        ++tallies_.homings_completed;
        tallies_.homing_time_completed += clock_ + cfg_.dt - r.homing_started;
      } else {
        r.heading = std::atan2(to.y, to.x);
        r.position += (stepl / d) * to;
      }
      break;
    }
    case RobotState::AvoidingWhileSearching:
    case RobotState::AvoidingWhileHoming: {
      advance(r, scenario_.search_speed);
      r.avoidance_timer -= cfg_.dt;
      break;
    }
    }
  }

  /// Ends an episode whose timer ran out during the previous step.
  void finish_avoidance(Robot &r) {
    r.avoidance_timer = 0.0;
    r.state = r.state == RobotState::AvoidingWhileHoming ? RobotState::Homing : RobotState::Searching;
    ++tallies_.episodes_completed;
    tallies_.avoid_time_completed += cfg_.avoid_duration;
    if (r.state == RobotState::Homing) {
      const Vec2 to = *r.nest_target - r.position;
      r.heading = std::atan2(to.y, to.x);
    }
  }

  Scenario scenario_;
  SimConfig cfg_;
  Rect nest_;
  std::uint64_t rng_seed_;
  Rng rng_;
  std::vector<Robot> robots_;
  std::vector<Block> blocks_;
  std::vector<double> cluster_cdf_;
  double block_cell_ = 1.0;
  int block_nx_ = 1, block_ny_ = 1;
  std::vector<std::vector<int>> block_cells_;
  int robot_nx_ = 1, robot_ny_ = 1;
  std::vector<int> cell_head_, cell_next_;
  std::vector<std::size_t> used_cells_;
  std::vector<Vec2> velocities_;
  std::vector<std::optional<double>> pending_;
  double clock_ = 0.0;
  long steps_ = 0;
  Tallies tallies_;
};

/// Value-semantics step: returns the world advanced by one period.
inline SimWorld step(SimWorld w) {
  w.step();
  return w;
}

// ---------------------------------------------------------------------------
// Replicated runs
// ---------------------------------------------------------------------------

struct TimeSeries {
  std::vector<double> times;
  std::vector<int> n_s, n_h, n_av_s, n_av_h;
  std::vector<long> collected_cum;
  int replicate_id = 0;
  std::uint64_t seed = 0;
  Tallies tallies; // at the end of the run

  std::size_t size() const { return times.size(); }
};

inline TimeSeries simulate_replicate(const Scenario &s, double horizon, std::uint64_t seed, int replicate_id,
                                     const SimConfig &cfg = {}) {
  SimWorld w(s, seed, cfg);
  TimeSeries ts;
  ts.replicate_id = replicate_id;
  ts.seed = seed;
  const long steps = static_cast<long>(std::llround(horizon / cfg.dt));
  const int stride = std::max(1, cfg.sample_stride);
  for (long k = 1; k <= steps; ++k) {
    w.step();
    if (k % stride == 0) {
      const auto c = w.state_counts();
      ts.times.push_back(w.clock());
      ts.n_s.push_back(c[0]);
      ts.n_h.push_back(c[1]);
      ts.n_av_s.push_back(c[2]);
      ts.n_av_h.push_back(c[3]);
      ts.collected_cum.push_back(w.tallies().collected);
    }
  }
  ts.tallies = w.tallies();
  return ts;
}

/// Runs `fn(i)` for i in [0, n) on a small thread pool; results are written by index.
template <class Fn> void parallel_for(int n, Fn &&fn) {
  const int workers = std::max(1, std::min<int>(n, static_cast<int>(std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers)
          fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  for (auto &t : pool)
    t.join();
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

/// One TimeSeries per replicate; replicate r uses derive_seed(seed, r).
inline std::vector<TimeSeries> run(const Scenario &s, double horizon, int replicates, std::uint64_t seed,
                                   const SimConfig &cfg = {}) {
  if (replicates < 1)
    throw ValidationError("replicates must be >= 1");
  if (s.robot_count < 1)
    throw ValidationError("robot_count must be >= 1");
  if (!(horizon > cfg.burn_in_fraction * horizon) || !(horizon > 0.0))
    throw ValidationError("horizon must exceed the burn-in window");
  std::vector<TimeSeries> out(static_cast<std::size_t>(replicates));
  parallel_for(replicates, [&](int r) {
    out[static_cast<std::size_t>(r)] = simulate_replicate(s, horizon, derive_seed(seed, static_cast<std::uint64_t>(r)), r, cfg);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Single-robot calibration
// ---------------------------------------------------------------------------

struct SingleRobotMeasurement {
  double tau_av = 0.0;   // mean avoidance episode duration (s)
  double alpha_r1 = 0.0; // episodes per second
  double n_av1 = 0.0;    // time-averaged avoidance occupancy
  long episodes = 0;
  double horizon = 0.0;
  bool insufficient_horizon = false;
};

/// Runs the scenario with a single robot and measures its avoidance queue.
inline SingleRobotMeasurement measure_single_robot(Scenario s, double horizon, std::uint64_t seed,
                                                   const SimConfig &cfg = {}) {
  s.robot_count = 1;
  SimWorld w(s, seed, cfg);
  const long steps = static_cast<long>(std::llround(horizon / cfg.dt));
  for (long k = 0; k < steps; ++k)
    w.step();
  const auto &t = w.tallies();
  SingleRobotMeasurement m;
  m.horizon = w.clock();
  m.episodes = t.episodes_started;
  if (t.episodes_completed == 0) {
    m.insufficient_horizon = true;
    m.tau_av = cfg.avoid_duration;
    return m;
  }
  m.tau_av = t.avoid_time_completed / t.episodes_completed;
  m.alpha_r1 = t.episodes_started / m.horizon;
  m.n_av1 = t.avoid_occupancy / m.horizon;
  return m;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline void write_timeseries_csv(std::ostream &os, const TimeSeries &ts) {
  os << "t,n_s,n_h,n_av_s,n_av_h,collected_cum\n";
  char buf[160];
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.6f,%d,%d,%d,%d,%ld\n", ts.times[k], ts.n_s[k], ts.n_h[k], ts.n_av_s[k],
                  ts.n_av_h[k], ts.collected_cum[k]);
    os << buf;
  }
}

inline void write_run_manifest(std::ostream &os, const Scenario &s, const SimConfig &cfg, double horizon,
                               std::uint64_t seed, const std::vector<TimeSeries> &series) {
  os << "seed = " << seed << '\n';
  os << "scenario_hash = " << scenario_hash(s) << '\n';
  os << "kind = " << to_string(s.kind) << '\n';
  os << "robot_count = " << s.robot_count << '\n';
  os << "total_blocks = " << s.total_blocks << '\n';
  os << "horizon = " << horizon << '\n';
  os << "dt = " << cfg.dt << '\n';
  os << "sample_stride = " << cfg.sample_stride << '\n';
  os << "robot_radius = " << cfg.robot_radius << '\n';
  os << "sensing_radius = " << cfg.sensing_radius << '\n';
  os << "avoid_duration = " << cfg.avoid_duration << '\n';
  os << "block_footprint = " << cfg.block_footprint << '\n';
  os << "drop_rule = " << (cfg.drop_rule == DropRule::UniformArea ? "uniform-area" : "uniform-fraction") << '\n';
  os << "replicates = " << series.size() << '\n';
  for (const auto &ts : series)
    os << "replicate_seed." << ts.replicate_id << " = " << ts.seed << '\n';
}

} // namespace forage

#endif // FORAGE_MICROSIM_HPP
