#ifndef FORAGE_SCENARIO_HPP
#define FORAGE_SCENARIO_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "forage/core.hpp"
#include "json.hpp"

namespace forage {

/// Block distribution families: single source, dual source, random, power law.
enum class Kind { SS, DS, RN, PL };

inline constexpr std::array<Kind, 4> all_kinds{Kind::SS, Kind::DS, Kind::RN, Kind::PL};

inline std::string_view to_string(Kind k) {
  switch (k) {
  case Kind::SS:
    return "SS";
  case Kind::DS:
    return "DS";
  case Kind::RN:
    return "RN";
  case Kind::PL:
    return "PL";
  }
  return "?";
}

inline Kind parse_kind(std::string_view s) {
  for (Kind k : all_kinds)
    if (to_string(k) == s)
      return k;
  throw ValidationError("unknown distribution kind '" + std::string(s) + "' (expected SS, DS, RN or PL)");
}

struct Arena {
  double width = 0.0;
  double height = 0.0;
  Vec2 nest_center;
  double nest_side = 0.0;

  Rect bounds() const { return {{0.0, 0.0}, {width, height}}; }
  Rect nest() const { return Rect::from_center(nest_center, {nest_side, nest_side}); }
  double area() const { return width * height; }
};

/// Rectangular sub-area where blocks are distributed. `block_count` is the
/// expected (real-valued) number of blocks; area and density are derived.
struct BlockCluster {
  Vec2 center;
  Vec2 dims;
  double block_count = 0.0;

  double area() const { return dims.x * dims.y; }
  double density() const { return block_count / area(); }
  Rect rect() const { return Rect::from_center(center, dims); }
};

struct Scenario {
  Arena arena;
  std::vector<BlockCluster> clusters;
  Kind kind = Kind::RN;
  int robot_count = 1;
  int total_blocks = 1;
  double search_speed = 0.1;             // m/s
  double homing_speed = 0.1;             // m/s
  double crw_half_angle = std::numbers::pi / 36.0; // rad
  std::uint64_t seed = 0;
};

/// Knobs for make_scenario that the distribution figures leave open.
struct ScenarioOptions {
  double nest_fraction = 0.1; // nest side as a fraction of the shorter arena side
  double wall_margin = 0.5;   // clusters are inset this far from the walls (m)
  double search_speed = 0.1;
  double homing_speed = 0.1;
  double crw_half_angle = std::numbers::pi / 36.0;
  double pl_grid_unit = 1.0;     // m
  double pl_area_fraction = 0.2; // stop adding PL clusters once this share of the arena is covered
  int pl_max_retries = 1000;
};

inline double distributable_area(const Scenario &s) {
  double a = 0.0;
  for (const auto &c : s.clusters)
    a += c.area();
  return a;
}

inline double swarm_density(const Scenario &s) { return s.robot_count / s.arena.area(); }

inline double total_cluster_blocks(const Scenario &s) {
  double b = 0.0;
  for (const auto &c : s.clusters)
    b += c.block_count;
  return b;
}

/// Checks every structural invariant; throws ValidationError on the first violation.
inline void validate(const Scenario &s) {
  const auto &a = s.arena;
  if (!(a.width > 0.0) || !(a.height > 0.0))
    throw ValidationError("arena dimensions must be positive");
  if (!(a.nest_side > 0.0))
    throw ValidationError("nest side must be positive");
  if (!a.bounds().contains(a.nest()))
    throw ValidationError("nest must lie inside the arena");
  if (s.robot_count < 1)
    throw ValidationError("robot_count must be >= 1");
  if (s.total_blocks < 1)
    throw ValidationError("total_blocks must be >= 1");
  if (!(s.search_speed > 0.0) || !(s.homing_speed > 0.0))
    throw ValidationError("robot speeds must be positive");
  if (!(s.crw_half_angle > 0.0) || s.crw_half_angle > std::numbers::pi)
    throw ValidationError("crw_half_angle must lie in (0, pi]");
  if (s.clusters.empty())
    throw ValidationError("scenario needs at least one block cluster");
  for (std::size_t i = 0; i < s.clusters.size(); ++i) {
    const auto &c = s.clusters[i];
    if (!(c.dims.x > 0.0) || !(c.dims.y > 0.0))
      throw ValidationError("cluster " + std::to_string(i) + " has non-positive extent");
    if (!(c.block_count >= 0.0))
      throw ValidationError("cluster " + std::to_string(i) + " has negative block count");
    if (!a.bounds().contains(c.rect()))
      throw ValidationError("cluster " + std::to_string(i) + " leaves the arena");
    if (c.rect().intersects(a.nest()))
      throw ValidationError("cluster " + std::to_string(i) + " overlaps the nest");
    for (std::size_t j = 0; j < i; ++j)
      if (c.rect().intersects(s.clusters[j].rect()))
        throw ValidationError("clusters " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
  }
  if (std::abs(total_cluster_blocks(s) - s.total_blocks) > 1e-9 * s.total_blocks)
    throw ValidationError("cluster block counts do not sum to total_blocks");
  if (distributable_area(s) > a.area() * (1.0 + 1e-12))
    throw ValidationError("distributable area exceeds arena area");
}

namespace detail {

/// Assigns expected block counts proportional to cluster area; the sum is
/// exactly total (the last cluster absorbs rounding).
inline void apportion_blocks(Scenario &s) {
  const double ad = distributable_area(s);
  double assigned = 0.0;
  for (std::size_t j = 0; j + 1 < s.clusters.size(); ++j) {
    s.clusters[j].block_count = s.total_blocks * s.clusters[j].area() / ad;
    assigned += s.clusters[j].block_count;
  }
  s.clusters.back().block_count = s.total_blocks - assigned;
}

inline BlockCluster cluster_from_rect(const Rect &r) { return {r.center(), {r.width(), r.height()}, 0.0}; }

inline void add_if_nonempty(std::vector<BlockCluster> &out, const Rect &r) {
  if (r.width() > 1e-9 && r.height() > 1e-9)
    out.push_back(cluster_from_rect(r));
}

inline void place_power_law(Scenario &s, const ScenarioOptions &opt, Rng &rng) {
  const double w = s.arena.width, h = s.arena.height, m = opt.wall_margin;
  const double usable = std::min(w, h) - 2.0 * m;
  int kmax = 0;
  while (std::ldexp(opt.pl_grid_unit, kmax + 1) <= usable / 3.0)
    ++kmax;
  // P(size = 2^k units) proportional to (2^k)^-2
  std::vector<double> cdf;
  double acc = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    acc += std::ldexp(1.0, -2 * k);
    cdf.push_back(acc);
  }
  for (auto &c : cdf)
    c /= acc;

  const Rect nest = s.arena.nest();
  const Rect keep_out{{nest.lo.x - m, nest.lo.y - m}, {nest.hi.x + m, nest.hi.y + m}};
  const double target = opt.pl_area_fraction * s.arena.area();
  // draw every side first, then place largest first
  std::vector<double> sides;
  for (double drawn = 0.0; drawn < target;) {
    const double u = rng.uniform();
    const int k = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const double side = std::ldexp(opt.pl_grid_unit, k);
    if (side > w - 2.0 * m || side > h - 2.0 * m)
      throw InfeasibleGeometryError("power-law cluster larger than the arena interior");
    sides.push_back(side);
    drawn += side * side;
  }
  std::stable_sort(sides.begin(), sides.end(), std::greater<>());
  for (const double side : sides) {
    bool placed = false;
    for (int attempt = 0; attempt < opt.pl_max_retries && !placed; ++attempt) {
      const Vec2 lo{rng.uniform(m, w - m - side), rng.uniform(m, h - m - side)};
      const Rect r{lo, {lo.x + side, lo.y + side}};
      if (r.intersects(keep_out))
        continue;
      bool clash = false;
      for (const auto &c : s.clusters)
        clash = clash || r.intersects(c.rect());
      if (clash)
        continue;
      s.clusters.push_back(cluster_from_rect(r));
      placed = true;
    }
    if (!placed)
      throw InfeasibleGeometryError("could not place a " + std::to_string(side) + " m power-law cluster after " +
                                    std::to_string(opt.pl_max_retries) + " attempts");
  }
}

} // namespace detail

/// Builds one of the four canonical block distributions.
///
/// SS: nest flush with the left wall, one cluster over the right half.
/// DS: centred nest, two mirror-image strips over the outer quarters.
/// RN: centred nest, the whole arena except the nest (four rectangles).
/// PL: centred nest, square clusters with power-law distributed sides.
/// Clusters are inset from the walls by `wall_margin`.
inline Scenario make_scenario(Kind kind, double width, double height, int n_robots, int n_blocks, std::uint64_t seed,
                              const ScenarioOptions &opt = {}) {
  if (!(width > 0.0) || !(height > 0.0))
    throw ValidationError("arena dimensions must be positive");
  if (n_robots < 1)
    throw ValidationError("n_robots must be >= 1");
  if (n_blocks < 1)
    throw ValidationError("n_blocks must be >= 1");

  Scenario s;
  s.kind = kind;
  s.robot_count = n_robots;
  s.total_blocks = n_blocks;
  s.search_speed = opt.search_speed;
  s.homing_speed = opt.homing_speed;
  s.crw_half_angle = opt.crw_half_angle;
  s.seed = seed;
  s.arena.width = width;
  s.arena.height = height;
  s.arena.nest_side = opt.nest_fraction * std::min(width, height);
  const double m = opt.wall_margin;
  const double half = 0.5 * s.arena.nest_side;

  if (kind == Kind::SS) {
    s.arena.nest_center = {half, 0.5 * height};
    detail::add_if_nonempty(s.clusters, {{0.5 * width, m}, {width - m, height - m}});
  } else {
    s.arena.nest_center = {0.5 * width, 0.5 * height};
  }

  if (kind == Kind::DS) {
    detail::add_if_nonempty(s.clusters, {{m, m}, {0.25 * width, height - m}});
    detail::add_if_nonempty(s.clusters, {{0.75 * width, m}, {width - m, height - m}});
  } else if (kind == Kind::RN) {
    const Rect n = s.arena.nest();
    detail::add_if_nonempty(s.clusters, {{m, m}, {n.lo.x, height - m}});
    detail::add_if_nonempty(s.clusters, {{n.hi.x, m}, {width - m, height - m}});
    detail::add_if_nonempty(s.clusters, {{n.lo.x, m}, {n.hi.x, n.lo.y}});
    detail::add_if_nonempty(s.clusters, {{n.lo.x, n.hi.y}, {n.hi.x, height - m}});
  } else if (kind == Kind::PL) {
    Rng rng(derive_seed(seed, 0x504cULL));
    detail::place_power_law(s, opt, rng);
  }

  if (s.clusters.empty())
    throw InfeasibleGeometryError("arena too small for the wall margin");
  detail::apportion_blocks(s);
  validate(s);
  return s;
}

/// Arena dimensions for a given area: 2:1 rectangles for SS/DS, squares for RN/PL.
inline std::pair<double, double> arena_dims_for_area(Kind kind, double area) {
  if (kind == Kind::SS || kind == Kind::DS) {
    const double h = std::sqrt(0.5 * area);
    return {2.0 * h, h};
  }
  const double side = std::sqrt(area);
  return {side, side};
}

// ---------------------------------------------------------------------------
// Scenario files (JSON, one document per scenario)
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Scenario &s) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(s.kind));
  j["seed"] = s.seed;
  j["robot_count"] = s.robot_count;
  j["total_blocks"] = s.total_blocks;
  j["search_speed"] = s.search_speed;
  j["homing_speed"] = s.homing_speed;
  j["crw_half_angle"] = s.crw_half_angle;
  j["arena"] = {{"width", s.arena.width},
                {"height", s.arena.height},
                {"nest_center", {s.arena.nest_center.x, s.arena.nest_center.y}},
                {"nest_side", s.arena.nest_side}};
  j["clusters"] = nlohmann::json::array();
  for (const auto &c : s.clusters)
    j["clusters"].push_back({{"center", {c.center.x, c.center.y}},
                             {"dims", {c.dims.x, c.dims.y}},
                             {"block_count", c.block_count}});
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json &j) {
  try {
    Scenario s;
    s.kind = parse_kind(j.at("kind").get<std::string>());
    s.seed = j.value("seed", std::uint64_t{0});
    s.robot_count = j.at("robot_count").get<int>();
    s.total_blocks = j.at("total_blocks").get<int>();
    s.search_speed = j.at("search_speed").get<double>();
    s.homing_speed = j.at("homing_speed").get<double>();
    s.crw_half_angle = j.at("crw_half_angle").get<double>();
    const auto &a = j.at("arena");
    s.arena.width = a.at("width").get<double>();
    s.arena.height = a.at("height").get<double>();
    s.arena.nest_center = {a.at("nest_center").at(0).get<double>(), a.at("nest_center").at(1).get<double>()};
    s.arena.nest_side = a.at("nest_side").get<double>();
    for (const auto &c : j.at("clusters"))
      s.clusters.push_back({{c.at("center").at(0).get<double>(), c.at("center").at(1).get<double>()},
                            {c.at("dims").at(0).get<double>(), c.at("dims").at(1).get<double>()},
                            c.at("block_count").get<double>()});
    validate(s);
    return s;
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("malformed scenario document: ") + e.what());
  }
}

inline std::uint64_t scenario_hash(const Scenario &s) { return fnv1a(to_json(s).dump()); }

} // namespace forage

#endif // FORAGE_SCENARIO_HPP
