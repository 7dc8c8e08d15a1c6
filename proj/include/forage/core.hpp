#ifndef FORAGE_CORE_HPP
#define FORAGE_CORE_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace forage {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid input (bad scenario field, bad plan, bad CLI value).
struct ValidationError : Error {
  using Error::Error;
};

/// Scenario generation could not place clusters without overlap.
struct InfeasibleGeometryError : Error {
  using Error::Error;
};

/// A formula was evaluated outside the domain where it is defined.
struct ModelDomainError : Error {
  using Error::Error;
};

/// Quadrature or root finding did not converge.
struct NumericError : Error {
  using Error::Error;
};

/// ODE integration produced a non-finite, negative or runaway component.
struct InstabilityError : Error {
  using Error::Error;
};

/// Fit objective is flat or the calibration set cannot identify the unknowns.
struct UnidentifiableFitError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// 2D geometry
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 &operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2 &operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

/// Axis-aligned rectangle given by its lower-left and upper-right corners.
struct Rect {
  Vec2 lo;
  Vec2 hi;

  static Rect from_center(Vec2 c, Vec2 dims) {
    return {{c.x - 0.5 * dims.x, c.y - 0.5 * dims.y}, {c.x + 0.5 * dims.x, c.y + 0.5 * dims.y}};
  }
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double area() const { return width() * height(); }
  Vec2 center() const { return 0.5 * (lo + hi); }
  bool contains(Vec2 p, double eps = 0.0) const {
    return p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps && p.y <= hi.y + eps;
  }
  bool contains(const Rect &r, double eps = 1e-12) const {
    return contains(r.lo, eps) && contains(r.hi, eps);
  }
  /// True when the interiors overlap; rectangles sharing an edge do not intersect.
  bool intersects(const Rect &r, double eps = 1e-12) const {
    return lo.x < r.hi.x - eps && r.lo.x < hi.x - eps && lo.y < r.hi.y - eps && r.lo.y < hi.y - eps;
  }
};

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// splitmix64 step; used to derive independent per-replicate / per-point seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// xoshiro256** with portable uniform helpers, so streams are bit-identical
/// across standard libraries (std distributions are implementation-defined).
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t s = seed;
    for (auto &w : state_) {
      s = splitmix64(s);
      w = s;
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4]{};
};

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0)
    a += two_pi;
  return a - std::numbers::pi;
}

/// FNV-1a over a byte string; stable scenario fingerprint for run manifests.
inline std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace forage

#endif // FORAGE_CORE_HPP
