#ifndef FORAGE_STATS_HPP
#define FORAGE_STATS_HPP

#include <cmath>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "forage/core.hpp"
#include "forage/microsim.hpp"

namespace forage {

/// Across-replicate mean with a two-sided 95% t-interval.
struct Interval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> per_replicate;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double half_width() const { return 0.5 * (hi - lo); }
};

inline Interval t_interval(std::span<const double> xs, double confidence = 0.95) {
  Interval iv;
  iv.per_replicate.assign(xs.begin(), xs.end());
  const auto n = xs.size();
  if (n == 0)
    return iv;
  double sum = 0.0;
  for (double x : xs)
    sum += x;
  iv.mean = sum / n;
  iv.lo = iv.hi = iv.mean;
  if (n < 2)
    return iv;
  double ss = 0.0;
  for (double x : xs)
    ss += (x - iv.mean) * (x - iv.mean);
  const double sd = std::sqrt(ss / (n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double q = boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - confidence)));
  const double hw = q * sd / std::sqrt(static_cast<double>(n));
  iv.lo = iv.mean - hw;
  iv.hi = iv.mean + hw;
  return iv;
}

struct SteadyStats {
  Interval n_s, n_h, n_av_s, n_av_h, n_av;
  Interval collection_rate; // blocks/s
  Interval homing_time;     // s, mean pickup-to-drop duration
  int replicates = 0;
  double burn_in = 0.0;
  bool non_stationary = false;
  double max_relative_drift = 0.0;
};

struct SteadyOptions {
  /// Flag non-stationarity when the fitted post-burn-in linear drift of a
  /// replicate-averaged count exceeds this fraction of max(mean, 1).
  double drift_threshold = 0.25;
};

namespace detail {

inline double least_squares_slope(std::span<const double> t, std::span<const double> y) {
  const auto n = static_cast<double>(t.size());
  if (t.size() < 2)
    return 0.0;
  double mt = 0.0, my = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    mt += t[k];
    my += y[k];
  }
  mt /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    sxy += (t[k] - mt) * (y[k] - my);
    sxx += (t[k] - mt) * (t[k] - mt);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

} // namespace detail

/// Post-burn-in time averages per replicate, then across-replicate means
/// and 95% t-intervals.
inline SteadyStats steady_stats(std::span<const TimeSeries> series, double burn_in, const SteadyOptions &opt = {}) {
  if (series.empty())
    throw ValidationError("steady_stats needs at least one replicate");
  SteadyStats st;
  st.replicates = static_cast<int>(series.size());
  st.burn_in = burn_in;
  std::vector<double> ns, nh, nas, nah, nav, rate, htime;
  std::vector<double> avg_t, avg_h, avg_av;
  for (const auto &ts : series) {
    if (ts.size() == 0 || !(burn_in < ts.times.back()))
      throw ValidationError("burn-in must end before the horizon");
    std::size_t k0 = 0;
    while (k0 < ts.size() && ts.times[k0] <= burn_in)
      ++k0;
    double a = 0, b = 0, c = 0, d = 0;
    const std::size_t m = ts.size() - k0;
    if (avg_t.empty()) {
      avg_t.assign(ts.times.begin() + static_cast<long>(k0), ts.times.end());
      avg_h.assign(m, 0.0);
      avg_av.assign(m, 0.0);
    }
    for (std::size_t k = k0; k < ts.size(); ++k) {
      a += ts.n_s[k];
      b += ts.n_h[k];
      c += ts.n_av_s[k];
      d += ts.n_av_h[k];
      if (k - k0 < avg_h.size()) {
        avg_h[k - k0] += ts.n_h[k];
        avg_av[k - k0] += ts.n_av_s[k] + ts.n_av_h[k];
      }
    }
    ns.push_back(a / m);
    nh.push_back(b / m);
    nas.push_back(c / m);
    nah.push_back(d / m);
    nav.push_back((c + d) / m);
    const double t0 = k0 > 0 ? ts.times[k0 - 1] : 0.0;
    const long c0 = k0 > 0 ? ts.collected_cum[k0 - 1] : 0;
    rate.push_back(static_cast<double>(ts.collected_cum.back() - c0) / (ts.times.back() - t0));
    htime.push_back(ts.tallies.homings_completed > 0 ? ts.tallies.homing_time_completed / ts.tallies.homings_completed
                                                     : 0.0);
  }
  st.n_s = t_interval(ns);
  st.n_h = t_interval(nh);
  st.n_av_s = t_interval(nas);
  st.n_av_h = t_interval(nah);
  st.n_av = t_interval(nav);
  st.collection_rate = t_interval(rate);
  st.homing_time = t_interval(htime);

  const double span_t = avg_t.empty() ? 0.0 : avg_t.back() - avg_t.front();
  for (auto *series_avg : {&avg_h, &avg_av}) {
    for (auto &v : *series_avg)
      v /= series.size();
    const double slope = detail::least_squares_slope(avg_t, *series_avg);
    double mean = 0.0;
    for (double v : *series_avg)
      mean += v;
    mean = series_avg->empty() ? 0.0 : mean / series_avg->size();
    const double drift = std::abs(slope) * span_t / std::max(mean, 1.0);
    st.max_relative_drift = std::max(st.max_relative_drift, drift);
  }
  st.non_stationary = st.max_relative_drift > opt.drift_threshold;
  return st;
}

} // namespace forage

#endif // FORAGE_STATS_HPP
