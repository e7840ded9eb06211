#pragma once

// Tail diagnostics on time series: local power index p(t) = -t psi'/psi,
// log-log exponent fits and series comparison.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/makima.hpp>

#include "jostlab/error.hpp"
#include "jostlab/evolution.hpp"

namespace jostlab {

enum class FitMethod { log_log_ls, local_index };

inline const char* to_string(FitMethod m) {
  return m == FitMethod::log_log_ls ? "log_log_ls" : "local_index";
}

struct FitReport {
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  double t0 = 0.0, t1 = 0.0;  // window
  std::vector<std::pair<double, double>> local_index_series;
  FitMethod method = FitMethod::log_log_ls;
  bool auto_window = false;
  bool reliable = false;
  std::size_t samples = 0;
};

namespace detail {

inline void require_series(const EvolutionResult& s) {
  require(s.times.size() == s.psi.size() && s.times.size() >= 5, ErrorCode::contract_violation,
          "analysis: series needs >= 5 samples");
}

// Derivative weights at z for the Lagrange polynomial through xs.
inline std::vector<double> derivative_weights(const double* xs, std::size_t n, double z) {
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double den = 1.0;
    for (std::size_t m = 0; m < n; ++m)
      if (m != j) den *= xs[j] - xs[m];
    double num = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      double prod = 1.0;
      for (std::size_t m = 0; m < n; ++m)
        if (m != j && m != k) prod *= z - xs[m];
      num += prod;
    }
    w[j] = num / den;
  }
  return w;
}

// p at sample i from a centred five-point stencil.
inline double index_at_sample(const EvolutionResult& s, std::size_t i) {
  require(i >= 2 && i + 2 < s.times.size(), ErrorCode::out_of_range,
          "local_power_index: t must be interior to the series");
  for (std::size_t j = i - 2; j <= i + 2; ++j)
    require(s.psi[j] != 0.0 && (s.psi[j] > 0.0) == (s.psi[i] > 0.0), ErrorCode::non_convergence,
            "local_power_index: sign change in the stencil (oscillation, not a tail)");
  auto w = derivative_weights(&s.times[i - 2], 5, s.times[i]);
  double d = 0.0;
  for (std::size_t j = 0; j < 5; ++j) d += w[j] * s.psi[i - 2 + j];
  return -s.times[i] * d / s.psi[i];
}

}  // namespace detail

// p(t) = -t psi'(t)/psi(t), linear between neighbouring samples.
inline double local_power_index(const EvolutionResult& s, double t) {
  detail::require_series(s);
  auto it = std::lower_bound(s.times.begin(), s.times.end(), t);
  require(it != s.times.end(), ErrorCode::out_of_range, "local_power_index: t beyond the series");
  std::size_t i = static_cast<std::size_t>(it - s.times.begin());
  if (s.times[i] == t) return detail::index_at_sample(s, i);
  require(i >= 1, ErrorCode::out_of_range, "local_power_index: t before the series");
  double u = (t - s.times[i - 1]) / (s.times[i] - s.times[i - 1]);
  return (1.0 - u) * detail::index_at_sample(s, i - 1) + u * detail::index_at_sample(s, i);
}

// Least-squares slope of log|psi| against log t on [t0, t1].
inline FitReport fit_tail_exponent(const EvolutionResult& s, double t0, double t1) {
  detail::require_series(s);
  require(t0 > 0.0 && t1 >= 2.0 * t0, ErrorCode::contract_violation,
          "fit_tail_exponent: window must span at least a factor 2 in t");
  require(t0 >= s.times.front() && t1 <= s.times.back(), ErrorCode::out_of_range,
          "fit_tail_exponent: window outside the series");
  FitReport r;
  r.t0 = t0;
  r.t1 = t1;
  std::vector<double> X, Y;
  int sign = 0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    double t = s.times[i];
    if (t < t0 || t > t1) continue;
    double v = s.psi[i];
    int sg = v > 0.0 ? 1 : v < 0.0 ? -1 : 0;
    require(sg != 0 && (sign == 0 || sg == sign), ErrorCode::non_convergence,
            "fit_tail_exponent: sign change in the window (oscillation, not a tail)");
    sign = sg;
    X.push_back(std::log(t));
    Y.push_back(std::log(std::abs(v)));
  }
  const std::size_t n = X.size();
  require(n >= 3, ErrorCode::contract_violation, "fit_tail_exponent: fewer than 3 samples in window");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  double slope = sxy / sxx, ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = Y[i] - my - slope * (X[i] - mx);
    ssr += e * e;
  }
  r.exponent = -slope;
  r.exponent_stderr = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
  r.samples = n;
  r.reliable = r.exponent_stderr < 1e-2 * std::max(1.0, std::abs(r.exponent));
  // p(t) on up to 64 log-spaced samples of the window, for the report.
  for (int k = 0; k < 64; ++k) {
    double t = t0 * std::pow(t1 / t0, k / 63.0);
    auto it = std::lower_bound(s.times.begin(), s.times.end(), t);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - s.times.begin()), s.times.size() - 3);
    if (i < 2) continue;
    if (!r.local_index_series.empty() && r.local_index_series.back().first == s.times[i]) continue;
    try {
      r.local_index_series.emplace_back(s.times[i], detail::index_at_sample(s, i));
    } catch (const Error&) {
    }
  }
  return r;
}

// Largest window in [lo, hi] on which p(t) varies by less than `spread`,
// then a log-log fit on it.
inline FitReport fit_tail_exponent_auto(const EvolutionResult& s, double lo, double hi,
                                        double spread = 0.1, std::size_t probes = 200) {
  detail::require_series(s);
  lo = std::max(lo, s.times[2]);
  hi = std::min(hi, s.times[s.times.size() - 3]);
  require(hi >= 2.0 * lo, ErrorCode::contract_violation, "fit_tail_exponent_auto: range too short");
  std::vector<double> t, p;
  for (std::size_t k = 0; k < probes; ++k) {
    double tk = lo * std::pow(hi / lo, static_cast<double>(k) / (probes - 1));
    try {
      double v = local_power_index(s, tk);
      t.push_back(tk);
      p.push_back(v);
    } catch (const Error&) {
      t.push_back(tk);
      p.push_back(NAN);
    }
  }
  // Longest run (in log t) with max p - min p < spread.
  std::size_t best_a = 0, best_b = 0;
  for (std::size_t a = 0; a < t.size(); ++a) {
    if (std::isnan(p[a])) continue;
    double mn = p[a], mx = p[a];
    std::size_t b = a;
    while (b + 1 < t.size() && !std::isnan(p[b + 1])) {
      double nmn = std::min(mn, p[b + 1]), nmx = std::max(mx, p[b + 1]);
      if (nmx - nmn >= spread) break;
      mn = nmn;
      mx = nmx;
      ++b;
    }
    if (t[b] / t[a] > t[best_b] / t[best_a]) {
      best_a = a;
      best_b = b;
    }
  }
  require(t[best_b] >= 2.0 * t[best_a], ErrorCode::non_convergence,
          "fit_tail_exponent_auto: no window where the local index settles");
  FitReport r = fit_tail_exponent(s, t[best_a], t[best_b]);
  r.auto_window = true;
  return r;
}

struct SeriesComparison {
  double max_relative = 0.0;
  double mean_relative = 0.0;
  double index_correlation = 0.0;  // Pearson correlation of the local indices (NaN if undefined)
  std::size_t samples = 0;
  double t0 = 0.0, t1 = 0.0;
};

// b is interpolated (cubic Hermite) onto the times of a inside their overlap.
inline SeriesComparison compare_series(const EvolutionResult& a, const EvolutionResult& b,
                                       double noise_floor = 1e-12, double t_lo = -INFINITY,
                                       double t_hi = INFINITY) {
  require(a.times.size() == a.psi.size() && b.times.size() == b.psi.size() && a.times.size() >= 4 &&
              b.times.size() >= 4,
          ErrorCode::contract_violation, "compare_series: malformed series");
  double lo = std::max({a.times.front(), b.times.front(), t_lo});
  double hi = std::min({a.times.back(), b.times.back(), t_hi});
  require(lo <= hi, ErrorCode::contract_violation, "compare_series: disjoint windows");
  std::vector<double> bt = b.times, bp = b.psi;
  auto spline = boost::math::interpolators::makima(std::move(bt), std::move(bp));
  // Both indices come from the same interpolant family so identical inputs correlate exactly.
  std::vector<double> at = a.times, ap = a.psi;
  auto own = boost::math::interpolators::makima(std::move(at), std::move(ap));
  SeriesComparison c;
  c.t0 = lo;
  c.t1 = hi;
  std::vector<double> pa, pb;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    double t = a.times[i];
    if (t < lo || t > hi) continue;
    double u = a.psi[i], v = spline(t);
    if (std::max(std::abs(u), std::abs(v)) <= noise_floor) continue;
    double rel = std::abs(u - v) / std::max(std::abs(u), std::abs(v));
    c.max_relative = std::max(c.max_relative, rel);
    c.mean_relative += rel;
    ++c.samples;
    if (u != 0.0 && v != 0.0) {
      pa.push_back(-t * own.prime(t) / u);
      pb.push_back(-t * spline.prime(t) / v);
    }
  }
  if (c.samples) c.mean_relative /= static_cast<double>(c.samples);
  c.index_correlation = NAN;
  if (pa.size() >= 3) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      ma += pa[i];
      mb += pb[i];
    }
    ma /= pa.size();
    mb /= pb.size();
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      sab += (pa[i] - ma) * (pb[i] - mb);
      saa += (pa[i] - ma) * (pa[i] - ma);
      sbb += (pb[i] - mb) * (pb[i] - mb);
    }
    if (saa > 0 && sbb > 0) c.index_correlation = sab / std::sqrt(saa * sbb);
  }
  return c;
}

}  // namespace jostlab
