#pragma once

// Wave evolution psi_tt = psi_xx - V psi. The spectral route integrates the
// kernel Im G against sin/cos(t lambda); FDTD and d'Alembert are independent
// oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jostlab/error.hpp"
#include "jostlab/panels.hpp"
#include "jostlab/parallel.hpp"
#include "jostlab/potential.hpp"
#include "jostlab/spectral.hpp"

namespace jostlab {

// ---------------------------------------------------------------- data

struct WeightedNorms {
  double alpha = 0.0;
  double f = 0.0, df = 0.0, g = 0.0;  // int <x>^{alpha+1} |.| dx
};

struct CauchyData {
  std::function<double(double)> f, df, g;  // empty means identically zero
  double a = 0.0, b = 0.0;                  // support
  double scale = 1.0;                       // smoothness length, sets quadrature panels
  std::vector<double> kinks;                // interior points where f or g jump
  std::string label;

  double f_at(double x) const { return f && x >= a && x <= b ? f(x) : 0.0; }
  double df_at(double x) const { return df && x >= a && x <= b ? df(x) : 0.0; }
  double g_at(double x) const { return g && x >= a && x <= b ? g(x) : 0.0; }
};

// Gaussian of width s about x0, cut at |x - x0| = cut*s (the cut is below
// double precision for cut = 8).
inline CauchyData gaussian_data(double x0, double s, double f_amp, double g_amp,
                                double cut = 8.0) {
  require(s > 0.0 && cut > 0.0, ErrorCode::contract_violation, "gaussian_data: bad width");
  CauchyData d;
  auto e = [x0, s](double x) { return std::exp(-0.5 * (x - x0) * (x - x0) / (s * s)); };
  if (f_amp != 0.0) {
    d.f = [=](double x) { return f_amp * e(x); };
    d.df = [=](double x) { return -f_amp * (x - x0) / (s * s) * e(x); };
  }
  if (g_amp != 0.0) d.g = [=](double x) { return g_amp * e(x); };
  d.a = x0 - cut * s;
  d.b = x0 + cut * s;
  d.scale = s;
  char buf[128];
  std::snprintf(buf, sizeof buf, "gaussian(x0=%.17g,s=%.17g,f=%.17g,g=%.17g)", x0, s, f_amp, g_amp);
  d.label = buf;
  return d;
}

inline CauchyData indicator_data(double a, double b, double f_amp, double g_amp) {
  require(b > a, ErrorCode::contract_violation, "indicator_data: empty support");
  CauchyData d;
  if (f_amp != 0.0) {
    d.f = [f_amp](double) { return f_amp; };
    d.df = [](double) { return 0.0; };
  }
  if (g_amp != 0.0) d.g = [g_amp](double) { return g_amp; };
  d.a = a;
  d.b = b;
  d.scale = std::min(1.0, b - a);
  char buf[128];
  std::snprintf(buf, sizeof buf, "indicator(a=%.17g,b=%.17g,f=%.17g,g=%.17g)", a, b, f_amp, g_amp);
  d.label = buf;
  return d;
}

namespace detail {

struct Nodes {
  std::vector<double> x, w;
};

// Composite Gauss nodes on [lo, hi] with breaks at the given points.
inline Nodes gauss_nodes(double lo, double hi, std::vector<double> cuts, double width,
                         std::size_t order = 20) {
  Nodes n;
  if (!(hi > lo)) return n;
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::erase_if(cuts, [&](double c) { return c < lo || c > hi; });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const GaussRule& g = gauss_legendre(order);
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    double a = cuts[k - 1], b = cuts[k];
    auto m = static_cast<std::size_t>(std::ceil((b - a) / width));
    double h = (b - a) / static_cast<double>(m);
    for (std::size_t p = 0; p < m; ++p) {
      double pa = a + p * h;
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        n.x.push_back(pa + 0.5 * (g.nodes[q] + 1.0) * h);
        n.w.push_back(0.5 * h * g.weights[q]);
      }
    }
  }
  return n;
}

inline Nodes data_nodes(const CauchyData& d, double width) {
  return gauss_nodes(d.a, d.b, d.kinks, std::min(width, d.scale));
}

}  // namespace detail

inline WeightedNorms weighted_norms(const CauchyData& d, double alpha) {
  WeightedNorms n;
  n.alpha = alpha;
  auto q = detail::data_nodes(d, 0.5);
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    double wt = q.w[i] * std::pow(bracket(q.x[i]), alpha + 1.0);
    n.f += wt * std::abs(d.f_at(q.x[i]));
    n.df += wt * std::abs(d.df_at(q.x[i]));
    n.g += wt * std::abs(d.g_at(q.x[i]));
  }
  return n;
}

// ½[f(x+t) + f(x-t)] + ½ int_{x-t}^{x+t} g.
inline double dalembert(const CauchyData& d, double x, double t) {
  double v = 0.5 * (d.f_at(x + t) + d.f_at(x - t));
  if (d.g) {
    double lo = std::max(std::min(x - t, x + t), d.a), hi = std::min(std::max(x - t, x + t), d.b);
    auto q = detail::gauss_nodes(lo, hi, d.kinks, 0.5 * d.scale);
    double s = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * d.g(q.x[i]);
    v += 0.5 * (t >= 0.0 ? s : -s);
  }
  return v;
}

// ---------------------------------------------------------------- results

enum class Method { spectral, fdtd, dalembert };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::spectral: return "spectral";
    case Method::fdtd: return "fdtd";
    case Method::dalembert: return "dalembert";
  }
  return "?";
}

enum class EvolutionMode { sine, cosine, full };

inline const char* to_string(EvolutionMode m) {
  switch (m) {
    case EvolutionMode::sine: return "sine";
    case EvolutionMode::cosine: return "cosine";
    case EvolutionMode::full: return "full";
  }
  return "?";
}

struct QuadratureReport {
  double truncation_estimate = 0.0;  // bound on the omitted lambda > lambda_max part
  double head = 0.0;                 // contribution of [0, lambda_min]
  std::size_t subpanels = 0;
};

struct EvolutionResult {
  double observer_x = 0.0;
  std::vector<double> times, psi;
  Method method = Method::spectral;
  std::vector<QuadratureReport> quadrature_report;  // spectral only, per time
  // spectral
  double lambda_min = 0.0, lambda_max = 0.0, rolloff_start = 0.0, regime_mismatch = 0.0;
  std::size_t lambda_nodes = 0;
  // fdtd
  double dx = 0.0, dt = 0.0, half_width = 0.0, energy_drift = 0.0;
};

// ---------------------------------------------------------------- oscillatory integrals

enum class Oscillator { sine, cosine };

// Piecewise Chebyshev representation of omega on [grid.lo(), support_end].
// On [0, grid.lo()) omega is replaced by sum_p head[p] lambda^(p-1), p = 0..3,
// and beyond support_end by tail_inverse/lambda (zero for compact weights).
struct OscillatoryWeight {
  PanelGrid grid;
  std::vector<double> values;
  std::array<double, 4> head{};
  double tail_inverse = 0.0;
  double cutoff_delta = 0.0;
  double support_end = 0.0;

  std::span<const double> lambda_grid() const { return grid.nodes(); }
  double operator()(double lambda) const {
    if (lambda > support_end) return tail_inverse / lambda;
    if (lambda < grid.lo()) {
      double s = 0.0;
      for (int p = 0; p < 4; ++p) s += head[p] * std::pow(lambda, p - 1);
      return s;
    }
    return grid.interpolate<double>(values, lambda);
  }
};

inline OscillatoryWeight sample_weight(std::vector<double> breaks,
                                       const std::function<double(double)>& omega,
                                       double cutoff_delta = 0.0) {
  OscillatoryWeight w;
  w.grid = PanelGrid(std::move(breaks));
  w.values.resize(w.grid.size());
  for (std::size_t i = 0; i < w.grid.size(); ++i) w.values[i] = omega(w.grid.x(i));
  w.cutoff_delta = cutoff_delta;
  w.support_end = w.grid.hi();
  return w;
}

// Smooth step: 0 for u <= 0, 1 for u >= 1, C-infinity in between.
inline double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

// chi_delta: 1 on [0, delta/2], 0 beyond delta.
inline double chi_delta(double lambda, double delta) {
  return 1.0 - smooth_step(2.0 * lambda / delta - 1.0);
}

// Geometric panels from lambda_min to delta/2, one blend panel up to delta,
// then panels growing by 1.5 until they reach `width` (a 1/lambda weight
// stays resolved) and uniform ones up to lambda_max.
inline std::vector<double> spectral_breaks(double lambda_min, double delta, double lambda_max,
                                           double width) {
  require(lambda_min > 0.0 && lambda_min < 0.5 * delta && delta < lambda_max && width > 0.0,
          ErrorCode::contract_violation, "spectral_breaks: need 0 < lambda_min < delta/2 < lambda_max");
  std::vector<double> b;
  double top = 0.5 * delta;
  int n = std::max(1, static_cast<int>(std::ceil(std::log2(top / lambda_min))));
  double r = std::pow(top / lambda_min, 1.0 / n);
  for (int k = 0; k < n; ++k) b.push_back(lambda_min * std::pow(r, k));
  b.push_back(top);
  b.push_back(delta);
  double x = delta;
  while (x < lambda_max && 0.5 * x < width) {
    x = std::min(1.5 * x, lambda_max);
    b.push_back(x);
  }
  if (x < lambda_max) {
    int m = std::max(1, static_cast<int>(std::ceil((lambda_max - x) / width)));
    for (int k = 1; k <= m; ++k) b.push_back(x + (lambda_max - x) * k / m);
  }
  return b;
}

namespace detail {

inline constexpr std::size_t kOscGauss = 16;
inline constexpr double kSubpanelBudget = 5e7;

// Sub-panels of at most 1/8 period of the oscillator.
inline std::size_t subpanel_count(double width, double t) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(8.0 * t * width /
                                                                     (2.0 * std::numbers::pi))));
}

inline double osc(Oscillator k, double x) { return k == Oscillator::sine ? std::sin(x) : std::cos(x); }

// int_0^L osc(t lambda) sum_p head[p] lambda^(p-1); lambda^-1 only with sine.
inline double head_integral(const std::array<double, 4>& head, double L, double t, Oscillator k) {
  const GaussRule& g = gauss_legendre(kOscGauss);
  std::size_t m = subpanel_count(L, t);
  double h = L / static_cast<double>(m), s = 0.0;
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      double l = (p + 0.5 * (g.nodes[q] + 1.0)) * h;
      double v = head[1] + l * (head[2] + l * head[3]);
      double o = osc(k, t * l);
      s += 0.5 * h * g.weights[q] * (head[0] * o / l + v * o);
    }
  return s;
}

// int_z^inf sin(u)/u du and int_z^inf cos(u)/u du from the auxiliary
// functions f, g of the sine/cosine integrals (asymptotic series, z >= 40)
// or quadrature of the remainder up to 40.
inline std::pair<double, double> trig_integral_tail(double z) {
  const double zz = std::max(z, 40.0);
  double f = 0.0, g = 0.0, tf = 1.0 / zz, tg = 1.0 / (zz * zz);
  for (int k = 0; k < 40; ++k) {
    f += tf;
    g += tg;
    double nf = -tf * (2.0 * k + 1.0) * (2.0 * k + 2.0) / (zz * zz);
    double ng = -tg * (2.0 * k + 2.0) * (2.0 * k + 3.0) / (zz * zz);
    if (std::abs(nf) > std::abs(tf) || std::abs(nf) < 1e-18 * std::abs(f)) break;
    tf = nf;
    tg = ng;
  }
  double si = f * std::cos(zz) + g * std::sin(zz);
  double ci = -f * std::sin(zz) + g * std::cos(zz);
  if (z < zz) {
    const GaussRule& gr = gauss_legendre(kOscGauss);
    auto m = static_cast<std::size_t>(std::ceil(zz - z));
    double h = (zz - z) / static_cast<double>(m);
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
        double u = z + (p + 0.5 * (gr.nodes[q] + 1.0)) * h;
        si += 0.5 * h * gr.weights[q] * std::sin(u) / u;
        ci += 0.5 * h * gr.weights[q] * std::cos(u) / u;
      }
  }
  return {si, ci};
}

}  // namespace detail

// int_0^inf osc(t lambda) omega(lambda) d lambda for t >= 0, exact for the
// piecewise polynomial omega up to the Gauss error of <= 1/8-period sub-panels.
inline double oscillatory_integral(const OscillatoryWeight& w, double t,
                                   Oscillator kind = Oscillator::sine,
                                   std::size_t* subpanels = nullptr) {
  require(t >= 0.0, ErrorCode::contract_violation, "oscillatory_integral: t must be >= 0");
  require(kind == Oscillator::sine || w.head[0] == 0.0, ErrorCode::contract_violation,
          "oscillatory_integral: 1/lambda head only with the sine oscillator");
  if (kind == Oscillator::sine && t == 0.0) return 0.0;
  require(w.tail_inverse == 0.0 || t > 0.0, ErrorCode::contract_violation,
          "oscillatory_integral: 1/lambda tail diverges at t = 0");
  const PanelGrid& gr = w.grid;
  double budget = 0.0;
  for (std::size_t p = 0; p < gr.panels(); ++p)
    budget += static_cast<double>(detail::subpanel_count(gr.width(p), t));
  if (budget > detail::kSubpanelBudget) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "oscillatory_integral: t*support_end = %.3g needs %.3g sub-panels (budget %.3g)",
                  t * w.support_end, budget, detail::kSubpanelBudget);
    throw Error(ErrorCode::non_convergence, buf);
  }
  const GaussRule& g = gauss_legendre(detail::kOscGauss);
  const auto& rule = PanelRule::get();
  double total = w.head != std::array<double, 4>{} ? detail::head_integral(w.head, gr.lo(), t, kind) : 0.0;
  std::size_t used = 0;
  for (std::size_t p = 0; p < gr.panels(); ++p) {
    double a = gr.breaks()[p], b = gr.breaks()[p + 1];
    if (a >= w.support_end) break;
    std::span<const double> v(w.values.data() + PanelGrid::index(p, 0), kPanelNodes);
    std::size_t m = detail::subpanel_count(b - a, t);
    used += m;
    double h = 2.0 / static_cast<double>(m), panel_sum = 0.0;
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        double u = -1.0 + (s + 0.5 * (g.nodes[q] + 1.0)) * h;
        auto l = rule.basis(u);
        double om = 0.0;
        for (std::size_t j = 0; j < kPanelNodes; ++j) om += l[j] * v[j];
        double lam = a + 0.5 * (u + 1.0) * (b - a);
        panel_sum += 0.5 * h * g.weights[q] * om * detail::osc(kind, t * lam);
      }
    total += 0.5 * (b - a) * panel_sum;
  }
  if (w.tail_inverse != 0.0) {
    auto [si, ci] = detail::trig_integral_tail(t * w.support_end);
    total += w.tail_inverse * (kind == Oscillator::sine ? si : ci);
  }
  if (subpanels) *subpanels = used;
  return total;
}

inline double oscillatory_integral_cos(const OscillatoryWeight& w, double t,
                                       std::size_t* subpanels = nullptr) {
  return oscillatory_integral(w, t, Oscillator::cosine, subpanels);
}

// ---------------------------------------------------------------- spectral evolution

struct SpectralEvolutionOptions {
  SpectralOptions spectral;
  double lambda_min = 1e-6;
  double panel_width = 0.0;   // lambda panels above delta; 0: 2/(|x_obs| + support radius), at most 0.25
  double lambda_max = 0.0;    // 0: smallest lambda where the data's Fourier content < fourier_tol
  double fourier_tol = 1e-10;
  // The weight is rolled off smoothly over [lambda_max, lambda_max + rolloff]. A
  // potential of finite smoothness leaves an algebraic tail in Im G that a hard
  // cut would turn into a spurious cos(t Lambda)/t term.
  double rolloff = 2.0;
  double lambda_cap = 40.0;
  double x_panel_width = 0.5;
  int threads = 0;
};

namespace detail {

inline double fourier_cutoff(const CauchyData& d, const Nodes& q, double step, double tol,
                             double cap) {
  double nf = 0.0, ng = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    nf += q.w[i] * std::abs(d.f_at(q.x[i]));
    ng += q.w[i] * std::abs(d.g_at(q.x[i]));
  }
  auto content = [&](double lam) {
    cplx F = 0.0, G = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      cplx e = q.w[i] * std::exp(I * (lam * q.x[i]));
      F += e * d.f_at(q.x[i]);
      G += e * d.g_at(q.x[i]);
    }
    return std::max(nf > 0 ? std::abs(F) / nf : 0.0, ng > 0 ? std::abs(G) / ng : 0.0);
  };
  int below = 0;
  for (double lam = step;; lam += step) {
    require(lam <= cap, ErrorCode::sizing,
            "evolve_spectral: data Fourier content does not fall below tolerance before the "
            "lambda cap; give lambda_max explicitly");
    below = content(lam) < tol ? below + 1 : 0;
    if (below == 2) return lam;
  }
}

}  // namespace detail

inline EvolutionResult evolve_spectral(const PotentialModel& model, const CauchyData& data,
                                       double observer_x, const std::vector<double>& times,
                                       EvolutionMode mode = EvolutionMode::sine,
                                       const SpectralEvolutionOptions& opt = {}) {
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], ErrorCode::contract_violation,
            "evolve_spectral: times must increase");
  if (!opt.spectral.allow_resonant) {
    auto z = resonance_and_bound_states(model, opt.spectral.low);
    require(!z.resonant, ErrorCode::hypothesis_violation,
            "evolve_spectral: model is resonant at zero energy");
    require(z.bound_states == 0, ErrorCode::hypothesis_violation,
            "evolve_spectral: model has bound states");
  }
  const bool use_g = mode != EvolutionMode::cosine && data.g;
  const bool use_f = mode != EvolutionMode::sine && data.f;
  const double delta = opt.spectral.delta;

  auto xq = detail::data_nodes(data, opt.x_panel_width);
  std::vector<double> gv(xq.x.size()), fv(xq.x.size());
  for (std::size_t i = 0; i < xq.x.size(); ++i) {
    gv[i] = use_g ? xq.w[i] * data.g_at(xq.x[i]) : 0.0;
    fv[i] = use_f ? xq.w[i] * data.f_at(xq.x[i]) : 0.0;
  }
  // H(lambda) oscillates like exp(i lambda (|x_obs| + |x'|)); keep one radian
  // of phase per half panel.
  const double radius = std::max(std::abs(data.a), std::abs(data.b));
  const double width =
      opt.panel_width > 0.0 ? opt.panel_width : std::min(0.25, 2.0 / (std::abs(observer_x) + radius));
  double lcut = opt.lambda_max;
  if (lcut <= 0.0) lcut = detail::fourier_cutoff(data, xq, width, opt.fourier_tol, opt.lambda_cap);
  lcut = std::max(lcut, 2.0 * delta);
  const double lmax = lcut + opt.rolloff;
  auto window = [&](double lam) {
    return opt.rolloff > 0.0 ? 1.0 - smooth_step((lam - lcut) / opt.rolloff) : 1.0;
  };

  double reach = std::max(radius, std::abs(observer_x)) + 1.0;
  SpectralContext ctx(model, opt.spectral, reach);
  const std::vector<double> pts{data.a, data.b, observer_x};

  std::vector<double> breaks = spectral_breaks(opt.lambda_min, delta, lcut, width);
  if (opt.rolloff > 0.0) {
    int m = std::max(1, static_cast<int>(std::ceil(opt.rolloff / width)));
    for (int k = 1; k <= m; ++k) breaks.push_back(lcut + opt.rolloff * k / m);
  }
  PanelGrid grid(std::move(breaks));
  const std::size_t n = grid.size();
  std::vector<double> Hg(n), Hf(n), mismatch(n, 0.0), omitted(n, 0.0);
  auto project = [&](Regime r, double lam, double& hg, double& hf) {
    auto k = kernel_at(ctx, lam, r, pts);
    hg = hf = 0.0;
    for (std::size_t i = 0; i < xq.x.size(); ++i) {
      if (gv[i] == 0.0 && fv[i] == 0.0) continue;
      double im = k.G(observer_x, xq.x[i]).imag();
      hg += im * gv[i];
      hf += im * fv[i];
    }
  };
  // Unique nodes only; panel endpoints are shared.
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < n; ++i)
    if (i % kPanelNodes != 0 || i == 0) work.push_back(i);
  parallel_for(work.size(), [&](std::size_t w) {
    std::size_t i = work[w];
    double lam = grid.x(i);
    double c = chi_delta(lam, delta);
    double mg = 0, mf = 0, dg = 0, df = 0;
    if (c > 0.0) project(Regime::low_matched, lam, mg, mf);
    if (c < 1.0) project(Regime::direct_jost, lam, dg, df);
    double hg = c * mg + (1.0 - c) * dg, hf = c * mf + (1.0 - c) * df;
    double win = window(lam);
    Hg[i] = win * hg;
    Hf[i] = win * hf;
    omitted[i] = (1.0 - win) * (std::abs(hg) + lam * std::abs(hf));
    if (c > 0.0 && c < 1.0) mismatch[i] = std::abs(mg - dg) + std::abs(mf - df);
  }, opt.threads);
  for (std::size_t i = kPanelNodes; i < n; i += kPanelNodes) {
    Hg[i] = Hg[i - 1];
    Hf[i] = Hf[i - 1];
    omitted[i] = omitted[i - 1];
  }
  // L1 mass of the rolled-off part plus a one-panel extension of the edge value.
  double omitted_l1 = 0.0;
  {
    const auto& rule = PanelRule::get();
    for (std::size_t p = 0; p < grid.panels(); ++p)
      for (std::size_t j = 0; j < kPanelNodes; ++j)
        omitted_l1 += 0.5 * grid.width(p) * rule.cumulative[kPanelDegree][j] * omitted[PanelGrid::index(p, j)];
  }

  // Sine weight H_g ~ A/lambda + B lambda, cosine weight lambda H_f ~ A + B lambda^2
  // below lambda_min, fitted on the first panel's end points.
  const double l0 = grid.x(0), l1 = grid.x(kPanelDegree);
  OscillatoryWeight ws, wc;
  ws.grid = wc.grid = grid;
  ws.values = Hg;
  wc.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) wc.values[i] = grid.x(i) * Hf[i];
  ws.support_end = wc.support_end = lmax;
  ws.cutoff_delta = wc.cutoff_delta = delta;
  {
    double y0 = l0 * Hg[0], y1 = l1 * Hg[kPanelDegree];
    double B = (y1 - y0) / (l1 * l1 - l0 * l0);
    ws.head = {y0 - B * l0 * l0, 0.0, B, 0.0};
    double z0 = wc.values[0], z1 = wc.values[kPanelDegree];
    double Bc = (z1 - z0) / (l1 * l1 - l0 * l0);
    wc.head = {0.0, z0 - Bc * l0 * l0, 0.0, Bc};
  }

  EvolutionResult res;
  res.observer_x = observer_x;
  res.method = Method::spectral;
  res.times = times;
  res.psi.assign(times.size(), 0.0);
  res.quadrature_report.resize(times.size());
  res.lambda_min = opt.lambda_min;
  res.lambda_max = lmax;
  res.rolloff_start = lcut;
  res.lambda_nodes = work.size();
  res.regime_mismatch = *std::max_element(mismatch.begin(), mismatch.end());
  const double pre = -2.0 / std::numbers::pi;
  const double tail_s = std::abs(Hg[n - 1]), tail_c = std::abs(wc.values[n - 1]);
  const double edge = grid.width(grid.panels() - 1);
  parallel_for(times.size(), [&](std::size_t k) {
    double t = std::abs(times[k]), sg = times[k] < 0.0 ? -1.0 : 1.0;
    QuadratureReport& qr = res.quadrature_report[k];
    double s = 0.0;
    std::size_t used = 0;
    if (use_g) {
      s += sg * oscillatory_integral(ws, t, Oscillator::sine, &used);
      qr.head += sg * detail::head_integral(ws.head, l0, t, Oscillator::sine);
    }
    qr.subpanels = used;
    if (use_f) {
      s += oscillatory_integral(wc, t, Oscillator::cosine, &used);
      qr.head += detail::head_integral(wc.head, l0, t, Oscillator::cosine);
      qr.subpanels += used;
    }
    res.psi[k] = pre * s;
    qr.head *= pre;
    double reach_t = t > 0.0 ? std::min(edge, 2.0 / t) : edge;
    qr.truncation_estimate = -pre * (omitted_l1 + (tail_s + tail_c) * reach_t);
  }, opt.threads);
  return res;
}

// ---------------------------------------------------------------- FDTD

struct FdtdOptions {
  double memory_budget_bytes = 2e9;
  std::size_t energy_stride = 50;
};

// Leapfrog on a grid anchored at the observer; Dirichlet ends placed beyond
// the domain of dependence of the observer.
inline EvolutionResult evolve_fdtd(const PotentialModel& model, const CauchyData& data,
                                   double observer_x, double t_max, double dx,
                                   const FdtdOptions& opt = {}) {
  require(dx > 0.0 && t_max > 0.0, ErrorCode::contract_violation, "evolve_fdtd: need dx > 0, t_max > 0");
  const double dt = 0.9 * dx;
  const double radius = std::max(std::abs(data.a), std::abs(data.b));
  const double L = std::abs(observer_x) + t_max + radius + 10.0;
  const auto kl = static_cast<std::size_t>(std::ceil((observer_x + L) / dx));
  const auto kr = static_cast<std::size_t>(std::ceil((L - observer_x) / dx));
  const std::size_t N = kl + kr + 1;
  const double bytes = 4.0 * 8.0 * static_cast<double>(N);
  if (bytes > opt.memory_budget_bytes) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "evolve_fdtd: %.3g bytes exceeds the %.3g budget; try dx >= %.3g",
                  bytes, opt.memory_budget_bytes, dx * bytes / opt.memory_budget_bytes);
    throw Error(ErrorCode::sizing, buf);
  }
  auto X = [&](std::size_t i) {
    return observer_x + (static_cast<double>(i) - static_cast<double>(kl)) * dx;
  };
  std::vector<double> V(N), prev(N), cur(N), next(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double x = X(i);
    V[i] = model(x);
    prev[i] = data.f_at(x);
  }
  const double r = dt * dt / (dx * dx);
  auto lap = [&](const std::vector<double>& u, std::size_t i) {
    return (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (dx * dx) - V[i] * u[i];
  };
  // Taylor start: psi(dt) = f + dt g + dt^2/2 Af + dt^3/6 Ag with A = d_xx - V.
  std::vector<double> gg(N);
  for (std::size_t i = 0; i < N; ++i) gg[i] = data.g_at(X(i));
  cur[0] = cur[N - 1] = 0.0;
  for (std::size_t i = 1; i + 1 < N; ++i)
    cur[i] = prev[i] + dt * gg[i] + 0.5 * dt * dt * lap(prev, i) + dt * dt * dt / 6.0 * lap(gg, i);

  auto energy = [&](const std::vector<double>& a, const std::vector<double>& b) {
    // ||(b-a)/dt||^2 + <A b, a>, conserved exactly by the leapfrog scheme
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < N; ++i) {
      double v = (b[i] - a[i]) / dt;
      e += v * v + (b[i + 1] - b[i]) * (a[i + 1] - a[i]) / (dx * dx) + V[i] * a[i] * b[i];
    }
    return e * dx;
  };

  EvolutionResult res;
  res.observer_x = observer_x;
  res.method = Method::fdtd;
  res.dx = dx;
  res.dt = dt;
  res.half_width = L;
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt));
  res.times.reserve(steps + 1);
  res.psi.reserve(steps + 1);
  res.times.push_back(0.0);
  res.psi.push_back(prev[kl]);
  res.times.push_back(dt);
  res.psi.push_back(cur[kl]);
  const double e0 = energy(prev, cur);
  double drift = 0.0;
  for (std::size_t n = 2; n <= steps; ++n) {
    for (std::size_t i = 1; i + 1 < N; ++i)
      next[i] = 2.0 * cur[i] - prev[i] + r * (cur[i - 1] - 2.0 * cur[i] + cur[i + 1]) -
                dt * dt * V[i] * cur[i];
    std::swap(prev, cur);
    std::swap(cur, next);
    res.times.push_back(static_cast<double>(n) * dt);
    res.psi.push_back(cur[kl]);
    if (n % opt.energy_stride == 0 && e0 != 0.0)
      drift = std::max(drift, std::abs(energy(prev, cur) / e0 - 1.0));
  }
  res.energy_drift = drift;
  return res;
}

inline EvolutionResult evolve_dalembert(const CauchyData& data, double observer_x,
                                        const std::vector<double>& times) {
  EvolutionResult r;
  r.observer_x = observer_x;
  r.method = Method::dalembert;
  r.times = times;
  for (double t : times) r.psi.push_back(dalembert(data, observer_x, t));
  return r;
}

}  // namespace jostlab
