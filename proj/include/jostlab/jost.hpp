#pragma once

// Jost solutions f_pm(x, lambda) ~ exp(+-i lambda x) through the oscillation
// free profiles m_pm = exp(-+i lambda x) f_pm and their Volterra equation
//   m_+(x) = 1 + (2i lambda)^-1 int_x^inf (exp(2i lambda (y-x)) - 1) V m_+ dy.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "jostlab/error.hpp"
#include "jostlab/panels.hpp"
#include "jostlab/potential.hpp"

namespace jostlab {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

struct JostOptions {
  double tol = 1e-12;
  int max_iterations = 50;
  double xmax = 0.0;  // 0: automatic
  double lambda_floor = 1e-8;
};

// Grid requirements beyond the defining half line.
struct GridSpec {
  std::vector<double> points;  // positions that must be grid nodes
  double reach = 0.0;          // extend the grid this far past the origin
};

struct JostData {
  double lambda = 0.0;
  int sign = 1;
  double alpha = 0.0;
  PanelGrid grid;
  std::vector<cplx> m_values;
  std::vector<cplx> m_deriv;
  double truncation_point = 0.0;
  int iteration_count = 0;
  double residual_norm = 0.0;
  double tol = 0.0;
  const char* interpolation = "chebyshev_lobatto_panel_deg16";

  cplx m(double x) const { return grid.interpolate<cplx>(m_values, x); }
  cplx dm(double x) const { return grid.interpolate<cplx>(m_deriv, x); }
};

// int_X^inf exp(i k y) y^-alpha dy for k > 0, X > 0: Gauss panels up to
// kY = 60, then the integration-by-parts asymptotic series.
inline cplx oscillatory_power_tail(double k, double X, double alpha) {
  cplx sum = 0.0;
  double Y = std::max(X, 60.0 / k);
  if (Y > X) {
    const GaussRule& g = gauss_legendre(20);
    double a = X;
    while (a < Y) {
      double b = std::min(Y, a + std::min(0.25 * a, std::numbers::pi / (2.0 * k)));
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        double y = a + 0.5 * (g.nodes[q] + 1.0) * (b - a);
        sum += 0.5 * (b - a) * g.weights[q] * std::exp(I * (k * y)) * std::pow(y, -alpha);
      }
      a = b;
    }
  }
  cplx ik = I * k;
  cplx term = -std::exp(I * (k * Y)) * std::pow(Y, -alpha) / ik;
  cplx asym = 0.0;
  double prev = std::abs(term) * 2.0;
  for (int n = 0; n < 200; ++n) {
    double mag = std::abs(term);
    if (mag > prev) break;
    asym += term;
    if (mag < 1e-18 * std::abs(asym)) break;
    prev = mag;
    term *= (alpha + n) / (ik * Y);
  }
  return sum + asym;
}

// Truncation point. Besides the turning point and oscillation scale, the
// neglected second Born term of the tail, ~ (c X^{1-alpha} / ((alpha-1) 2 lambda))^2,
// must stay below tol / 10.
inline double jost_truncation(const PotentialModel& m, int sign, double lambda,
                              const JostOptions& opt) {
  if (opt.xmax > 0.0) return opt.xmax;
  if (m.tail(sign) == TailKind::power) {
    double c = std::abs(m.asymptotic_amplitude(sign));
    double a = m.alpha;
    double born = std::pow(c / ((a - 1.0) * 2.0 * lambda * std::sqrt(0.1 * opt.tol)), 1.0 / (a - 1.0));
    return std::max({m.xmax_floor, 50.0 * std::pow(lambda, -2.0 / a), 10.0 / lambda, born});
  }
  if (m.tail(sign) == TailKind::exponential) return std::abs(m.cut(sign));
  return 10.0;
}

struct TailIntegrals {
  cplx oscillatory;  // int_X^inf exp(i k y) w(y) dy
  double plain = 0;  // int_X^inf w(y) dy
};

// Tail integrals of a power-decaying w ~ c(y) y^-alpha. Quadrature is done on
// the true w until the remaining amplitude is frozen, so slowly varying
// corrections (log terms) are kept.
inline TailIntegrals tail_integrals(const std::function<double(double)>& w, double k, double X,
                                    double alpha) {
  TailIntegrals t;
  const GaussRule& g = gauss_legendre(20);
  auto panels = [&](double a, double Y, double kk, auto&& f) {
    while (a < Y) {
      double b = std::min(Y, a + std::min(0.25 * a, kk > 0 ? std::numbers::pi / (2.0 * kk) : 1e300));
      for (std::size_t q = 0; q < g.nodes.size(); ++q)
        f(a + 0.5 * (g.nodes[q] + 1.0) * (b - a), 0.5 * (b - a) * g.weights[q]);
      a = b;
    }
  };
  double Y = std::max(X, 60.0 / k);
  panels(X, Y, k, [&](double y, double wt) { t.oscillatory += wt * std::exp(I * (k * y)) * w(y); });
  t.oscillatory += w(Y) * std::pow(Y, alpha) * oscillatory_power_tail(k, Y, alpha);
  double Z = 1e4 * X;
  panels(X, Z, 0.0, [&](double y, double wt) { t.plain += wt * w(y); });
  t.plain += w(Z) * Z / (alpha - 1.0);
  return t;
}

namespace detail {

// Panel width bound shared by the Jost and low-energy grids.
inline double panel_width(double x, double lambda) {
  double w = std::max(0.5, 0.25 * std::abs(x));
  if (lambda > 0.0) w = std::min(w, std::numbers::pi / (2.0 * lambda));
  return w;
}

inline std::vector<double> standard_breakpoints() { return {-2.0, -1.0, 0.0, 1.0, 2.0}; }

// Right Jost profile of potential w on [lo, X] by block Picard marching
// from X towards lo.
inline JostData solve_right(const std::function<double(double)>& w, TailKind tail, double c,
                            double alpha, double lambda, double lo, double X,
                            std::vector<double> required, const JostOptions& opt) {
  JostData jd;
  jd.lambda = lambda;
  jd.alpha = alpha;
  jd.truncation_point = X;
  jd.tol = opt.tol;
  auto breaks = build_breaks(lo, X, std::move(required),
                             [lambda](double x) { return panel_width(x, lambda); });
  jd.grid = PanelGrid(std::move(breaks));
  const PanelGrid& g = jd.grid;
  const std::size_t n = g.size();
  const double th = 2.0 * lambda;

  std::vector<double> vv(n), s(n), co(n), ve(n);
  std::vector<cplx> tail_v(n, 0.0), tail_d(n, 0.0);
  TailIntegrals ti;
  const bool power_tail = tail == TailKind::power && c != 0.0;
  if (power_tail) ti = tail_integrals(w, th, X, alpha);
  for (std::size_t i = 0; i < n; ++i) {
    double x = g.x(i);
    vv[i] = w(x);
    s[i] = std::sin(th * x) / th;
    co[i] = std::cos(th * x);
    double sh = std::sin(0.5 * th * x);
    ve[i] = 2.0 * sh * sh / th;
    if (power_tail) {
      cplx ph = std::exp(-I * (th * x));
      tail_v[i] = (ph * ti.oscillatory - ti.plain) / (I * th);
      tail_d[i] = -ph * ti.oscillatory;
    }
  }

  jd.m_values.assign(n, 1.0);
  jd.m_deriv.assign(n, 0.0);
  const auto& rule = PanelRule::get();
  cplx As = 0.0, Ac = 0.0, Av = 0.0;  // int_b^inf of q V m for the current panel end b
  std::array<cplx, kPanelNodes> mloc, fs, fc, fv;
  int worst_iter = 0;
  double worst_change = 0.0;

  for (std::size_t p = g.panels(); p-- > 0;) {
    const double h = g.width(p);
    const std::size_t base = PanelGrid::index(p, 0);
    for (std::size_t i = 0; i < kPanelNodes; ++i) mloc[i] = jd.m_values[base + kPanelDegree];
    if (p + 1 == g.panels())
      for (std::size_t i = 0; i < kPanelNodes; ++i) mloc[i] = 1.0 + tail_v[base + i];
    std::array<cplx, kPanelNodes> Ls, Lc, Lv;
    int it = 0;
    double change = 0.0;
    for (; it < opt.max_iterations; ++it) {
      for (std::size_t j = 0; j < kPanelNodes; ++j) {
        cplx vm = vv[base + j] * mloc[j];
        fs[j] = s[base + j] * vm;
        fc[j] = co[base + j] * vm;
        fv[j] = ve[base + j] * vm;
      }
      change = 0.0;
      double scale = 1.0;
      cplx Ts = 0.0, Tc = 0.0, Tv = 0.0;
      for (std::size_t j = 0; j < kPanelNodes; ++j) {
        Ts += rule.cumulative[kPanelDegree][j] * fs[j];
        Tc += rule.cumulative[kPanelDegree][j] * fc[j];
        Tv += rule.cumulative[kPanelDegree][j] * fv[j];
      }
      for (std::size_t i = 0; i < kPanelNodes; ++i) {
        cplx cs = 0.0, cc = 0.0, cv = 0.0;
        for (std::size_t j = 0; j < kPanelNodes; ++j) {
          cs += rule.cumulative[i][j] * fs[j];
          cc += rule.cumulative[i][j] * fc[j];
          cv += rule.cumulative[i][j] * fv[j];
        }
        Ls[i] = As + 0.5 * h * (Ts - cs);
        Lc[i] = Ac + 0.5 * h * (Tc - cc);
        Lv[i] = Av + 0.5 * h * (Tv - cv);
        const std::size_t k = base + i;
        cplx mn = 1.0 + tail_v[k] + co[k] * Ls[i] - s[k] * Lc[i] +
                  I * (Lv[i] + ve[k] * Lc[i] - th * s[k] * Ls[i]);
        change = std::max(change, std::abs(mn - mloc[i]));
        scale = std::max(scale, std::abs(mn));
        mloc[i] = mn;
      }
      if (change <= 1e-2 * opt.tol * scale) break;
    }
    if (it == opt.max_iterations)
      throw Error(ErrorCode::non_convergence,
                  "solve_m: Picard iteration did not converge on panel " + std::to_string(p) +
                      " (residual " + std::to_string(change) + ")");
    worst_iter = std::max(worst_iter, it + 1);
    worst_change = std::max(worst_change, change);
    for (std::size_t i = 0; i < kPanelNodes; ++i) {
      const std::size_t k = base + i;
      jd.m_values[k] = mloc[i];
      jd.m_deriv[k] = tail_d[k] - (co[k] * Lc[i] + th * th * s[k] * Ls[i]) -
                      I * th * (co[k] * Ls[i] - s[k] * Lc[i]);
    }
    As = Ls[0];
    Ac = Lc[0];
    Av = Lv[0];
  }
  jd.iteration_count = worst_iter;
  jd.residual_norm = worst_change;
  return jd;
}

inline JostData reflect(JostData jd) {
  std::vector<double> br = jd.grid.breaks();
  for (auto& b : br) b = -b;
  std::reverse(br.begin(), br.end());
  jd.grid = PanelGrid(std::move(br));
  std::reverse(jd.m_values.begin(), jd.m_values.end());
  std::reverse(jd.m_deriv.begin(), jd.m_deriv.end());
  for (auto& d : jd.m_deriv) d = -d;
  jd.truncation_point = -jd.truncation_point;
  return jd;
}

}  // namespace detail

// Solves for m_sign(., lambda) on the half line sign*x >= 0 (plus
// grid.reach past the origin and any requested points).
inline JostData solve_m(const PotentialModel& model, int sign, double lambda,
                        const GridSpec& spec = {}, const JostOptions& opt = {}) {
  require(lambda > 0.0, ErrorCode::contract_violation, "solve_m: lambda must be positive");
  require(lambda >= opt.lambda_floor, ErrorCode::regime,
          "solve_m: lambda below the direct Jost floor; use the low-energy representation");
  require(sign == 1 || sign == -1, ErrorCode::contract_violation, "solve_m: sign must be +-1");
  double X = jost_truncation(model, sign, lambda, opt);
  std::vector<double> req = detail::standard_breakpoints();
  req.push_back(std::pow(lambda, -2.0 / model.alpha));
  double lo = -spec.reach;
  for (double p : spec.points) {
    double q = sign * p;
    req.push_back(q);
    lo = std::min(lo, q);
    X = std::max(X, q);
  }
  std::function<double(double)> w;
  if (sign > 0) w = model.value_fn;
  else w = [f = model.value_fn](double x) { return f(-x); };
  JostData jd = detail::solve_right(w, model.tail(sign), model.asymptotic_amplitude(sign),
                                    model.alpha, lambda, lo, X, std::move(req), opt);
  jd.sign = sign;
  return sign > 0 ? jd : detail::reflect(std::move(jd));
}

struct JostValue {
  cplx f;
  cplx df;
};

inline JostValue jost_eval(const JostData& jd, double x) {
  require(jd.grid.contains(x), ErrorCode::out_of_range,
          "jost_eval: x outside the solved grid (extrapolation refused)");
  cplx m = jd.m(x), dm = jd.dm(x);
  double sg = jd.sign;
  cplx ph = std::exp(I * (sg * jd.lambda * x));
  return {ph * m, ph * (I * (sg * jd.lambda) * m + dm)};
}

// Sup-norm defect of the Volterra equation for stored profiles, using an
// independent composite Gauss-Legendre pass over the spectral interpolant.
inline double volterra_defect(const PotentialModel& model, const JostData& jd,
                              std::size_t samples = 12) {
  const PanelGrid& g = jd.grid;
  const double lam = jd.lambda;
  const GaussRule& gl = gauss_legendre(24);
  double worst = 0.0;
  double X = jd.sign > 0 ? g.hi() : g.lo();
  std::vector<double> probes;
  for (std::size_t k = 0; k < samples; ++k) {
    std::size_t p = (k * g.panels()) / samples;
    probes.push_back(0.5 * (g.breaks()[p] + g.breaks()[p + 1]));
  }
  const double c = model.asymptotic_amplitude(jd.sign);
  TailIntegrals ti;
  const bool power_tail = model.tail(jd.sign) == TailKind::power && c != 0.0;
  if (power_tail) {
    const int sg = jd.sign;
    ti = tail_integrals([&model, sg](double y) { return model(sg * y); }, 2.0 * lam,
                        std::abs(X), model.alpha);
  }
  for (double x : probes) {
    // Integrate over the sign-direction half of the grid beyond x.
    cplx acc = 0.0;
    for (std::size_t p = 0; p < g.panels(); ++p) {
      double a = g.breaks()[p], b = g.breaks()[p + 1];
      if (jd.sign > 0) { if (b <= x) continue; a = std::max(a, x); }
      else { if (a >= x) continue; b = std::min(b, x); }
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        double y = a + 0.5 * (gl.nodes[q] + 1.0) * (b - a);
        double d = std::abs(y - x);
        double ph = 2.0 * lam * d;
        cplx ker = (ph < 1e-3)
                       ? d * (1.0 + I * (0.5 * ph) - ph * ph / 6.0 - I * (ph * ph * ph / 24.0))
                       : (std::exp(I * ph) - 1.0) / (2.0 * I * lam);
        acc += 0.5 * (b - a) * gl.weights[q] * ker * model(y) * jd.m(y);
      }
    }
    double ux = jd.sign * x;
    cplx tail = 0.0;
    if (power_tail)
      tail = (std::exp(-I * (2.0 * lam * ux)) * ti.oscillatory - ti.plain) / (2.0 * I * lam);
    cplx rhs = 1.0 + acc + tail;
    worst = std::max(worst, std::abs(rhs - jd.m(x)) / std::max(1.0, std::abs(jd.m(x))));
  }
  return worst;
}

struct TurningPointReport {
  double lambda = 0.0;
  double mu = 0.0;
  int sign = 1;
  cplx f_value, f_deriv;
  cplx predicted_value, predicted_deriv;
  cplx residual_value, residual_deriv;
};

inline double turning_mu(double lambda, double alpha) { return std::pow(lambda, 1.0 - 2.0 / alpha); }

// Closed-form small-lambda expansions of f(x_tp) and f'(x_tp), without remainder.
inline cplx predicted_jost_value(double alpha, double c, double mu) {
  if (alpha == 3.0)
    return 1.0 + I * mu + 0.5 * (c - 1.0) * mu * mu - I * c * mu * mu * mu * std::log(mu);
  return 1.0 + I * mu + (c / ((alpha - 1.0) * (alpha - 2.0)) - 0.5) * mu * mu +
         I * (c / ((alpha - 2.0) * (alpha - 3.0)) - 1.0 / 6.0) * mu * mu * mu;
}

inline cplx predicted_jost_deriv_bracket(double alpha, double c, double mu) {
  return I * mu - (c / (alpha - 1.0) + 1.0) * mu * mu -
         I * (c / (alpha - 2.0) + 0.5) * mu * mu * mu;
}

inline TurningPointReport turning_point_residual(const PotentialModel& model, double lambda,
                                                 int sign = 1, const JostOptions& opt = {}) {
  const double xt = std::pow(lambda, -2.0 / model.alpha);
  double X = jost_truncation(model, sign, lambda, opt);
  require(xt <= X || model.tail(sign) != TailKind::power, ErrorCode::out_of_range,
          "turning point beyond grid; increase xmax");
  JostData jd = solve_m(model, sign, lambda, {{sign * xt}}, opt);
  TurningPointReport r;
  r.lambda = lambda;
  r.sign = sign;
  r.mu = turning_mu(lambda, model.alpha);
  auto v = jost_eval(jd, sign * xt);
  r.f_value = v.f;
  r.f_deriv = v.df;
  const double c = model.asymptotic_amplitude(sign);
  r.predicted_value = predicted_jost_value(model.alpha, c, r.mu);
  r.predicted_deriv = sign * std::pow(lambda, 2.0 / model.alpha) *
                      predicted_jost_deriv_bracket(model.alpha, c, r.mu);
  r.residual_value = r.f_value - r.predicted_value;
  r.residual_deriv = r.f_deriv - r.predicted_deriv;
  return r;
}

}  // namespace jostlab
