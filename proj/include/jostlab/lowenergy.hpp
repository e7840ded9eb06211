#pragma once

// Zero-energy fundamental systems {u_0, u_1} of -u'' + V u = 0 and their
// perturbations u_j(., lambda) for small lambda, valid on |x| <= 1/lambda.
// Everything is solved in the reflected coordinate s = sign * x >= 0 and
// mirrored back at the end, so only the "+" construction exists below.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "jostlab/error.hpp"
#include "jostlab/jost.hpp"
#include "jostlab/panels.hpp"
#include "jostlab/potential.hpp"

namespace jostlab {

struct LowEnergyOptions {
  double tol = 1e-12;
  int max_iterations = 60;
  double xmax = 1e7;    // zero-energy grid end (power tails)
  double reach = 0.0;   // extend this far past the origin
  double lambda0 = 0.1;
};

struct ZeroEnergySystem {
  int sign = 1;
  double alpha = 0.0;
  double c = 0.0;
  PanelGrid grid;
  std::vector<double> u1_values, u1_deriv, u0_values, u0_deriv;
  double x1 = 0.0;
  double alpha_const = 0.0;

  double u0(double x) const { return grid.interpolate<double>(u0_values, x); }
  double du0(double x) const { return grid.interpolate<double>(u0_deriv, x); }
  double u1(double x) const { return grid.interpolate<double>(u1_values, x); }
  double du1(double x) const { return grid.interpolate<double>(u1_deriv, x); }
  double wronskian(double x) const { return u0(x) * du1(x) - du0(x) * u1(x); }
};

struct PerturbedSystem {
  double lambda = 0.0;
  int sign = 1;
  int j = 1;
  PanelGrid grid;
  std::vector<double> values, deriv;
  const char* kernel_tag = "K1";

  double u(double x) const { return grid.interpolate<double>(values, x); }
  double du(double x) const { return grid.interpolate<double>(deriv, x); }
};

namespace detail {

struct RealProfile {
  std::vector<double> v, d;
};

// Mirror x -> -x: values keep, derivatives flip.
inline PanelGrid mirror(const PanelGrid& g) {
  std::vector<double> br = g.breaks();
  for (auto& b : br) b = -b;
  std::reverse(br.begin(), br.end());
  return PanelGrid(std::move(br));
}

inline void mirror(std::vector<double>& v, bool derivative) {
  std::reverse(v.begin(), v.end());
  if (derivative)
    for (auto& x : v) x = -x;
}

// u'' = q u marched panel by panel from break `b`, in direction dir (+1
// towards hi, -1 towards lo), starting from Cauchy data (u, du) at that
// break. Each panel is a Picard iteration of the Taylor-remainder form
//   u(x) = u(a) + u'(a)(x-a) + int_a^x (x-y) q u dy.
inline void march_cauchy(const PanelGrid& g, std::span<const double> q, std::size_t b, int dir,
                         double u, double du, RealProfile& out, double tol, int max_it) {
  const auto& rule = PanelRule::get();
  const std::size_t P = kPanelDegree;
  auto step = [&](std::size_t p) {
    const double h = g.width(p);
    const std::size_t base = PanelGrid::index(p, 0);
    std::array<double, kPanelNodes> uu, d, gq, gd, F1, Fd;
    for (std::size_t i = 0; i < kPanelNodes; ++i) {
      d[i] = dir > 0 ? g.x(base + i) - g.x(base) : g.x(base + P) - g.x(base + i);
      uu[i] = u + (dir > 0 ? du : -du) * d[i];
    }
    int it = 0;
    double prev = INFINITY;
    for (; it < max_it; ++it) {
      for (std::size_t j = 0; j < kPanelNodes; ++j) {
        gq[j] = q[base + j] * uu[j];
        gd[j] = gq[j] * (dir > 0 ? g.x(base + j) - g.x(base) : g.x(base + P) - g.x(base + j));
      }
      double change = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < kPanelNodes; ++i) {
        double a1 = 0.0, ad = 0.0;
        for (std::size_t j = 0; j < kPanelNodes; ++j) {
          double w = dir > 0 ? rule.cumulative[i][j] : rule.cumulative[P][j] - rule.cumulative[i][j];
          a1 += w * gq[j];
          ad += w * gd[j];
        }
        F1[i] = 0.5 * h * a1;  // int over [start, x_i] (or [x_i, end]) of q u
        Fd[i] = 0.5 * h * ad;  // same with the distance from the start
        double un = u + (dir > 0 ? du : -du) * d[i] + d[i] * F1[i] - Fd[i];
        change = std::max(change, std::abs(un - uu[i]));
        scale = std::max(scale, std::abs(un));
        uu[i] = un;
      }
      if (change <= 1e-2 * tol * std::max(scale, 1e-300)) break;
      // Rounding floor: further sweeps only shuffle the last bits.
      if (change >= 0.5 * prev && change <= 1e-10 * scale) break;
      prev = change;
    }
    if (it == max_it)
      throw Error(ErrorCode::non_convergence, "march_cauchy: Picard iteration stalled on a panel");
    for (std::size_t i = 0; i < kPanelNodes; ++i) {
      out.v[base + i] = uu[i];
      out.d[base + i] = du + (dir > 0 ? F1[i] : -F1[i]);
    }
    std::size_t end = dir > 0 ? base + P : base;
    u = out.v[end];
    du = out.d[end];
  };
  if (dir > 0)
    for (std::size_t p = b; p < g.panels(); ++p) step(p);
  else
    for (std::size_t p = b; p-- > 0;) step(p);
}

// Boundary data for u_1 at X: u_1(X) - 1 = int_X^inf (y - X) V u_1 and
// u_1'(X) = -int_X^inf V u_1, with u_1 ~ 1 + kappa y^{2-alpha} inside.
inline std::pair<double, double> zero_energy_tail(const std::function<double(double)>& w,
                                                  double X, double alpha, double c) {
  const double kappa = c / ((alpha - 1.0) * (alpha - 2.0));
  auto u1 = [&](double y) { return 1.0 + kappa * std::pow(y, 2.0 - alpha); };
  const GaussRule& g = gauss_legendre(20);
  double T = 0.0, D = 0.0;
  const double Z = 1e4 * X;
  for (double a = X; a < Z;) {
    double b = std::min(Z, 1.25 * a);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      double y = a + 0.5 * (g.nodes[q] + 1.0) * (b - a);
      double wt = 0.5 * (b - a) * g.weights[q] * w(y) * u1(y);
      T += wt * (y - X);
      D += wt;
    }
    a = b;
  }
  const double cz = w(Z) * std::pow(Z, alpha);
  T += cz * (std::pow(Z, 2.0 - alpha) / (alpha - 2.0) - X * std::pow(Z, 1.0 - alpha) / (alpha - 1.0) +
             kappa * (std::pow(Z, 4.0 - 2.0 * alpha) / (2.0 * alpha - 4.0) -
                      X * std::pow(Z, 3.0 - 2.0 * alpha) / (2.0 * alpha - 3.0)));
  D += cz * (std::pow(Z, 1.0 - alpha) / (alpha - 1.0) +
             kappa * std::pow(Z, 3.0 - 2.0 * alpha) / (2.0 * alpha - 3.0));
  return {T, -D};
}

// Growing/constant part of u_0 - <x> for a c y^-alpha tail.
inline double u0_correction(double s, double alpha, double c) {
  if (c == 0.0) return 0.0;
  if (alpha == 3.0) return -c * std::log(s);
  return c * std::pow(s, 3.0 - alpha) / ((alpha - 2.0) * (alpha - 3.0));
}

}  // namespace detail

inline ZeroEnergySystem solve_zero_energy(const PotentialModel& model, int sign,
                                          const LowEnergyOptions& opt = {},
                                          std::vector<double> points = {}) {
  require(sign == 1 || sign == -1, ErrorCode::contract_violation, "solve_zero_energy: sign must be +-1");
  auto w = [&model, sign](double s) { return model(sign * s); };
  const bool power = model.tail(sign) == TailKind::power;
  const double c = power ? model.asymptotic_amplitude(sign) : 0.0;
  double X = opt.xmax;
  if (model.tail(sign) == TailKind::exponential) X = std::max(X, std::abs(model.cut(sign)));

  std::vector<double> req = detail::standard_breakpoints();
  double lo = -opt.reach;
  for (double p : points) {
    req.push_back(sign * p);
    lo = std::min(lo, sign * p);
  }
  PanelGrid g(build_breaks(lo, X, std::move(req), [](double x) { return detail::panel_width(x, 0.0); }));
  const std::size_t n = g.size();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = w(g.x(i));

  detail::RealProfile u1{std::vector<double>(n), std::vector<double>(n)};
  auto [T, dT] = c != 0.0 ? detail::zero_energy_tail(w, X, model.alpha, c) : std::pair{0.0, 0.0};
  detail::march_cauchy(g, q, g.panels(), -1, 1.0 + T, dT, u1, opt.tol, opt.max_iterations);

  // Reduction base point: first break >= 2 with |u_1| > 1/2 everywhere beyond.
  std::size_t last_bad = 0;
  for (std::size_t i = n; i-- > 0;) {
    if (std::abs(u1.v[i]) <= 0.5) {
      last_bad = i;
      break;
    }
  }
  std::size_t b1 = 0;
  const auto& br = g.breaks();
  while (b1 < br.size() && (br[b1] < 2.0 || (last_bad > 0 && br[b1] <= g.x(last_bad)))) ++b1;
  require(b1 + 1 < br.size() && br[b1] < 0.1 * X, ErrorCode::hypothesis_violation,
          "solve_zero_energy: u_1 keeps vanishing; no reduction base point x_1");

  // u_0 = u_1 (int_{x1}^x u_1^-2 + alpha_const) for x >= x1.
  detail::RealProfile u0{std::vector<double>(n), std::vector<double>(n)};
  std::vector<double> Iv(n, 0.0);
  const auto& rule = PanelRule::get();
  double acc = 0.0;
  for (std::size_t p = b1; p < g.panels(); ++p) {
    std::size_t base = PanelGrid::index(p, 0);
    for (std::size_t i = 0; i < kPanelNodes; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < kPanelNodes; ++j)
        s += rule.cumulative[i][j] / (u1.v[base + j] * u1.v[base + j]);
      Iv[base + i] = acc + 0.5 * g.width(p) * s;
    }
    acc = Iv[base + kPanelDegree];
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = PanelGrid::index(b1, 0); i < n; ++i) {
    double s = g.x(i);
    if (s < 0.1 * X) continue;
    double target = s + detail::u0_correction(s, model.alpha, c) - u1.v[i] * Iv[i];
    num += u1.v[i] * target;
    den += u1.v[i] * u1.v[i];
  }
  const double ac = num / den;
  for (std::size_t i = PanelGrid::index(b1, 0); i < n; ++i) {
    u0.v[i] = u1.v[i] * (Iv[i] + ac);
    u0.d[i] = u1.d[i] * (Iv[i] + ac) + 1.0 / u1.v[i];
  }
  const std::size_t n1 = PanelGrid::index(b1, 0);
  detail::march_cauchy(g, q, b1, -1, u0.v[n1], u0.d[n1], u0, opt.tol, opt.max_iterations);

  ZeroEnergySystem zs;
  zs.sign = sign;
  zs.alpha = model.alpha;
  zs.c = c;
  zs.x1 = sign * br[b1];
  zs.alpha_const = ac;
  if (sign > 0) {
    zs.grid = std::move(g);
  } else {
    zs.grid = detail::mirror(g);
    for (auto* v : {&u1.v, &u0.v}) detail::mirror(*v, false);
    for (auto* v : {&u1.d, &u0.d}) detail::mirror(*v, true);
  }
  zs.u1_values = std::move(u1.v);
  zs.u1_deriv = std::move(u1.d);
  zs.u0_values = std::move(u0.v);
  zs.u0_deriv = std::move(u0.d);
  return zs;
}

// u_j(x, lambda) = u_j(x) + lambda^2 int_0^x K_j(x, y) u_j(y, lambda) dy with
// K_1(x, y) = u_0(y) u_1(x) - u_0(x) u_1(y); for j = 0 the iteration runs on
// u/<x> with the correspondingly weighted kernel K_0.
inline PerturbedSystem perturb_in_energy(const ZeroEnergySystem& zs, double lambda, int j,
                                         const LowEnergyOptions& opt = {},
                                         std::vector<double> points = {}) {
  require(lambda > 0.0, ErrorCode::contract_violation, "perturb_in_energy: lambda must be positive");
  require(lambda < opt.lambda0, ErrorCode::regime,
          "perturb_in_energy: lambda >= lambda0, low-energy representation not valid");
  require(j == 0 || j == 1, ErrorCode::contract_violation, "perturb_in_energy: j must be 0 or 1");
  const int sg = zs.sign;
  const double s_hi = sg > 0 ? zs.grid.hi() : -zs.grid.lo();
  const double s_lo_avail = sg > 0 ? zs.grid.lo() : -zs.grid.hi();
  double hi = std::min(1.0 / lambda, s_hi);
  double lo = std::max(-opt.reach, s_lo_avail);
  std::vector<double> req = detail::standard_breakpoints();
  req.push_back(std::pow(lambda, -2.0 / zs.alpha));
  for (double p : points) {
    double s = sg * p;
    require(s <= s_hi && s >= s_lo_avail, ErrorCode::out_of_range,
            "perturb_in_energy: requested point outside the zero-energy grid");
    req.push_back(s);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  lo = std::min(lo, 0.0);
  PanelGrid g(build_breaks(lo, hi, std::move(req), [](double x) { return detail::panel_width(x, 0.0); }));
  const std::size_t n = g.size();
  std::vector<double> a0(n), d0(n), a1(n), d1(n), rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = sg * g.x(i);
    a0[i] = zs.u0(x);
    d0[i] = sg * zs.du0(x);
    a1[i] = zs.u1(x);
    d1[i] = sg * zs.du1(x);
    rho[i] = j == 0 ? bracket(g.x(i)) : 1.0;
  }
  const std::vector<double>& uj = j == 0 ? a0 : a1;
  const std::vector<double>& dj = j == 0 ? d0 : d1;
  const double l2 = lambda * lambda;
  const auto& rule = PanelRule::get();
  const std::size_t P = kPanelDegree;

  std::vector<double> val(n), der(n);
  auto run = [&](std::size_t p, int dir, double& B0, double& B1) {
    const double h = g.width(p);
    const std::size_t base = PanelGrid::index(p, 0);
    std::array<double, kPanelNodes> wv, c0, c1;
    for (std::size_t i = 0; i < kPanelNodes; ++i) wv[i] = uj[base + i] / rho[base + i];
    int it = 0;
    double prev = INFINITY;
    for (; it < opt.max_iterations; ++it) {
      double change = 0.0, scale = 0.0;
      std::array<double, kPanelNodes> g0, g1;
      for (std::size_t k = 0; k < kPanelNodes; ++k) {
        double u = rho[base + k] * wv[k];
        g0[k] = a0[base + k] * u;
        g1[k] = a1[base + k] * u;
      }
      for (std::size_t i = 0; i < kPanelNodes; ++i) {
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t k = 0; k < kPanelNodes; ++k) {
          double wt = dir > 0 ? rule.cumulative[i][k] : rule.cumulative[i][k] - rule.cumulative[P][k];
          s0 += wt * g0[k];
          s1 += wt * g1[k];
        }
        c0[i] = B0 + 0.5 * h * s0;
        c1[i] = B1 + 0.5 * h * s1;
        const std::size_t m = base + i;
        double wn = (uj[m] + l2 * (a1[m] * c0[i] - a0[m] * c1[i])) / rho[m];
        change = std::max(change, std::abs(wn - wv[i]));
        scale = std::max(scale, std::abs(wn));
        wv[i] = wn;
      }
      if (change <= 1e-2 * opt.tol * std::max(scale, 1e-300)) break;
      if (change >= 0.5 * prev && change <= 1e-10 * scale) break;
      prev = change;
    }
    if (it == opt.max_iterations)
      throw Error(ErrorCode::non_convergence, "perturb_in_energy: Picard iteration stalled (lambda " + std::to_string(lambda) + ", panel " + std::to_string(p) + ")");
    for (std::size_t i = 0; i < kPanelNodes; ++i) {
      const std::size_t m = base + i;
      val[m] = rho[m] * wv[i];
      der[m] = dj[m] + l2 * (d1[m] * c0[i] - d0[m] * c1[i]);
    }
    B0 = dir > 0 ? c0[P] : c0[0];
    B1 = dir > 0 ? c1[P] : c1[0];
  };
  const auto& br = g.breaks();
  std::size_t b0 = static_cast<std::size_t>(std::find(br.begin(), br.end(), 0.0) - br.begin());
  double B0 = 0.0, B1 = 0.0;
  for (std::size_t p = b0; p < g.panels(); ++p) run(p, 1, B0, B1);
  B0 = B1 = 0.0;
  for (std::size_t p = b0; p-- > 0;) run(p, -1, B0, B1);

  PerturbedSystem ps;
  ps.lambda = lambda;
  ps.sign = sg;
  ps.j = j;
  ps.kernel_tag = j == 0 ? "K0" : "K1";
  if (sg > 0) {
    ps.grid = std::move(g);
  } else {
    ps.grid = detail::mirror(g);
    detail::mirror(val, false);
    detail::mirror(der, true);
  }
  ps.values = std::move(val);
  ps.deriv = std::move(der);
  return ps;
}

struct LowEnergyTurningReport {
  double lambda = 0.0;
  double mu = 0.0;
  int sign = 1;
  // u_0, u_0', u_1, u_1' at sign * lambda^{-2/alpha}: computed, predicted.
  std::array<double, 4> value{}, predicted{};
  // Residuals divided by the natural scale of each expansion
  // (lambda^{-2/alpha}, 1, 1, lambda^{2/alpha}), i.e. the bracket remainders.
  std::array<double, 4> residual{};
};

inline std::array<double, 4> predicted_lowenergy(double alpha, double c, double lambda, int sign) {
  const double mu = turning_mu(lambda, alpha);
  const double m2 = mu * mu;
  const double xt = std::pow(lambda, -2.0 / alpha);
  double b0 = alpha == 3.0 ? 1.0 + 2.0 * c * m2 * std::log(mu) - m2 / 6.0
                           : 1.0 + (c / ((alpha - 2.0) * (alpha - 3.0)) - 1.0 / 6.0) * m2;
  return {xt * b0, sign * (1.0 - (c / (alpha - 2.0) + 0.5) * m2),
          1.0 + (c / ((alpha - 1.0) * (alpha - 2.0)) - 0.5) * m2,
          -sign * (c / (alpha - 1.0) + 1.0) * m2 / xt};
}

inline LowEnergyTurningReport lowenergy_turning_residual(const ZeroEnergySystem& zs, double lambda,
                                                         const LowEnergyOptions& opt = {}) {
  LowEnergyTurningReport r;
  r.lambda = lambda;
  r.sign = zs.sign;
  r.mu = turning_mu(lambda, zs.alpha);
  const double xt = zs.sign * std::pow(lambda, -2.0 / zs.alpha);
  auto p0 = perturb_in_energy(zs, lambda, 0, opt);
  auto p1 = perturb_in_energy(zs, lambda, 1, opt);
  r.value = {p0.u(xt), p0.du(xt), p1.u(xt), p1.du(xt)};
  r.predicted = predicted_lowenergy(zs.alpha, zs.c, lambda, zs.sign);
  const double sc[4] = {std::abs(xt), 1.0, 1.0, 1.0 / std::abs(xt)};
  for (int k = 0; k < 4; ++k) r.residual[k] = (r.value[k] - r.predicted[k]) / sc[k];
  return r;
}

inline LowEnergyTurningReport lowenergy_turning_residual(const PotentialModel& model, double lambda,
                                                         int sign = 1,
                                                         const LowEnergyOptions& opt = {}) {
  return lowenergy_turning_residual(solve_zero_energy(model, sign, opt), lambda, opt);
}

}  // namespace jostlab
