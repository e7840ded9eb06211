#pragma once

// Wronskians, connection coefficients, the resolvent kernel
//   G(x, x', lambda) = f_-(min) f_+(max) / W(f_-, f_+)
// and zero-energy diagnostics. Below delta the Jost solutions are matched to
// the low-energy systems at x = +-lambda^{-2/alpha}:
//   f_+ = -a_1^+ u_0^+ + a_0^+ u_1^+,   f_- = a_1^- u_0^- - a_0^- u_1^-.

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "jostlab/error.hpp"
#include "jostlab/jost.hpp"
#include "jostlab/lowenergy.hpp"
#include "jostlab/potential.hpp"

namespace jostlab {

template <class F, class G>
auto wronskian(F f, F df, G g, G dg) {
  return f * dg - df * g;
}

// Checked form for two stored Jost profiles at the same energy.
inline cplx wronskian(const JostData& a, const JostData& b, double x) {
  require(a.lambda == b.lambda, ErrorCode::contract_violation,
          "wronskian: solutions belong to different lambda");
  auto u = jost_eval(a, x), v = jost_eval(b, x);
  return wronskian(u.f, u.df, v.f, v.df);
}

enum class Regime { low_matched, direct_jost };

inline const char* to_string(Regime r) {
  return r == Regime::low_matched ? "low_matched" : "direct_jost";
}

struct SpectralOptions {
  double delta = 0.05;
  double resonance_floor = 1e-6;
  bool allow_resonant = false;  // skip the singular-kernel refusal (free case)
  JostOptions jost;
  LowEnergyOptions low;
};

// Model plus the zero-energy systems shared by every lambda.
class SpectralContext {
 public:
  SpectralContext(PotentialModel model, SpectralOptions opt = {}, double reach = 0.0)
      : model_(std::move(model)), opt_(opt) {
    opt_.low.reach = std::max(opt_.low.reach, reach + 1.0);
    zm_ = solve_zero_energy(model_, -1, opt_.low);
    zp_ = solve_zero_energy(model_, 1, opt_.low);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        double a = j ? zm_.u1(0.0) : zm_.u0(0.0), da = j ? zm_.du1(0.0) : zm_.du0(0.0);
        double b = k ? zp_.u1(0.0) : zp_.u0(0.0), db = k ? zp_.du1(0.0) : zp_.du0(0.0);
        b_[j][k] = wronskian(a, da, b, db);
      }
  }

  const PotentialModel& model() const { return model_; }
  const SpectralOptions& options() const { return opt_; }
  const ZeroEnergySystem& zero(int sign) const { return sign > 0 ? zp_ : zm_; }
  double reach() const { return opt_.low.reach; }
  // b_jk = W(u_j^-, u_k^+), lambda independent.
  double b(int j, int k) const { return b_[j][k]; }
  double b11_scale() const {
    return std::abs(zm_.u1(0.0) * zp_.du1(0.0)) + std::abs(zm_.du1(0.0) * zp_.u1(0.0));
  }

 private:
  PotentialModel model_;
  SpectralOptions opt_;
  ZeroEnergySystem zm_, zp_;
  double b_[2][2]{};
};

// Everything needed to evaluate G(., ., lambda) at one energy.
struct KernelAtLambda {
  double lambda = 0.0;
  Regime regime = Regime::direct_jost;
  cplx W;
  // matched regime
  std::array<cplx, 2> a_minus{}, a_plus{};  // a_j^-, a_j^+
  std::array<std::optional<PerturbedSystem>, 2> u_minus, u_plus;
  // direct regime
  std::optional<JostData> f_minus_data, f_plus_data;

  cplx f_minus(double x) const {
    if (regime == Regime::direct_jost) return jost_eval(*f_minus_data, x).f;
    return a_minus[1] * u_minus[0]->u(x) - a_minus[0] * u_minus[1]->u(x);
  }
  cplx f_plus(double x) const {
    if (regime == Regime::direct_jost) return jost_eval(*f_plus_data, x).f;
    return -a_plus[1] * u_plus[0]->u(x) + a_plus[0] * u_plus[1]->u(x);
  }
  cplx G(double x, double xp) const {
    return f_minus(std::min(x, xp)) * f_plus(std::max(x, xp)) / W;
  }
};

namespace detail {

inline void check_singular(const SpectralContext& ctx, cplx W, double scale) {
  if (ctx.options().allow_resonant) return;
  require(std::abs(W) > 1e-13 * std::max(1.0, scale), ErrorCode::singular_kernel,
          "greens_kernel: Wronskian W(f_-, f_+) vanishes (resonance)");
}

}  // namespace detail

// points: positions where f_+- will be evaluated (must lie within reach for
// the matched regime).
inline KernelAtLambda kernel_at(const SpectralContext& ctx, double lambda, Regime regime,
                                const std::vector<double>& points = {}) {
  require(lambda > 0.0, ErrorCode::contract_violation, "kernel_at: lambda must be positive");
  KernelAtLambda k;
  k.lambda = lambda;
  k.regime = regime;
  const auto& model = ctx.model();
  const auto& opt = ctx.options();
  if (regime == Regime::direct_jost) {
    std::vector<double> pts = points;
    pts.push_back(0.0);
    k.f_minus_data = solve_m(model, -1, lambda, {pts}, opt.jost);
    k.f_plus_data = solve_m(model, 1, lambda, {pts}, opt.jost);
    auto m = jost_eval(*k.f_minus_data, 0.0), p = jost_eval(*k.f_plus_data, 0.0);
    k.W = wronskian(m.f, m.df, p.f, p.df);
    detail::check_singular(ctx, k.W, std::abs(m.f * p.df) + std::abs(m.df * p.f));
    return k;
  }
  require(lambda < opt.low.lambda0, ErrorCode::regime,
          "kernel_at: matched regime needs lambda < lambda0");
  for (int sign : {-1, 1}) {
    const double xt = sign * std::pow(lambda, -2.0 / model.alpha);
    JostData f = solve_m(model, sign, lambda, {{xt}}, opt.jost);
    auto fv = jost_eval(f, xt);
    auto& us = sign > 0 ? k.u_plus : k.u_minus;
    auto& as = sign > 0 ? k.a_plus : k.a_minus;
    for (int j = 0; j < 2; ++j) {
      us[j] = perturb_in_energy(ctx.zero(sign), lambda, j, opt.low, points);
      const auto& u = *us[j];
      as[j] = wronskian(fv.f, fv.df, cplx(u.u(xt)), cplx(u.du(xt)));
    }
  }
  // The low-energy expansion of 1/W needs b_11 != 0.
  if (!opt.allow_resonant)
    require(std::abs(ctx.b(1, 1)) >= opt.resonance_floor * ctx.b11_scale() && ctx.b11_scale() > 0.0,
            ErrorCode::singular_kernel, "kernel_at: zero-energy resonance (b_11 below floor)");
  const auto& am = k.a_minus;
  const auto& ap = k.a_plus;
  k.W = -ctx.b(0, 0) * am[1] * ap[1] + ctx.b(1, 0) * am[0] * ap[1] + ctx.b(0, 1) * am[1] * ap[0] -
        ctx.b(1, 1) * am[0] * ap[0];
  detail::check_singular(ctx, k.W, ctx.b11_scale() * std::abs(am[0] * ap[0]));
  return k;
}

inline Regime default_regime(const SpectralContext& ctx, double lambda) {
  return lambda <= ctx.options().delta ? Regime::low_matched : Regime::direct_jost;
}

struct SpectralKernelSample {
  double lambda = 0.0, x = 0.0, x_prime = 0.0;
  cplx green;
  double im_green = 0.0;
  Regime regime = Regime::direct_jost;
};

inline SpectralKernelSample greens_kernel(const SpectralContext& ctx, double x, double xp,
                                          double lambda, std::optional<Regime> regime = {}) {
  Regime r = regime.value_or(default_regime(ctx, lambda));
  auto k = kernel_at(ctx, lambda, r, {x, xp});
  SpectralKernelSample s;
  s.lambda = lambda;
  s.x = x;
  s.x_prime = xp;
  s.green = k.G(x, xp);
  s.im_green = s.green.imag();
  s.regime = r;
  return s;
}

struct ConnectionData {
  double lambda = 0.0;
  // a[s][j]: s = 0 for "-", 1 for "+".
  std::array<std::array<cplx, 2>, 2> a{};
  std::array<std::array<double, 2>, 2> b_matrix{};
  cplx wronskian;
  std::optional<cplx> wronskian_matched, wronskian_direct;
  std::optional<cplx> refl_a, refl_b;
};

inline std::pair<cplx, cplx> scattering_from(const JostData& fm, const JostData& fp) {
  // f_- = a f_+ + b conj(f_+) at x = 0, by Cramer's rule.
  auto m = jost_eval(fm, 0.0), p = jost_eval(fp, 0.0);
  cplx det = p.f * std::conj(p.df) - p.df * std::conj(p.f);
  cplx a = (m.f * std::conj(p.df) - m.df * std::conj(p.f)) / det;
  cplx b = (p.f * m.df - p.df * m.f) / det;
  return {a, b};
}

inline std::pair<cplx, cplx> scattering_coefficients(const PotentialModel& model, double lambda,
                                                     const JostOptions& opt = {}) {
  require(lambda >= std::max(opt.lambda_floor, 1e-6), ErrorCode::regime,
          "scattering_coefficients: lambda too small for the direct Jost system");
  auto fm = solve_m(model, -1, lambda, {{0.0}}, opt);
  auto fp = solve_m(model, 1, lambda, {{0.0}}, opt);
  return scattering_from(fm, fp);
}

inline ConnectionData connection_coefficients(const SpectralContext& ctx, double lambda) {
  ConnectionData cd;
  cd.lambda = lambda;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) cd.b_matrix[j][k] = ctx.b(j, k);
  const auto& opt = ctx.options();
  if (lambda < opt.low.lambda0) {
    auto k = kernel_at(ctx, lambda, Regime::low_matched);
    cd.a[0] = k.a_minus;
    cd.a[1] = k.a_plus;
    cd.wronskian_matched = k.W;
  }
  if (lambda >= opt.jost.lambda_floor) {
    auto fm = solve_m(ctx.model(), -1, lambda, {{0.0}}, opt.jost);
    auto fp = solve_m(ctx.model(), 1, lambda, {{0.0}}, opt.jost);
    cd.wronskian_direct = wronskian(fm, fp, 0.0);
    if (lambda >= 1e-6) {
      auto [a, b] = scattering_from(fm, fp);
      cd.refl_a = a;
      cd.refl_b = b;
    }
  }
  require(cd.wronskian_matched || cd.wronskian_direct, ErrorCode::regime,
          "connection_coefficients: lambda outside both regimes");
  cd.wronskian = (lambda <= opt.delta && cd.wronskian_matched) ? *cd.wronskian_matched
                 : cd.wronskian_direct ? *cd.wronskian_direct : *cd.wronskian_matched;
  return cd;
}

struct ZeroEnergyReport {
  double b11 = 0.0;
  double scale = 0.0;
  bool resonant = false;
  int bound_states = 0;
  double L = 0.0;  // extent of the sign-change scan on the negative side
};

// Resonance from b_11 = W(u_1^-, u_1^+)(0); bound states from sign changes of
// u_1^+ continued over the whole line.
inline ZeroEnergyReport resonance_and_bound_states(const PotentialModel& model,
                                                   const LowEnergyOptions& low = {}) {
  ZeroEnergyReport r;
  r.L = model.tail_minus == TailKind::exponential ? std::abs(model.cut_minus) : 1e4;
  LowEnergyOptions o = low;
  o.reach = r.L;
  auto zp = solve_zero_energy(model, 1, o);
  auto zm = solve_zero_energy(model, -1, low);
  r.b11 = wronskian(zm.u1(0.0), zm.du1(0.0), zp.u1(0.0), zp.du1(0.0));
  r.scale = std::abs(zm.u1(0.0) * zp.du1(0.0)) + std::abs(zm.du1(0.0) * zp.u1(0.0));
  r.resonant = std::abs(r.b11) < 1e-6 * std::max(r.scale, 1e-300) || r.scale == 0.0;
  double prev = 0.0;
  for (double v : zp.u1_values) {
    if (v == 0.0) continue;
    if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++r.bound_states;
    prev = v;
  }
  return r;
}

// Local checks plus the two spectral hypotheses.
inline HypothesisReport verify_hypotheses_full(const PotentialModel& model) {
  HypothesisReport rep = verify_hypotheses(model);
  auto z = resonance_and_bound_states(model);
  char buf[160];
  std::snprintf(buf, sizeof buf, "sign changes of u_1^+: %d", z.bound_states);
  *rep.find("no_bound_states") = {"no_bound_states",
                                  z.bound_states == 0 ? CheckStatus::pass : CheckStatus::fail, buf};
  std::snprintf(buf, sizeof buf, "|b_11| = %.3e, scale %.3e", std::abs(z.b11), z.scale);
  *rep.find("nonresonant") = {"nonresonant", z.resonant ? CheckStatus::fail : CheckStatus::pass, buf};
  return rep;
}

}  // namespace jostlab
