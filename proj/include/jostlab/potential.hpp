#pragma once

// Potential families for A = -d^2/dx^2 + V on the line.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "jostlab/error.hpp"
#include "jostlab/jet.hpp"

namespace jostlab {

inline constexpr std::size_t kJetOrder = 7;
using VJet = Jet<kJetOrder>;

enum class PotentialKind { inverse_power, regge_wheeler, poschl_teller, zero, custom };

inline const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::inverse_power: return "inverse_power";
    case PotentialKind::regge_wheeler: return "regge_wheeler";
    case PotentialKind::poschl_teller: return "poschl_teller";
    case PotentialKind::zero: return "zero";
    case PotentialKind::custom: return "custom";
  }
  return "?";
}

// How V behaves beyond the numerical grid on one side.
enum class TailKind { power, exponential, none };

struct SchwarzschildParams {
  double mass = 1.0;
  double sigma = 1.0;
};

struct PotentialModel {
  PotentialKind kind = PotentialKind::zero;
  double alpha = 3.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double beta = 0.5;
  int max_derivative_order = 4;
  TailKind tail_plus = TailKind::none;
  TailKind tail_minus = TailKind::none;
  // For exponential tails: |V| < 1e-16 beyond these points.
  double cut_plus = std::numeric_limits<double>::infinity();
  double cut_minus = -std::numeric_limits<double>::infinity();
  // Smallest admissible truncation point for power tails.
  double xmax_floor = 1e3;
  bool claims_theorem = true;
  SchwarzschildParams schwarzschild{};
  int pt_n = 0;

  std::function<double(double)> value_fn;
  std::function<double(double, int)> derivative_fn;

  double operator()(double x) const { return value_fn(x); }
  double asymptotic_amplitude(int sign) const { return sign > 0 ? c_plus : c_minus; }
  TailKind tail(int sign) const { return sign > 0 ? tail_plus : tail_minus; }
  double cut(int sign) const { return sign > 0 ? cut_plus : cut_minus; }
};

// V^(k)(x).
inline double eval_derivative(const PotentialModel& m, double x, int k) {
  require(k >= 0 && k <= m.max_derivative_order, ErrorCode::contract_violation,
          "eval_derivative: order " + std::to_string(k) + " outside [0, " +
              std::to_string(m.max_derivative_order) + "]");
  if (k == 0) return m.value_fn(x);
  return m.derivative_fn(x, k);
}

// Japanese bracket: |x| for |x| >= 2, and on |x| < 2
// <x>^2 = x^2 + (1 - x^4/16)^7, which is even, >= 1 and C^6 at |x| = 2.
template <std::size_t N>
Jet<N> bracket(const Jet<N>& x) {
  double x0 = x.value();
  if (std::abs(x0) >= 2.0) return x0 >= 0.0 ? x : -x;
  Jet<N> s = x * x;
  Jet<N> q = 1.0 - s * s * (1.0 / 16.0);
  Jet<N> q7 = q * q;
  q7 = q7 * q7 * q7 * q;  // q^7
  return pow(s + q7, 0.5);
}

inline double bracket(double x) {
  if (std::abs(x) >= 2.0) return std::abs(x);
  double s = x * x;
  return std::sqrt(s + std::pow(1.0 - s * s / 16.0, 7));
}

namespace detail {

// Odd smooth step: -1 for x <= -1, +1 for x >= 1, C^7 at +-1.
template <std::size_t N>
Jet<N> smooth_sign(const Jet<N>& x) {
  double x0 = x.value();
  if (x0 >= 1.0) return Jet<N>::constant(1.0);
  if (x0 <= -1.0) return Jet<N>::constant(-1.0);
  // integral of (1 - s^2)^7 = sum_k C(7,k)(-1)^k s^{2k+1}/(2k+1), normalised.
  static constexpr double binom[8] = {1, 7, 21, 35, 35, 21, 7, 1};
  double norm = 0.0;
  for (int k = 0; k <= 7; ++k) norm += binom[k] * (k % 2 ? -1.0 : 1.0) / (2.0 * k + 1.0);
  Jet<N> s2 = x * x;
  Jet<N> acc = Jet<N>::constant(0.0);
  for (int k = 7; k >= 0; --k)
    acc = acc * s2 + Jet<N>::constant(binom[k] * (k % 2 ? -1.0 : 1.0) / (2.0 * k + 1.0));
  return acc * x * (1.0 / norm);
}

template <class JetFn>
void attach_jet(PotentialModel& m, JetFn fn) {
  m.derivative_fn = [fn](double x, int k) { return fn(VJet::variable(x)).derivative(k); };
}

}  // namespace detail

inline PotentialModel make_zero_potential() {
  PotentialModel m;
  m.kind = PotentialKind::zero;
  m.alpha = 3.0;
  m.beta = 0.5;
  m.max_derivative_order = 4;
  m.value_fn = [](double) { return 0.0; };
  m.derivative_fn = [](double, int) { return 0.0; };
  return m;
}

// V = c_pm <x>^-alpha for +-x >= 1, blended smoothly across |x| < 1.
inline PotentialModel make_inverse_power(double alpha, double c_plus, double c_minus) {
  require(alpha > 2.0 && alpha <= 4.0, ErrorCode::hypothesis_range,
          "inverse_power: alpha must lie in (2, 4]");
  if (c_plus == 0.0 && c_minus == 0.0) {
    PotentialModel z = make_zero_potential();
    z.alpha = alpha;
    z.beta = 0.5 * (alpha - 2.0) * (alpha - 2.0);
    z.max_derivative_order = static_cast<int>(std::ceil(alpha)) + 1;
    return z;
  }
  PotentialModel m;
  m.kind = PotentialKind::inverse_power;
  m.alpha = alpha;
  m.c_plus = c_plus;
  m.c_minus = c_minus;
  m.beta = 0.5 * (alpha - 2.0) * (alpha - 2.0);
  m.max_derivative_order = static_cast<int>(std::ceil(alpha)) + 1;
  m.tail_plus = m.tail_minus = TailKind::power;
  auto jet = [alpha, c_plus, c_minus](const VJet& x) {
    VJet b = pow(bracket(x), -alpha);
    if (c_plus == c_minus) return b * c_plus;
    VJet h = detail::smooth_sign(x);
    VJet c = h * (0.5 * (c_plus - c_minus)) + 0.5 * (c_plus + c_minus);
    return c * b;
  };
  m.value_fn = [alpha, c_plus, c_minus, jet](double x) {
    if (x >= 1.0) return c_plus * std::pow(bracket(x), -alpha);
    if (x <= -1.0) return c_minus * std::pow(bracket(x), -alpha);
    return jet(VJet::constant(x)).value();
  };
  detail::attach_jet(m, jet);
  return m;
}

// u = r/(2M) - 1 as a function of the tortoise coordinate, by Newton on
// l = log u for e^l + l = x/(2M) - 1 with a bisection safeguard.
inline double horizon_offset(double mass, double x) {
  require(mass > 0.0, ErrorCode::contract_violation, "Schwarzschild mass must be positive");
  const double z = x / (2.0 * mass) - 1.0;
  double lo, hi;
  if (z > 1.0) {
    lo = 0.0;
    hi = std::log(z);
  } else {
    lo = z - 1.0;
    hi = std::min(z, 0.0);
  }
  double l = (x > 4.0 * mass) ? std::log(x / (2.0 * mass) - 1.0) : z;
  if (!(l > lo && l < hi)) l = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double e = std::exp(l);
    double h = e + l - z;
    if (h > 0.0) hi = l; else lo = l;
    double next = l - h / (e + 1.0);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - l) <= 1e-16 * std::max(1.0, std::abs(l)) || hi - lo < 1e-300) {
      l = next;
      break;
    }
    l = next;
  }
  return std::exp(l);
}

inline double tortoise_to_areal(const SchwarzschildParams& p, double x) {
  return 2.0 * p.mass * (1.0 + horizon_offset(p.mass, x));
}

inline double areal_to_tortoise(const SchwarzschildParams& p, double r) {
  return r + 2.0 * p.mass * std::log(r / (2.0 * p.mass) - 1.0);
}

// V = (2M sigma / r^3)(1 - 2M/r) = sigma u / (4 M^2 (1+u)^4), u = r/2M - 1.
inline PotentialModel make_regge_wheeler(const SchwarzschildParams& p) {
  require(p.mass > 0.0, ErrorCode::contract_violation, "Schwarzschild mass must be positive");
  const double M = p.mass, sigma = p.sigma;
  if (sigma == 0.0) {
    PotentialModel z = make_zero_potential();
    z.schwarzschild = p;
    return z;
  }
  PotentialModel m;
  m.kind = PotentialKind::regge_wheeler;
  m.schwarzschild = p;
  m.alpha = 3.0;
  m.beta = 0.5;
  m.c_plus = 2.0 * M * sigma;
  m.c_minus = 0.0;
  m.max_derivative_order = 4;
  m.tail_plus = TailKind::power;
  m.tail_minus = TailKind::exponential;
  auto value = [M, sigma](double x) {
    double u = horizon_offset(M, x);
    double q = 1.0 + u;
    return sigma * u / (4.0 * M * M * q * q * q * q);
  };
  m.value_fn = value;
  detail::attach_jet(m, [M, sigma](const VJet& x) {
    double u0 = horizon_offset(M, x.value());
    // du/dx = u / (2M (1+u)), expanded around x0 then composed with dx.
    VJet u = solve_autonomous<kJetOrder>(u0, [M](const VJet& v) {
      return v / (v + 1.0) * (1.0 / (2.0 * M));
    });
    // u is in powers of (x - x0); re-expand along the jet variable x.
    VJet dx = x - VJet::constant(x.value());
    VJet ux = VJet::constant(u.c[0]);
    VJet pw = VJet::constant(1.0);
    for (std::size_t k = 1; k <= kJetOrder; ++k) {
      pw = pw * dx;
      ux += pw * u.c[k];
    }
    VJet q = ux + 1.0;
    VJet q2 = q * q;
    return ux / (q2 * q2) * (sigma / (4.0 * M * M));
  });
  // Left cut where |V| < 1e-16: bisection on the monotone left branch.
  double a = -4000.0 * M, b = 0.0;
  for (int it = 0; it < 200; ++it) {
    double c = 0.5 * (a + b);
    if (std::abs(value(c)) < 1e-16) a = c; else b = c;
  }
  m.cut_minus = a;
  return m;
}

// V = -n(n+1) sech^2 x. Exactly solvable, n bound states, outside the
// no-bound-state class.
inline PotentialModel make_poschl_teller(int n) {
  require(n >= 1, ErrorCode::contract_violation, "poschl_teller: n must be >= 1");
  PotentialModel m;
  m.kind = PotentialKind::poschl_teller;
  m.pt_n = n;
  m.alpha = 4.0;
  m.beta = 2.0;
  m.max_derivative_order = 5;
  m.claims_theorem = false;
  m.tail_plus = m.tail_minus = TailKind::exponential;
  const double amp = static_cast<double>(n) * (n + 1);
  auto jet = [amp](const VJet& x) {
    VJet e = exp(x.value() >= 0.0 ? x * -2.0 : x * 2.0);
    VJet d = e + 1.0;
    return e / (d * d) * (-4.0 * amp);
  };
  m.value_fn = [amp](double x) {
    double e = std::exp(-2.0 * std::abs(x));
    return -4.0 * amp * e / ((1.0 + e) * (1.0 + e));
  };
  detail::attach_jet(m, jet);
  m.cut_plus = 0.5 * std::log(4.0 * amp * 1e16);
  m.cut_minus = -m.cut_plus;
  return m;
}

// User supplied V with analytic derivatives; power tails c_pm |x|^-alpha.
inline PotentialModel make_custom(double alpha, double c_plus, double c_minus,
                                  std::function<double(double, int)> evaluator) {
  require(alpha > 2.0 && alpha <= 4.0, ErrorCode::hypothesis_range,
          "custom: alpha must lie in (2, 4]");
  PotentialModel m;
  m.kind = PotentialKind::custom;
  m.alpha = alpha;
  m.c_plus = c_plus;
  m.c_minus = c_minus;
  m.beta = 0.5 * (alpha - 2.0) * (alpha - 2.0);
  m.max_derivative_order = static_cast<int>(std::ceil(alpha)) + 1;
  m.tail_plus = m.tail_minus = TailKind::power;
  m.value_fn = [evaluator](double x) { return evaluator(x, 0); };
  m.derivative_fn = evaluator;
  return m;
}

enum class CheckStatus { pass, fail, delegated };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::delegated: return "delegated";
  }
  return "?";
}

struct HypothesisCheck {
  std::string name;
  CheckStatus status = CheckStatus::delegated;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  const HypothesisCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  HypothesisCheck* find(const std::string& name) {
    for (auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  bool local_checks_pass() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::fail) return false;
    return true;
  }
};

// Local (non-spectral) hypothesis checks. `no_bound_states` and
// `nonresonant` are left as delegated; see spectral::verify_hypotheses_full.
inline HypothesisReport verify_hypotheses(const PotentialModel& m) {
  HypothesisReport rep;
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail,
                          std::move(detail)});
  };

  add("exponent_range", m.alpha > 2.0 && m.alpha <= 4.0,
      "alpha = " + std::to_string(m.alpha));

  // |V^(k)| <= C_k <x>^{-alpha-k}: the ratio must not grow in the outer decade.
  bool decay_ok = true;
  std::string decay_detail;
  for (int k = 0; k <= m.max_derivative_order; ++k) {
    double inner = 0.0, outer = 0.0;
    for (int side : {1, -1}) {
      if (m.tail(side) == TailKind::exponential) continue;
      for (int i = 0; i <= 60; ++i) {
        double ax = 2.0 * std::pow(10.0, 5.7 * i / 60.0);
        double x = side * ax;
        double r = std::abs(eval_derivative(m, x, k)) * std::pow(bracket(x), m.alpha + k);
        if (!std::isfinite(r)) decay_ok = false;
        (ax >= 1e5 ? outer : inner) = std::max(ax >= 1e5 ? outer : inner, r);
      }
    }
    if (outer > 2.0 * inner + 1e-300) decay_ok = false;
    decay_detail += "C_" + std::to_string(k) + "=" + std::to_string(std::max(inner, outer)) + " ";
  }
  add("derivative_decay", decay_ok, decay_detail);

  // Asymptotic remainder |V - c |x|^-alpha| <= C |x|^{-alpha-beta}.
  bool rem_ok = true;
  for (int side : {1, -1}) {
    if (m.tail(side) != TailKind::power) continue;
    double inner = 0.0, outer = 0.0;
    for (int i = 0; i <= 40; ++i) {
      double ax = 10.0 * std::pow(10.0, 4.0 * i / 40.0);
      double r = std::abs(m(side * ax) - m.asymptotic_amplitude(side) * std::pow(ax, -m.alpha)) *
                 std::pow(ax, m.alpha + m.beta);
      if (ax >= 1e4) outer = std::max(outer, r); else inner = std::max(inner, r);
    }
    if (outer > 2.0 * inner + 1e-12) rem_ok = false;
  }
  add("asymptotic_remainder", rem_ok, "sampled on 10..1e5");

  // Supplied derivatives consistent with centred differences.
  bool smooth_ok = true;
  double worst = 0.0;
  for (double x : {-7.0, -2.5, -1.3, -0.2, 0.4, 1.7, 2.5, 7.0}) {
    for (int k = 0; k < m.max_derivative_order; ++k) {
      const double h = 1e-4;
      double fd = (eval_derivative(m, x + h, k) - eval_derivative(m, x - h, k)) / (2.0 * h);
      double ex = eval_derivative(m, x, k + 1);
      double scale = std::abs(ex) + std::abs(eval_derivative(m, x, k)) + 1e-12;
      double err = std::abs(fd - ex) / scale;
      worst = std::max(worst, err);
      if (err > 1e-5) smooth_ok = false;
    }
  }
  add("smoothness_probe", smooth_ok, "max relative FD defect " + std::to_string(worst));

  rep.checks.push_back({"no_bound_states", CheckStatus::delegated, "requires spectral check"});
  rep.checks.push_back({"nonresonant", CheckStatus::delegated, "requires spectral check"});
  return rep;
}

}  // namespace jostlab
