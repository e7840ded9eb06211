#include <cmath>
#include <complex>
#include <cstdio>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "jostlab/jost.hpp"
#include "ode_oracle.hpp"

using namespace jostlab;

TEST(Jost, FreeCaseIsExact) {
  auto z = make_zero_potential();
  for (double lam : {0.01, 0.5, 2.0}) {
    auto jd = solve_m(z, 1, lam, {{1.0}, 3.0});
    for (std::size_t i = 0; i < jd.m_values.size(); ++i) {
      EXPECT_EQ(jd.m_values[i], cplx(1.0));
      EXPECT_EQ(jd.m_deriv[i], cplx(0.0));
    }
  }
  auto jd = solve_m(z, 1, 2.0, {{1.0}, 1.0});
  auto v1 = jost_eval(jd, 1.0);
  EXPECT_NEAR(std::abs(v1.f - std::exp(2.0 * I)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v1.df - 2.0 * I * std::exp(2.0 * I)), 0.0, 1e-15);
  auto v0 = jost_eval(jd, 0.0);
  EXPECT_NEAR(std::abs(v0.f - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v0.df - 2.0 * I), 0.0, 1e-15);
}

TEST(Jost, Contracts) {
  auto v = make_inverse_power(3.0, 1.0, 1.0);
  EXPECT_THROW(solve_m(v, 1, 0.0), Error);
  EXPECT_THROW(solve_m(v, 1, -1.0), Error);
  try {
    solve_m(v, 1, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::regime);
  }
  auto jd = solve_m(v, 1, 0.5);
  EXPECT_THROW(jost_eval(jd, -5.0), Error);
}

TEST(Jost, PowerTailIntegralMatchesQuadrature) {
  for (double alpha : {2.5, 3.0, 4.0}) {
    for (double k : {0.02, 0.2, 3.0}) {
      double X = 30.0;
      cplx got = oscillatory_power_tail(k, X, alpha);
      // Oracle: Gauss-Kronrod on [X, Y] plus a three-term boundary expansion at Y.
      double Y = std::max(2000.0 / k, 10.0 * X);
      auto re = [&](double y) { return std::cos(k * y) * std::pow(y, -alpha); };
      auto im = [&](double y) { return std::sin(k * y) * std::pow(y, -alpha); };
      using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
      double r = 0, i = 0;
      for (double a = X; a < Y; a *= 1.05) {
        double b = std::min(Y, a * 1.05);
        int pieces = 1 + static_cast<int>(k * (b - a));
        for (int j = 0; j < pieces; ++j) {
          double lo = a + (b - a) * j / pieces, hi = a + (b - a) * (j + 1) / pieces;
          r += GK::integrate(re, lo, hi, 0, 0);
          i += GK::integrate(im, lo, hi, 0, 0);
        }
      }
      cplx tail = -std::exp(I * (k * Y)) * std::pow(Y, -alpha) / (I * k) *
                  (1.0 + alpha / (I * k * Y) + alpha * (alpha + 1.0) / std::pow(I * k * Y, 2));
      cplx ref = cplx(r, i) + tail;
      EXPECT_NEAR(std::abs(got - ref), 0.0, 1e-12 * std::abs(ref) + 1e-16) << alpha << " " << k;
    }
  }
}

namespace {

// Backward ODE integration from X with two-term asymptotic boundary data.
cplx oracle_m_plus(const PotentialModel& v, double c, double alpha, double lam, double X, double x) {
  cplx E0 = -std::pow(X, -alpha) / (2.0 * I * lam);  // leading int_X^inf e^{2i lam (y-X)} y^-alpha
  cplx m = 1.0 + (c / (2.0 * I * lam)) * (E0 - std::pow(X, 1.0 - alpha) / (alpha - 1.0));
  cplx dm = -c * E0;
  cplx ph = std::exp(I * (lam * X));
  oracle::Cauchy start{ph * m, ph * (I * lam * m + dm)};
  auto end = oracle::integrate(v.value_fn, lam * lam, start, X, x, 1e-14);
  return std::exp(-I * (lam * x)) * end.f;
}

}  // namespace

// Frozen from the backward RKF78 oracle (X = 1e4).
TEST(Jost, MatchesOdeOracleAtX50) {
  auto v = make_inverse_power(3.0, 1.0, 1.0);
  const double lam = 0.1;
  cplx ref = oracle_m_plus(v, 1.0, 3.0, lam, 1e4, 50.0);
  std::printf("oracle m_+(50, 0.1) = %.15e %+.15ei\n", ref.real(), ref.imag());
  auto jd = solve_m(v, 1, lam, {{50.0}});
  EXPECT_NEAR(std::abs(jd.m(50.0) - ref), 0.0, 1e-8);
  EXPECT_LE(std::abs(jd.m(50.0) - 1.0), 1.0 / 50.0);
  auto fv = jost_eval(jd, 50.0);
  EXPECT_NEAR(std::abs(fv.f - std::exp(I * 5.0) * ref), 0.0, 1e-8);
}

TEST(Jost, BoundaryTailBound) {
  auto v = make_inverse_power(3.0, 2.0, 2.0);
  for (double lam : {1e-3, 0.05, 1.0}) {
    auto jd = solve_m(v, 1, lam);
    double X = jd.truncation_point;
    cplx mX = jd.m_values.back();
    EXPECT_LE(std::abs(mX - 1.0), 2.0 * std::pow(X, -2.0) / (2.0 * lam));
  }
}

TEST(Jost, VolterraDefectBelowTolerance) {
  for (auto v : {make_inverse_power(3.0, 2.0, 2.0), make_inverse_power(2.5, -0.5, 1.0),
                 make_regge_wheeler({1.0, 1.0})}) {
    for (double lam : {0.003, 0.2, 2.0})
      for (int sign : {1, -1}) {
        auto jd = solve_m(v, sign, lam, {{}, 4.0});
        EXPECT_LT(volterra_defect(v, jd), 10.0 * jd.tol) << v.alpha << " " << lam << " " << sign;
      }
  }
}

TEST(Jost, ReflectionSymmetry) {
  auto v = make_inverse_power(3.0, 1.5, 1.5);
  auto p = solve_m(v, 1, 0.3, {{}, 2.0});
  auto m = solve_m(v, -1, 0.3, {{}, 2.0});
  for (double x : {0.0, 0.7, 3.3, 40.0}) {
    EXPECT_NEAR(std::abs(p.m(x) - m.m(-x)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(p.dm(x) + m.dm(-x)), 0.0, 1e-13);
  }
}

// |m - 1| <= C <x>^{-(alpha-2)} with one C across lambda.
TEST(Jost, SymbolBoundZerothOrder) {
  auto v = make_inverse_power(3.0, 2.0, 2.0);
  auto fit = solve_m(v, 1, 0.01);
  double C = 0.0;
  for (double x = 0.0; x < 1e3; x = x * 1.2 + 0.1)
    C = std::max(C, std::abs(fit.m(x) - 1.0) * std::pow(bracket(x), v.alpha - 2.0));
  for (double lam : {1e-4, 1e-3, 0.02, 0.05}) {
    auto jd = solve_m(v, 1, lam);
    for (double x = 0.0; x < std::min(1e4, jd.truncation_point); x = x * 1.2 + 0.1)
      EXPECT_LE(std::abs(jd.m(x) - 1.0) * std::pow(bracket(x), v.alpha - 2.0), 1.5 * C);
  }
}

TEST(Jost, WronskianWithConjugate) {
  auto v = make_inverse_power(3.0, 2.0, 2.0);
  for (double lam : {0.01, 0.4, 3.0}) {
    auto jd = solve_m(v, 1, lam, {{}, 5.0});
    for (std::size_t i = 0; i < jd.grid.size(); i += 7) {
      double x = jd.grid.x(i);
      auto fv = jost_eval(jd, x);
      cplx w = fv.f * std::conj(fv.df) - fv.df * std::conj(fv.f);
      EXPECT_NEAR(std::abs(w / (-2.0 * I * lam) - 1.0), 0.0, 1e-10) << x;
    }
  }
}

// Im m_+ = O(<x>^{-(alpha-3)} lambda) for alpha in (3, 4].
TEST(Jost, ImaginaryPartRefinement) {
  auto v = make_inverse_power(3.5, 1.0, 1.0);
  double C = 0.0;
  std::vector<JostData> runs;
  for (double lam : {1e-4, 1e-3, 1e-2}) runs.push_back(solve_m(v, 1, lam));
  for (const auto& jd : runs)
    for (double x = 0.0; x < 1.0 / jd.lambda; x = x * 1.3 + 0.1)
      C = std::max(C, std::abs(jd.m(x).imag()) * std::pow(bracket(x), 0.5) / jd.lambda);
  EXPECT_LT(C, 10.0);
  EXPECT_GT(C, 0.0);
}

TEST(TurningPoint, FreeLimitTaylorRemainder) {
  auto z = make_zero_potential();
  for (double lam : {1e-2, 1e-3}) {
    auto r = turning_point_residual(z, lam);
    double mu = r.mu;
    EXPECT_NEAR(mu, std::pow(lam, 1.0 / 3.0), 1e-15);
    cplx expect = std::exp(I * mu) - (1.0 + I * mu - 0.5 * mu * mu);
    EXPECT_NEAR(std::abs(r.residual_value - expect), 0.0, 1e-14);
  }
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double value_residual_slope(double alpha, double c) {
  auto v = make_inverse_power(alpha, c, c);
  std::vector<double> mu, res;
  for (double lam = 1e-2; lam > 0.9e-5; lam /= std::sqrt(10.0)) {
    auto r = turning_point_residual(v, lam);
    mu.push_back(r.mu);
    res.push_back(std::abs(r.residual_value));
  }
  return loglog_slope(mu, res);
}

}  // namespace

TEST(TurningPoint, ValueResidualSlopes) {
  EXPECT_NEAR(value_residual_slope(3.0, 2.0), 3.0, 0.2);
  EXPECT_NEAR(value_residual_slope(3.5, 1.0), 3.5, 0.2);
  EXPECT_NEAR(value_residual_slope(2.5, 1.0), 2.5, 0.2);
}

TEST(TurningPoint, LeftJostUsesLeftAmplitude) {
  auto v = make_inverse_power(3.5, 0.5, 1.0);
  auto r = turning_point_residual(v, 1e-4, -1);
  EXPECT_LT(std::abs(r.residual_value), 10.0 * std::pow(r.mu, 3.5));
}
