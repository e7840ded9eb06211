#include <cmath>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>
#include <gtest/gtest.h>

#include "jostlab/potential.hpp"

using namespace jostlab;

TEST(Potential, ZeroPotential) {
  auto z = make_zero_potential();
  EXPECT_EQ(eval_derivative(z, 5.0, 0), 0.0);
  EXPECT_EQ(eval_derivative(z, -1.0, 3), 0.0);
}

TEST(Potential, InversePowerClosedForm) {
  auto v = make_inverse_power(3.0, 2.0, 2.0);
  EXPECT_DOUBLE_EQ(eval_derivative(v, 10.0, 0), 0.002);
  EXPECT_NEAR(eval_derivative(v, 10.0, 1), -6e-4, 1e-18);
  EXPECT_NEAR(eval_derivative(v, -10.0, 1), 6e-4, 1e-18);
  auto w = make_inverse_power(3.0, 1.0, 0.5);
  EXPECT_NEAR(w(3.0), 1.0 / 27.0, 1e-16);
  EXPECT_NEAR(w(-3.0), 0.5 / 27.0, 1e-16);
  EXPECT_EQ(make_inverse_power(3.0, 0.0, 0.0).kind, PotentialKind::zero);
}

TEST(Potential, InversePowerRejectsAlphaOutOfRange) {
  try {
    make_inverse_power(5.0, 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::hypothesis_range);
  }
  EXPECT_THROW(make_inverse_power(2.0, 1.0, 1.0), Error);
}

TEST(Potential, DerivativeOrderContract) {
  auto v = make_inverse_power(3.0, 1.0, 1.0);
  EXPECT_EQ(v.max_derivative_order, 4);
  EXPECT_NO_THROW(eval_derivative(v, 1.0, 4));
  try {
    eval_derivative(v, 1.0, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::contract_violation);
  }
}

TEST(Potential, BracketIsSmoothAndAtLeastOne) {
  for (double x = -3.0; x <= 3.0; x += 0.01) EXPECT_GE(bracket(x), 1.0 - 1e-15);
  EXPECT_DOUBLE_EQ(bracket(0.0), 1.0);
  EXPECT_DOUBLE_EQ(bracket(2.5), 2.5);
  // Derivatives match |x| from the inside up to order 6 at x = 2.
  auto in = bracket(VJet::variable(2.0 - 1e-12));
  EXPECT_NEAR(in.derivative(1), 1.0, 1e-6);
  for (int k = 2; k <= 6; ++k) EXPECT_NEAR(in.derivative(k), 0.0, 1e-4);
}

TEST(Tortoise, KnownPoints) {
  SchwarzschildParams p{1.0, 1.0};
  EXPECT_NEAR(tortoise_to_areal(p, 4.0), 4.0, 1e-14);
  // Independent bisection oracle for r + 2 log(r/2 - 1) = 0.
  double a = 2.0 + 1e-12, b = 10.0;
  for (int i = 0; i < 200; ++i) {
    double c = 0.5 * (a + b);
    ((c + 2.0 * std::log(c / 2.0 - 1.0)) > 0.0 ? b : a) = c;
  }
  EXPECT_NEAR(tortoise_to_areal(p, 0.0), a, 1e-12 * a);
  EXPECT_NEAR(tortoise_to_areal(p, 0.0), 2.5569290855221476, 1e-12);
  // Horizon asymptote: r - 2M ~ 2M exp((x - 2M)/2M).
  EXPECT_NEAR(tortoise_to_areal(p, -50.0), 2.0 + 2.0 * std::exp(-26.0), 1e-15);
  EXPECT_NEAR(2.0 * horizon_offset(1.0, -50.0) / (2.0 * std::exp(-26.0)), 1.0, 1e-10);
  EXPECT_NEAR(horizon_offset(1.0, -50.0), std::exp(-26.0), 1e-20);
}

TEST(Tortoise, AgreesWithLambertW) {
  for (double M : {0.5, 1.0, 3.0}) {
    SchwarzschildParams p{M, 1.0};
    for (double x = -300.0; x <= 2000.0; x += 7.3) {
      if (x / (2.0 * M) - 1.0 > 700.0) continue;
      double u = boost::math::lambert_w0(std::exp(x / (2.0 * M) - 1.0));
      EXPECT_NEAR(horizon_offset(M, x) / u, 1.0, 1e-13) << "x=" << x;
    }
  }
}

TEST(Tortoise, MonotoneAndRoundTrip) {
  SchwarzschildParams p{1.0, 1.0};
  double prev = 0.0;
  for (double x = -100.0; x <= 1000.0; x += 0.37) {
    double r = tortoise_to_areal(p, x);
    double u = horizon_offset(1.0, x);
    EXPECT_GT(u, prev);
    prev = u;
    double back = areal_to_tortoise(p, r);
    // r carries only ~16 digits, so log(r/2M - 1) degrades near the horizon.
    if (x > -20.0) EXPECT_NEAR(back, x, 1e-10 * std::max(1.0, std::abs(x)));
  }
}

TEST(ReggeWheeler, ValuesAndAsymptotics) {
  auto z = make_regge_wheeler({1.0, 0.0});
  EXPECT_EQ(z(3.0), 0.0);
  auto v = make_regge_wheeler({1.0, 1.0});
  EXPECT_NEAR(v(4.0), 1.0 / 64.0, 1e-16);
  for (double x : {1e3, 1e4, 1e5, 1e6})
    EXPECT_NEAR(v(x) * x * x * x / 2.0, 1.0, 10.0 * std::log(x) / x);
  EXPECT_LT(std::abs(v(v.cut_minus)), 1.1e-16);
  EXPECT_LT(v.cut_minus, -50.0);
  // Chain-rule derivative against the areal-radius form.
  double x = 3.0, r = tortoise_to_areal({1.0, 1.0}, x);
  double dVdr = 2.0 * (-3.0 / std::pow(r, 4) + 8.0 / std::pow(r, 5));
  EXPECT_NEAR(eval_derivative(v, x, 1), dVdr * (1.0 - 2.0 / r), 1e-14);
}

TEST(PoschlTeller, Values) {
  auto v = make_poschl_teller(1);
  EXPECT_NEAR(v(0.0), -2.0, 1e-15);
  EXPECT_LT(std::abs(v(40.0)), 1e-30);
  EXPECT_LT(std::abs(v(-40.0)), 1e-30);
  EXPECT_FALSE(v.claims_theorem);
  double x = 0.8, s = 1.0 / std::cosh(x);
  EXPECT_NEAR(eval_derivative(v, x, 1), 4.0 * s * s * std::tanh(x), 1e-13);
}

// |V^(k)(x)| <= C_k <x>^{-alpha-k} with C_k frozen from the inner range.
TEST(Potential, DerivativeDecayBound) {
  for (double alpha : {2.5, 3.0, 3.5, 4.0}) {
    auto v = make_inverse_power(alpha, 1.0, -0.7);
    for (int k = 0; k <= v.max_derivative_order; ++k) {
      double C = 0.0;
      for (double x = 2.0; x < 1e2; x *= 1.1)
        for (int s : {1, -1}) C = std::max(C, std::abs(eval_derivative(v, s * x, k)) * std::pow(x, alpha + k));
      for (double x = 1e2; x < 1e7; x *= 1.3)
        for (int s : {1, -1})
          EXPECT_LE(std::abs(eval_derivative(v, s * x, k)) * std::pow(x, alpha + k), C * (1 + 1e-9));
    }
  }
}

// Centred differences of V^(k) converge to V^(k+1) with slope 2.
TEST(Potential, FiniteDifferenceConsistencySlope) {
  std::vector<PotentialModel> models = {make_inverse_power(3.0, 2.0, 1.0),
                                        make_regge_wheeler({1.0, 1.0}), make_poschl_teller(2)};
  for (const auto& v : models) {
    for (double x : {-1.5, 0.3, 2.7}) {
      for (int k = 0; k < 3; ++k) {
        auto err = [&](double h) {
          return std::abs((eval_derivative(v, x + h, k) - eval_derivative(v, x - h, k)) / (2 * h) -
                          eval_derivative(v, x, k + 1));
        };
        double e1 = err(0.02), e2 = err(0.01);
        if (e1 < 1e-11) continue;
        EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1) << to_string(v.kind) << " x=" << x << " k=" << k;
      }
    }
  }
}

TEST(Hypotheses, LocalChecks) {
  auto rep = verify_hypotheses(make_inverse_power(3.0, 2.0, 2.0));
  EXPECT_TRUE(rep.local_checks_pass());
  EXPECT_EQ(rep.find("nonresonant")->status, CheckStatus::delegated);
  EXPECT_TRUE(verify_hypotheses(make_zero_potential()).local_checks_pass());
  EXPECT_TRUE(verify_hypotheses(make_regge_wheeler({1.0, 1.0})).local_checks_pass());
  EXPECT_TRUE(verify_hypotheses(make_inverse_power(2.5, 1.0, -1.0)).local_checks_pass());
}
