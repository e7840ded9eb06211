#include <cmath>

#include <gtest/gtest.h>

#include "jostlab/jet.hpp"

using jostlab::Jet;

TEST(Jet, PowerMatchesClosedForm) {
  auto x = Jet<5>::variable(3.0);
  auto y = pow(x, -2.5);
  // d^k/dx^k x^p = p(p-1)...(p-k+1) x^{p-k}
  double coef = 1.0;
  for (int k = 0; k <= 5; ++k) {
    EXPECT_NEAR(y.derivative(k), coef * std::pow(3.0, -2.5 - k), 1e-14 * std::abs(coef));
    coef *= (-2.5 - k);
  }
}

TEST(Jet, ExpLogDivisionRoundTrip) {
  auto x = Jet<6>::variable(0.7);
  auto y = log(exp(x * 2.0) + 1.0);
  // y' = 2 e^{2x}/(1+e^{2x})
  double e = std::exp(1.4);
  EXPECT_NEAR(y.derivative(1), 2.0 * e / (1.0 + e), 1e-14);
  auto q = (x * x + 1.0) / (x * x + 1.0);
  EXPECT_NEAR(q.value(), 1.0, 1e-15);
  for (int k = 1; k <= 6; ++k) EXPECT_NEAR(q.derivative(k), 0.0, 1e-12);
}

TEST(Jet, AutonomousSolveReproducesExponential) {
  // y' = y, y(0) = 2  =>  y^(k)(0) = 2
  auto y = jostlab::solve_autonomous<6>(2.0, [](const Jet<6>& v) { return v; });
  for (int k = 0; k <= 6; ++k) EXPECT_NEAR(y.derivative(k), 2.0, 1e-12);
}
