#include <cmath>

#include <gtest/gtest.h>

#include "jostlab/lowenergy.hpp"
#include "ode_oracle.hpp"

using namespace jostlab;

TEST(ZeroEnergy, FreeSolutions) {
  auto zs = solve_zero_energy(make_zero_potential(), 1, {.reach = 3.0});
  for (double x : {-3.0, -1.0, 0.0, 2.0, 7.5, 1e3, 1e6}) {
    EXPECT_NEAR(zs.u1(x), 1.0, 1e-14);
    EXPECT_NEAR(zs.du1(x), 0.0, 1e-14);
    // alpha_const is calibrated at x ~ 1e7, which costs ~1e-9 absolute.
    EXPECT_NEAR(zs.u0(x), x, 1e-8);
    EXPECT_NEAR(zs.du0(x), 1.0, 1e-12);
    EXPECT_NEAR(zs.wronskian(x), -1.0, 1e-12);
  }
}

TEST(ZeroEnergy, WronskianBothSides) {
  auto v = make_inverse_power(3.0, 2.0, 0.7);
  for (int sign : {1, -1}) {
    auto zs = solve_zero_energy(v, sign, {.reach = 5.0});
    for (std::size_t i = 0; i < zs.grid.size(); i += 5) {
      double x = zs.grid.x(i);
      double w = zs.u0_values[i] * zs.u1_deriv[i] - zs.u0_deriv[i] * zs.u1_values[i];
      EXPECT_NEAR(w, -sign, 1e-10) << x;
    }
    double end = sign > 0 ? zs.grid.hi() : zs.grid.lo();
    EXPECT_NEAR(zs.u1(end), 1.0, 1e-6);
  }
}

TEST(ZeroEnergy, MirrorSymmetry) {
  auto v = make_inverse_power(3.5, 1.0, 1.0);
  auto p = solve_zero_energy(v, 1, {.reach = 2.0});
  auto m = solve_zero_energy(v, -1, {.reach = 2.0});
  for (double x : {-2.0, 0.0, 1.3, 40.0, 5e4}) {
    EXPECT_NEAR(p.u1(x), m.u1(-x), 1e-12);
    EXPECT_NEAR(p.du1(x), -m.du1(-x), 1e-12);
    EXPECT_NEAR(p.u0(x), m.u0(-x), 1e-9 * std::max(1.0, std::abs(x)));
  }
}

TEST(ZeroEnergy, AsymptoticCoefficientsAlpha3) {
  auto zs = solve_zero_energy(make_inverse_power(3.0, 1.0, 1.0), 1);
  // u_1 - 1 - x^-1/2 = O(x^-3/2); u_0/x - 1 + log x / x = O(x^-3/2).
  for (double x : {1e2, 1e3, 1e4, 1e5}) {
    EXPECT_LT(std::abs(zs.u1(x) - 1.0 - 0.5 / x), 2.0 * std::pow(x, -1.5)) << x;
    EXPECT_LT(std::abs(zs.u0(x) / x - 1.0 + std::log(x) / x), 2.0 * std::pow(x, -1.5)) << x;
  }
}

TEST(ZeroEnergy, AsymptoticCoefficientsGeneric) {
  for (double a : {2.5, 3.5, 4.0}) {
    auto zs = solve_zero_energy(make_inverse_power(a, 1.0, 1.0), 1);
    double k1 = 1.0 / ((a - 1.0) * (a - 2.0)), k0 = 1.0 / ((a - 2.0) * (a - 3.0));
    double rem = 0.5 * a * (a - 2.0);
    for (double x : {1e3, 1e4, 1e5}) {
      EXPECT_LT(std::abs(zs.u1(x) - 1.0 - k1 * std::pow(x, 2.0 - a)), std::max(5.0 * std::pow(x, -rem), 1e-12)) << a;
      EXPECT_LT(std::abs(zs.u0(x) / x - 1.0 - k0 * std::pow(x, 2.0 - a)), std::max(5.0 * std::pow(x, -rem), 1e-12))
          << a << " " << x;
    }
  }
}

TEST(ZeroEnergy, PathologicalU1Rejected) {
  // A deep well makes u_1 oscillate; a far-out zero still leaves a base point,
  // so this must succeed and pick x_1 beyond every zero.
  auto pt = make_poschl_teller(3);
  auto zs = solve_zero_energy(pt, 1);
  EXPECT_GE(zs.x1, 2.0);
  for (std::size_t i = 0; i < zs.grid.size(); ++i)
    if (zs.grid.x(i) >= zs.x1) EXPECT_GT(std::abs(zs.u1_values[i]), 0.5);
}

TEST(Perturbed, FreeClosedForms) {
  auto zs = solve_zero_energy(make_zero_potential(), 1, {.reach = 1.0});
  for (double lam : {0.05, 1e-3}) {
    auto p1 = perturb_in_energy(zs, lam, 1);
    auto p0 = perturb_in_energy(zs, lam, 0);
    EXPECT_STREQ(p0.kernel_tag, "K0");
    for (double x = 0.0; x <= 1.0 / lam; x += 0.093 / lam) {
      EXPECT_NEAR(p1.u(x), std::cos(lam * x), 1e-9);
      EXPECT_NEAR(p0.u(x), std::sin(lam * x) / lam, 1e-8 * std::max(1.0, x));
    }
  }
}

TEST(Perturbed, MatchesOdeOracle) {
  auto v = make_inverse_power(3.0, 1.0, 1.0);
  auto zs = solve_zero_energy(v, 1);
  const double lam = 1e-3;
  for (int j : {0, 1}) {
    auto ps = perturb_in_energy(zs, lam, j);
    oracle::Cauchy s{j ? zs.u1(0.0) : zs.u0(0.0), j ? zs.du1(0.0) : zs.du0(0.0)};
    auto ref = oracle::integrate(v.value_fn, lam * lam, s, 0.0, 100.0, 1e-14);
    EXPECT_NEAR(ps.u(100.0) / ref.f.real(), 1.0, 1e-7) << j;
    EXPECT_NEAR(ps.du(100.0) / ref.df.real(), 1.0, 1e-7) << j;
  }
}

TEST(Perturbed, WronskianAndRefusal) {
  auto v = make_inverse_power(3.0, 2.0, 2.0);
  for (int sign : {1, -1}) {
    auto zs = solve_zero_energy(v, sign);
    for (double lam : {0.05, 1e-4}) {
      auto p0 = perturb_in_energy(zs, lam, 0);
      auto p1 = perturb_in_energy(zs, lam, 1);
      for (double s : {0.0, 3.0, 0.7 / lam}) {
        double x = sign * s;
        EXPECT_NEAR(p0.u(x) * p1.du(x) - p0.du(x) * p1.u(x), -sign, 1e-8) << x;
      }
    }
    try {
      perturb_in_energy(zs, 0.1, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::regime);
    }
  }
}

TEST(Perturbed, ConvergesToZeroEnergy) {
  auto zs = solve_zero_energy(make_inverse_power(3.5, 1.0, 1.0), 1);
  double prev = -1.0;
  for (double lam : {1e-2, 1e-3, 1e-4}) {
    auto p1 = perturb_in_energy(zs, lam, 1);
    double d = std::abs(p1.u(20.0) - zs.u1(20.0));
    if (prev > 0.0) EXPECT_NEAR(d / prev, 1e-2, 2e-3);  // O(lambda^2)
    prev = d;
  }
}

TEST(Perturbed, EvenInLambda) {
  // |d/dlambda u_1(x, lambda)| <= C <x>^2 lambda, C fitted at one lambda.
  auto zs = solve_zero_energy(make_inverse_power(3.0, 1.0, 1.0), 1);
  auto dl = [&](double x, double lam) {
    double h = 1e-3 * lam;
    return (perturb_in_energy(zs, lam + h, 1).u(x) - perturb_in_energy(zs, lam - h, 1).u(x)) / (2 * h);
  };
  double C = 0.0;
  for (double x : {1.0, 10.0, 50.0}) C = std::max(C, std::abs(dl(x, 1e-2)) / (bracket(x) * bracket(x) * 1e-2));
  for (double lam : {3e-3, 1e-3})
    for (double x : {1.0, 10.0, 50.0, 0.9 / lam})
      EXPECT_LE(std::abs(dl(x, lam)), 1.5 * C * bracket(x) * bracket(x) * lam) << lam << " " << x;
}

TEST(Perturbed, RemainderShapeAlpha25) {
  const double a = 2.5;
  auto zs = solve_zero_energy(make_inverse_power(a, 1.0, 1.0), 1);
  auto rem = [&](double x, double lam, const PerturbedSystem& p) {
    double b = bracket(x);
    return std::abs(p.u(x) - zs.u1(x) + 0.5 * b * b * lam * lam) /
           (std::pow(b, 4.0 - a) * lam * lam + std::pow(b, 4) * std::pow(lam, 4));
  };
  auto ref = perturb_in_energy(zs, 1e-2, 1);
  double C = 0.0;
  for (double x = 0.0; x <= 100.0; x += 3.7) C = std::max(C, rem(x, 1e-2, ref));
  for (double lam : {1e-3, 1e-4}) {
    auto p = perturb_in_energy(zs, lam, 1);
    for (double x = 0.0; x <= 1.0 / lam; x += 0.037 / lam) EXPECT_LE(rem(x, lam, p), 1.5 * C) << lam << " " << x;
  }
}

TEST(Perturbed, OdeDefect) {
  auto v = make_inverse_power(3.0, 2.0, 2.0);
  auto zs = solve_zero_energy(v, 1);
  const double lam = 5e-3;
  auto p = perturb_in_energy(zs, lam, 0);
  double worst = 0.0, scale = 0.0;
  for (double x = 0.5; x < 190.0; x += 1.3) {
    double h = 1e-3;
    double upp = (p.du(x + h) - p.du(x - h)) / (2 * h);
    worst = std::max(worst, std::abs(-upp + (v(x) - lam * lam) * p.u(x)));
    scale = std::max(scale, std::abs(p.u(x)));
  }
  EXPECT_LT(worst / scale, 1e-6);
}

TEST(LowEnergyTurning, FreeLimit) {
  auto zs = solve_zero_energy(make_zero_potential(), 1);
  zs.alpha = 3.0;  // formal exponent for the turning point
  for (double lam : {1e-2, 1e-4}) {
    auto r = lowenergy_turning_residual(zs, lam);
    EXPECT_NEAR(r.value[2], std::cos(r.mu), 1e-12);
    EXPECT_LT(std::abs(r.residual[2]), std::pow(r.mu, 4));
  }
}

TEST(LowEnergyTurning, U1CoefficientVanishesAtAlpha3C1) {
  auto zs = solve_zero_energy(make_inverse_power(3.0, 1.0, 1.0), 1);
  auto r = lowenergy_turning_residual(zs, 1e-4);
  EXPECT_NEAR(r.predicted[2], 1.0, 1e-15);
  EXPECT_LT(std::abs(r.value[2] - 1.0), 5.0 * std::pow(r.mu, 3));
}
