#pragma once

// Independent reference: direct integration of -f'' + V f = lambda^2 f with
// a Runge-Kutta-Fehlberg 7(8) controlled stepper.

#include <array>
#include <complex>
#include <functional>

#include <boost/numeric/odeint.hpp>

namespace oracle {

using cplx = std::complex<double>;
using State = std::array<double, 4>;  // Re f, Im f, Re f', Im f'

struct Cauchy {
  cplx f;
  cplx df;
};

inline Cauchy integrate(const std::function<double(double)>& V, double lambda2, Cauchy start,
                        double x0, double x1, double tol = 1e-13) {
  namespace odeint = boost::numeric::odeint;
  State s{start.f.real(), start.f.imag(), start.df.real(), start.df.imag()};
  auto rhs = [&](const State& y, State& dy, double x) {
    double q = V(x) - lambda2;
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = q * y[0];
    dy[3] = q * y[1];
  };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
  double dx = (x1 > x0 ? 1e-3 : -1e-3);
  odeint::integrate_adaptive(stepper, rhs, s, x0, x1, dx);
  return {cplx(s[0], s[1]), cplx(s[2], s[3])};
}

}  // namespace oracle
