#pragma once

// Closed-form synthesis of the minimum-energy pulse family: the constant
// kappa fixed by the magnitude-loss constraint, the feedback law omega(theta),
// and the pulse duration and energy. Each closed form has an adaptive
// quadrature cross-check.

#include "relaxo/types.hpp"

namespace relaxo {

struct AnalyticSolution {
  double kappa = 0.0;
  double duration = 0.0; // T
  double energy = 0.0;   // integral of omega^2/2
  PulseParams params;
  PulseTarget target = PulseTarget::HalfPi;
};

// kappa from the magnitude-loss constraint:
//   HalfPi: 2r/(1-r^2),  Pi: 2*sqrt(r)/(1-r).
double kappa(PulseTarget target, double r);

// Optimal feedback law omega(theta) = R sin(theta)(cos(theta) +
// sqrt(cos^2(theta) + kappa^2)); nonnegative on [0, pi].
double feedback_omega(double theta, double kappa, double R);

// Residual of the attenuation constraint
//   integral_eps^thetaT sin(theta)/sqrt(cos^2(theta)+kappa^2) dtheta + ln r,
// evaluated with the elementary antiderivative asinh(cos(theta)/kappa).
// Near zero at the closed-form kappa as eps -> 0.
double constraint_residual(double kappa, PulseTarget target, double r,
                           double eps);

// Same residual by adaptive quadrature (cross-check of the antiderivative).
double constraint_residual_quadrature(double kappa, PulseTarget target,
                                      double r, double eps);

// Closed-form pulse duration (small-eps limit of the duration integral):
//   T_pi2 = (1/R) (1-r^2)/(1+r^2) [ln((1+r^2)/r) - ln eps]
//   T_pi  = (1/R) (1-r)/(1+r)    [ln((1+r)^2/r) - 2 ln eps]
double duration(PulseTarget target, const PulseParams& p);

// Duration by adaptive quadrature of dtheta / (R sin(theta) sqrt(cos^2+k^2))
// over [eps, thetaT]. The integrand behaves like 1/theta at the regularized
// endpoints, so those stretches are integrated in log(theta).
double duration_quadrature(PulseTarget target, const PulseParams& p,
                           double kappa);

// Closed-form pulse energy: E_pi2 = R/(1-r^2), E_pi = R(1+r)/(1-r).
double energy(PulseTarget target, const PulseParams& p);

// Energy by adaptive quadrature of omega^2/(2 thetadot) over [eps, thetaT];
// the integrand is bounded once the common sin(theta) factor is cancelled.
double energy_quadrature(PulseTarget target, const PulseParams& p,
                         double kappa);

// Bundle of all three closed forms for one problem.
AnalyticSolution analyze(PulseTarget target, const PulseParams& p);

} // namespace relaxo
