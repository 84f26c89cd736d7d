#pragma once

// Numerical checks of the first-order optimality conditions along a
// candidate trajectory: vanishing control Hamiltonian, the costate ODE for
// lambda_theta, and the stationarity identity omega = lambda_theta.

#include "relaxo/types.hpp"

namespace relaxo {

// Control Hamiltonian
//   H = -omega^2/2 + lambda_theta (omega - R sin(theta) cos(theta))
//       - lambda_a R sin^2(theta).
// Zero along an optimal trajectory; concave in omega with max at
// omega = lambda_theta.
double hamiltonian(double omega, double theta, double lambda_theta,
                   double lambda_a, double R);

// Max-norm defect of the costate equation
//   dlambda_theta/dt = lambda_theta R cos(2 theta) + lambda_a R sin(2 theta)
// with the time derivative taken by 4th-order finite differences on the
// stored lambda_theta samples (one-sided at the edges). Requires >= 5
// uniformly spaced records; a trailing shorter event step is excluded.
double adjoint_defect(const Trajectory& traj, double lambda_a);

// Max |omega - lambda_theta| over the records; exactly zero for
// trajectories synthesized by this library.
double stationarity_check(const Trajectory& traj);

struct CostateCheck {
  double lambda_a = 0.0;              // constant costate, kappa^2 R / 2
  double residual_h = 0.0;            // max |H|
  double residual_adjoint = 0.0;      // max costate-ODE defect
  double residual_stationarity = 0.0; // max |omega - lambda_theta|
  double rms_h = 0.0;
  double rms_adjoint = 0.0;
};

// Run all three checks with lambda_a derived from the trajectory's kappa.
CostateCheck verify_trajectory(const Trajectory& traj);

} // namespace relaxo
