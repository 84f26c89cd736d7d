#pragma once

// Time-domain synthesis: integrate the optimal trajectory ODE, resample the
// control onto uniform grids, and simulate the full Cartesian system driven
// by a stored waveform.

#include <vector>

#include "relaxo/types.hpp"

namespace relaxo {

enum class IntegratorMethod { RK4, Adaptive };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::RK4;
  // Fixed step for RK4; 0 selects duration_estimate/40000.
  double dt = 0.0;
  // Local error tolerance for the adaptive (RKF45) method.
  double tol = 1e-10;
  std::size_t max_steps = 4'000'000;

  void validate() const;
};

// Integrate dtheta/dt = R sin(theta) sqrt(cos^2(theta)+kappa^2) and
// da/dt = -R sin^2(theta) from (theta, a) = (eps, 0) until theta reaches the
// target angle. The crossing is localized by bisection on the final step to
// |theta - thetaT| <= 1e-12. Records omega and lambda_theta = omega at every
// step.
Trajectory integrate_optimal(PulseTarget target, const PulseParams& p,
                             const IntegratorConfig& cfg = {});

// Resample the trajectory's omega(t) onto a uniform grid with spacing
// ~dt_out (adjusted so the grid lands exactly on the final time), using
// monotone cubic interpolation. Endpoint samples are preserved.
ControlWaveform waveform_from_trajectory(const Trajectory& traj, double dt_out);

struct CartesianSample {
  double t = 0.0;
  Magnetization m;
};

// Integrate the Cartesian Bloch system with omega_x(t) = wave, omega_y = 0
// (control along the x-axis; M rotates in the yz-plane, phi = pi/2).
std::vector<CartesianSample> simulate_cartesian(const ControlWaveform& wave,
                                                const Magnetization& m0,
                                                double R,
                                                const IntegratorConfig& cfg = {});

struct SphericalSample {
  double t = 0.0;
  SphericalState s;
};

// Integrate the reduced (a, theta) system driven by a stored waveform
// (linear interpolation between samples), from theta(0) = theta0, a(0) = 0.
std::vector<SphericalSample> simulate_spherical(const ControlWaveform& wave,
                                                double theta0, double R,
                                                const IntegratorConfig& cfg = {});

} // namespace relaxo
