#pragma once

// Core value types shared across the relaxo library.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relaxo {

// Thrown when an iterative numerical procedure fails (quadrature budget,
// integrator instability, step-count caps, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the direct optimizer on hard failure; carries the objective
// history so callers can dump a trace.
class OptimizationFailure : public NumericalError {
 public:
  OptimizationFailure(const std::string& what, std::vector<double> trace)
      : NumericalError(what), objective_trace(std::move(trace)) {}
  std::vector<double> objective_trace;
};

// Which rotation is requested. HalfPi drives the polar angle to pi/2,
// Pi drives it to pi - eps (theta = pi is an equilibrium, never reached).
enum class PulseTarget { HalfPi, Pi };

struct PulseParams {
  double R = 1.0;    // transverse relaxation rate [1/time]
  double r = 0.6;    // magnitude ratio M(T)/M(0), in (0,1)
  double eps = 1e-3; // endpoint regularization angle [rad]

  void validate() const;
};

// Final polar angle for a target: pi/2, or pi - eps.
double target_angle(PulseTarget target, double eps);

const char* target_name(PulseTarget target); // "pi2" | "pi"

struct Magnetization {
  double mx = 0.0;
  double my = 0.0;
  double mz = 0.0;

  double norm() const { return std::sqrt(mx * mx + my * my + mz * mz); }
  bool finite() const {
    return std::isfinite(mx) && std::isfinite(my) && std::isfinite(mz);
  }
};

// Reduced state: a = ln[M(t)/M(0)], theta = polar angle. The azimuth is not
// part of the state; it stays constant under a perpendicular control.
struct SphericalState {
  double a = 0.0;
  double theta = 0.0;
};

// (da/dt, dtheta/dt) pair.
struct SphericalRate {
  double da = 0.0;
  double dtheta = 0.0;
};

// to_spherical output: reduced state plus the azimuth phi.
struct SphericalCoords {
  SphericalState state;
  double phi = 0.0;
};

// Uniformly sampled control amplitude omega(t).
struct ControlWaveform {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> omega;

  std::size_t size() const { return omega.size(); }
  double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double span() const {
    return omega.empty() ? 0.0 : dt * static_cast<double>(omega.size() - 1);
  }
  // Linear interpolation, clamped to the end samples outside the grid.
  double sample(double t) const;
  // Trapezoid tally of the pulse energy integral of omega^2/2.
  double energy() const;

  void validate() const;
};

struct TrajectoryPoint {
  double t = 0.0;
  double theta = 0.0;
  double a = 0.0;
  double omega = 0.0;
  double lambda_theta = 0.0;
};

// Synthesized optimal trajectory: state samples plus the problem it solves.
// lambda_theta equals omega at every record.
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  PulseParams params;
  PulseTarget target = PulseTarget::HalfPi;
  double kappa = 0.0;

  std::size_t size() const { return points.size(); }
  double duration() const {
    return points.empty() ? 0.0 : points.back().t - points.front().t;
  }
  // Trapezoid tally of the energy integral of omega^2/2 over the records.
  double energy() const;
};

} // namespace relaxo
