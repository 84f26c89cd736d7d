#include "relaxo/pmp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace relaxo {

namespace {

// Length of the uniformly spaced prefix of the records (the final event
// step may be shorter than the nominal step).
std::size_t uniform_prefix(const std::vector<TrajectoryPoint>& pts) {
  if (pts.size() < 2) return pts.size();
  const double dt = pts[1].t - pts[0].t;
  std::size_t n = 2;
  while (n < pts.size() &&
         std::fabs(pts[n].t - pts[n - 1].t - dt) <= 1e-9 * dt)
    ++n;
  return n;
}

// 4th-order first derivative on a uniform grid; one-sided at the edges.
std::vector<double> derivative4(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  const double inv = 1.0 / (12.0 * h);
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv;
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * inv;
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] +
              6.0 * f[n - 4] - f[n - 5]) *
             inv;
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] -
              16.0 * f[n - 4] + 3.0 * f[n - 5]) *
             inv;
  return d;
}

std::vector<double> adjoint_defect_series(const Trajectory& traj,
                                          double lambda_a) {
  const auto& pts = traj.points;
  if (pts.size() < 5)
    throw std::invalid_argument(
        "adjoint_defect: need >= 5 records for the differentiation stencil");
  const std::size_t n = uniform_prefix(pts);
  if (n < 5)
    throw std::invalid_argument(
        "adjoint_defect: records must be uniformly spaced in time");
  const double h = pts[1].t - pts[0].t;
  const double R = traj.params.R;

  std::vector<double> lam(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = pts[i].lambda_theta;
  const std::vector<double> dlam = derivative4(lam, h);

  std::vector<double> defect(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = pts[i].theta;
    const double rhs = pts[i].lambda_theta * R * std::cos(2.0 * th) +
                       lambda_a * R * std::sin(2.0 * th);
    defect[i] = std::fabs(dlam[i] - rhs);
  }
  return defect;
}

} // namespace

double hamiltonian(double omega, double theta, double lambda_theta,
                   double lambda_a, double R) {
  if (!std::isfinite(omega) || !std::isfinite(theta) ||
      !std::isfinite(lambda_theta) || !std::isfinite(lambda_a) ||
      !std::isfinite(R))
    throw std::invalid_argument("hamiltonian: non-finite input");
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return -0.5 * omega * omega + lambda_theta * (omega - R * s * c) -
         lambda_a * R * s * s;
}

double adjoint_defect(const Trajectory& traj, double lambda_a) {
  double worst = 0.0;
  for (double d : adjoint_defect_series(traj, lambda_a))
    worst = std::max(worst, d);
  return worst;
}

double stationarity_check(const Trajectory& traj) {
  double worst = 0.0;
  for (const auto& pt : traj.points)
    worst = std::max(worst, std::fabs(pt.omega - pt.lambda_theta));
  return worst;
}

CostateCheck verify_trajectory(const Trajectory& traj) {
  if (traj.points.empty())
    throw std::invalid_argument("verify_trajectory: empty trajectory");
  CostateCheck check;
  const double R = traj.params.R;
  check.lambda_a = 0.5 * traj.kappa * traj.kappa * R;

  double sum_h2 = 0.0;
  for (const auto& pt : traj.points) {
    const double h = std::fabs(
        hamiltonian(pt.omega, pt.theta, pt.lambda_theta, check.lambda_a, R));
    check.residual_h = std::max(check.residual_h, h);
    sum_h2 += h * h;
  }
  check.rms_h = std::sqrt(sum_h2 / static_cast<double>(traj.points.size()));

  const auto defects = adjoint_defect_series(traj, check.lambda_a);
  double sum_d2 = 0.0;
  for (double d : defects) {
    check.residual_adjoint = std::max(check.residual_adjoint, d);
    sum_d2 += d * d;
  }
  check.rms_adjoint = std::sqrt(sum_d2 / static_cast<double>(defects.size()));

  check.residual_stationarity = stationarity_check(traj);
  return check;
}

} // namespace relaxo
