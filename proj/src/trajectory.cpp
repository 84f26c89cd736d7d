#include "relaxo/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relaxo/analytic.hpp"
#include "relaxo/interp.hpp"
#include "relaxo/log.hpp"

namespace relaxo {

namespace {

struct ThetaA {
  double theta, a;
};

// Right-hand side of the optimal flow: theta' from the feedback-substituted
// equation, a' from the magnitude equation.
ThetaA optimal_rhs(double theta, double R, double kappa) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return {R * s * std::sqrt(c * c + kappa * kappa), -R * s * s};
}

ThetaA rk4_optimal(const ThetaA& y, double h, double R, double kappa) {
  const ThetaA k1 = optimal_rhs(y.theta, R, kappa);
  const ThetaA k2 = optimal_rhs(y.theta + 0.5 * h * k1.theta, R, kappa);
  const ThetaA k3 = optimal_rhs(y.theta + 0.5 * h * k2.theta, R, kappa);
  const ThetaA k4 = optimal_rhs(y.theta + h * k3.theta, R, kappa);
  return {y.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
          y.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a)};
}

// Fehlberg 4(5) embedded pair for the same system; returns the 5th-order
// solution and the local error estimate on theta.
struct Rkf45Step {
  ThetaA y;
  double error;
};

Rkf45Step rkf45_optimal(const ThetaA& y, double h, double R, double kappa) {
  auto f = [&](double th) { return optimal_rhs(th, R, kappa); };
  const ThetaA k1 = f(y.theta);
  const ThetaA k2 = f(y.theta + h * (0.25 * k1.theta));
  const ThetaA k3 = f(y.theta + h * (3.0 / 32 * k1.theta + 9.0 / 32 * k2.theta));
  const ThetaA k4 = f(y.theta + h * (1932.0 / 2197 * k1.theta -
                                     7200.0 / 2197 * k2.theta +
                                     7296.0 / 2197 * k3.theta));
  const ThetaA k5 =
      f(y.theta + h * (439.0 / 216 * k1.theta - 8.0 * k2.theta +
                       3680.0 / 513 * k3.theta - 845.0 / 4104 * k4.theta));
  const ThetaA k6 =
      f(y.theta + h * (-8.0 / 27 * k1.theta + 2.0 * k2.theta -
                       3544.0 / 2565 * k3.theta + 1859.0 / 4104 * k4.theta -
                       11.0 / 40 * k5.theta));
  auto combine5 = [&](double c1, double c3, double c4, double c5, double c6,
                      auto get) {
    return get(y) + h * (c1 * get(k1) + c3 * get(k3) + c4 * get(k4) +
                         c5 * get(k5) + c6 * get(k6));
  };
  auto gt = [](const ThetaA& v) { return v.theta; };
  auto ga = [](const ThetaA& v) { return v.a; };
  const double th5 = combine5(16.0 / 135, 6656.0 / 12825, 28561.0 / 56430,
                              -9.0 / 50, 2.0 / 55, gt);
  const double a5 = combine5(16.0 / 135, 6656.0 / 12825, 28561.0 / 56430,
                             -9.0 / 50, 2.0 / 55, ga);
  const double th4 = y.theta + h * (25.0 / 216 * k1.theta + 1408.0 / 2565 * k3.theta +
                                    2197.0 / 4104 * k4.theta - 0.2 * k5.theta);
  return {{th5, a5}, std::fabs(th5 - th4)};
}

void check_state(const ThetaA& y) {
  if (!std::isfinite(y.theta) || !std::isfinite(y.a) || y.theta < 0.0 ||
      y.theta > M_PI)
    throw NumericalError("integrate_optimal: integrator instability, theta=" +
                         std::to_string(y.theta));
}

// Bisect the step size so the single step from y lands on theta_end to 1e-12.
template <class Step>
std::pair<double, ThetaA> localize_crossing(const ThetaA& y, double h_hi,
                                            double theta_end, Step step) {
  double lo = 0.0, hi = h_hi;
  ThetaA best = step(y, h_hi);
  double h_best = h_hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const ThetaA ymid = step(y, mid);
    if (std::fabs(ymid.theta - theta_end) < std::fabs(best.theta - theta_end)) {
      best = ymid;
      h_best = mid;
    }
    if (std::fabs(ymid.theta - theta_end) <= 1e-12) break;
    (ymid.theta < theta_end ? lo : hi) = mid;
  }
  best.theta = theta_end; // pin the endpoint; residual is below 1e-12
  return {h_best, best};
}

} // namespace

void IntegratorConfig::validate() const {
  if (dt < 0.0 || !std::isfinite(dt))
    throw std::invalid_argument("IntegratorConfig: dt must be >= 0");
  if (!(tol > 0.0))
    throw std::invalid_argument("IntegratorConfig: tol must be > 0");
  if (max_steps == 0)
    throw std::invalid_argument("IntegratorConfig: max_steps must be > 0");
}

Trajectory integrate_optimal(PulseTarget target, const PulseParams& p,
                             const IntegratorConfig& cfg) {
  p.validate();
  cfg.validate();
  const double kap = kappa(target, p.r);
  const double theta_end = target_angle(target, p.eps);
  const double t_estimate = duration(target, p);

  Trajectory traj;
  traj.params = p;
  traj.target = target;
  traj.kappa = kap;

  auto record = [&](double t, const ThetaA& y) {
    const double w = feedback_omega(y.theta, kap, p.R);
    traj.points.push_back({t, y.theta, y.a, w, w});
  };

  ThetaA y{p.eps, 0.0};
  double t = 0.0;
  record(t, y);

  if (cfg.method == IntegratorMethod::RK4) {
    const double dt = cfg.dt > 0.0 ? cfg.dt : t_estimate / 40000.0;
    traj.points.reserve(static_cast<std::size_t>(t_estimate / dt) + 64);
    auto step = [&](const ThetaA& s, double h) { return rk4_optimal(s, h, p.R, kap); };
    for (std::size_t n = 0; y.theta < theta_end; ++n) {
      if (n >= cfg.max_steps)
        throw NumericalError("integrate_optimal: step-count cap exceeded (" +
                             std::to_string(cfg.max_steps) + " steps)");
      const ThetaA y_next = step(y, dt);
      check_state(y_next);
      if (y_next.theta >= theta_end) {
        auto [h_event, y_end] = localize_crossing(y, dt, theta_end, step);
        t += h_event;
        record(t, y_end);
        break;
      }
      y = y_next;
      t += dt;
      record(t, y);
    }
  } else {
    double h = t_estimate / 1000.0;
    auto step = [&](const ThetaA& s, double hh) {
      return rkf45_optimal(s, hh, p.R, kap).y;
    };
    for (std::size_t n = 0; y.theta < theta_end; ++n) {
      if (n >= cfg.max_steps)
        throw NumericalError("integrate_optimal: step-count cap exceeded (" +
                             std::to_string(cfg.max_steps) + " steps)");
      const Rkf45Step trial = rkf45_optimal(y, h, p.R, kap);
      if (trial.error > cfg.tol) {
        h *= std::max(0.1, 0.9 * std::pow(cfg.tol / trial.error, 0.2));
        continue;
      }
      check_state(trial.y);
      if (trial.y.theta >= theta_end) {
        auto [h_event, y_end] = localize_crossing(y, h, theta_end, step);
        t += h_event;
        record(t, y_end);
        break;
      }
      y = trial.y;
      t += h;
      record(t, y);
      if (trial.error > 0.0)
        h = std::min(h * std::min(5.0, 0.9 * std::pow(cfg.tol / trial.error, 0.2)),
                     t_estimate / 10.0);
    }
  }

  log::debug("integrate_optimal: " + std::to_string(traj.points.size()) +
             " records, T=" + std::to_string(traj.duration()) +
             ", a(T)=" + std::to_string(traj.points.back().a));
  return traj;
}

ControlWaveform waveform_from_trajectory(const Trajectory& traj, double dt_out) {
  if (traj.points.size() < 2)
    throw std::invalid_argument("waveform_from_trajectory: trajectory too short");
  if (!(dt_out > 0.0))
    throw std::invalid_argument("waveform_from_trajectory: dt_out must be > 0");
  const double t_begin = traj.points.front().t;
  const double span = traj.duration();
  if (dt_out > span)
    throw std::invalid_argument(
        "waveform_from_trajectory: dt_out exceeds trajectory span");

  std::vector<double> ts, ws;
  ts.reserve(traj.points.size());
  ws.reserve(traj.points.size());
  for (const auto& pt : traj.points) {
    ts.push_back(pt.t);
    ws.push_back(pt.omega);
  }
  const PchipInterpolant interp(std::move(ts), std::move(ws));

  const auto n_out = static_cast<std::size_t>(std::lround(span / dt_out)) + 1;
  const double dt = span / static_cast<double>(n_out - 1);
  ControlWaveform wave;
  wave.t0 = t_begin;
  wave.dt = dt;
  wave.omega.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i)
    wave.omega[i] = interp(t_begin + dt * static_cast<double>(i));
  wave.omega.front() = traj.points.front().omega;
  wave.omega.back() = traj.points.back().omega;
  return wave;
}

std::vector<CartesianSample> simulate_cartesian(const ControlWaveform& wave,
                                                const Magnetization& m0,
                                                double R,
                                                const IntegratorConfig& cfg) {
  wave.validate();
  cfg.validate();
  if (!(R > 0.0)) throw std::invalid_argument("simulate_cartesian: R must be > 0");
  if (!m0.finite())
    throw std::invalid_argument("simulate_cartesian: non-finite initial state");

  const double span = wave.span();
  const double dt = cfg.dt > 0.0 ? cfg.dt : (span > 0.0 ? span / 40000.0 : 1.0);
  auto rhs = [&](double t, const Magnetization& m) {
    return cartesian_derivative(m, wave.sample(t), 0.0, R);
  };
  auto add = [](const Magnetization& m, const Magnetization& d, double h) {
    return Magnetization{m.mx + h * d.mx, m.my + h * d.my, m.mz + h * d.mz};
  };

  std::vector<CartesianSample> out;
  out.reserve(static_cast<std::size_t>(span / dt) + 2);
  Magnetization m = m0;
  double t = wave.t0;
  out.push_back({t, m});
  const double t_end = wave.t0 + span;
  while (t < t_end - 1e-15 * std::max(1.0, std::fabs(t_end))) {
    const double h = std::min(dt, t_end - t);
    const Magnetization k1 = rhs(t, m);
    const Magnetization k2 = rhs(t + 0.5 * h, add(m, k1, 0.5 * h));
    const Magnetization k3 = rhs(t + 0.5 * h, add(m, k2, 0.5 * h));
    const Magnetization k4 = rhs(t + h, add(m, k3, h));
    m = Magnetization{m.mx + h / 6.0 * (k1.mx + 2.0 * k2.mx + 2.0 * k3.mx + k4.mx),
                      m.my + h / 6.0 * (k1.my + 2.0 * k2.my + 2.0 * k3.my + k4.my),
                      m.mz + h / 6.0 * (k1.mz + 2.0 * k2.mz + 2.0 * k3.mz + k4.mz)};
    if (!m.finite())
      throw NumericalError("simulate_cartesian: integrator instability");
    t += h;
    out.push_back({t, m});
  }
  return out;
}

std::vector<SphericalSample> simulate_spherical(const ControlWaveform& wave,
                                                double theta0, double R,
                                                const IntegratorConfig& cfg) {
  wave.validate();
  cfg.validate();
  if (!(R > 0.0)) throw std::invalid_argument("simulate_spherical: R must be > 0");

  const double span = wave.span();
  const double dt = cfg.dt > 0.0 ? cfg.dt : (span > 0.0 ? span / 40000.0 : 1.0);
  auto rhs = [&](double t, const ThetaA& y) -> ThetaA {
    const double w = wave.sample(t);
    const double s = std::sin(y.theta), c = std::cos(y.theta);
    return {w - R * s * c, -R * s * s};
  };

  std::vector<SphericalSample> out;
  out.reserve(static_cast<std::size_t>(span / dt) + 2);
  ThetaA y{theta0, 0.0};
  double t = wave.t0;
  out.push_back({t, {y.a, y.theta}});
  const double t_end = wave.t0 + span;
  while (t < t_end - 1e-15 * std::max(1.0, std::fabs(t_end))) {
    const double h = std::min(dt, t_end - t);
    const ThetaA k1 = rhs(t, y);
    const ThetaA k2 = rhs(t + 0.5 * h, {y.theta + 0.5 * h * k1.theta, 0.0});
    const ThetaA k3 = rhs(t + 0.5 * h, {y.theta + 0.5 * h * k2.theta, 0.0});
    const ThetaA k4 = rhs(t + h, {y.theta + h * k3.theta, 0.0});
    y = {y.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
         y.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a)};
    if (!std::isfinite(y.theta) || !std::isfinite(y.a))
      throw NumericalError("simulate_spherical: integrator instability");
    t += h;
    out.push_back({t, {y.a, y.theta}});
  }
  return out;
}

} // namespace relaxo
