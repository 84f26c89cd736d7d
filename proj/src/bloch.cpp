#include "relaxo/bloch.hpp"

#include <cmath>
#include <stdexcept>

namespace relaxo {

void PulseParams::validate() const {
  if (!std::isfinite(R) || R <= 0.0)
    throw std::invalid_argument("PulseParams: R must be finite and > 0");
  if (!std::isfinite(r) || r <= 0.0 || r >= 1.0)
    throw std::invalid_argument("PulseParams: r must lie in (0,1)");
  if (!std::isfinite(eps) || eps <= 0.0 || eps >= M_PI / 4.0)
    throw std::invalid_argument("PulseParams: eps must lie in (0, pi/4)");
}

double target_angle(PulseTarget target, double eps) {
  return target == PulseTarget::HalfPi ? M_PI / 2.0 : M_PI - eps;
}

const char* target_name(PulseTarget target) {
  return target == PulseTarget::HalfPi ? "pi2" : "pi";
}

double ControlWaveform::sample(double t) const {
  if (omega.empty()) throw std::invalid_argument("waveform is empty");
  if (omega.size() == 1) return omega.front();
  const double s = (t - t0) / dt;
  if (s <= 0.0) return omega.front();
  const auto last = static_cast<double>(omega.size() - 1);
  if (s >= last) return omega.back();
  const auto i = static_cast<std::size_t>(s);
  const double frac = s - static_cast<double>(i);
  return omega[i] + frac * (omega[i + 1] - omega[i]);
}

double ControlWaveform::energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < omega.size(); ++i)
    e += 0.25 * (omega[i] * omega[i] + omega[i + 1] * omega[i + 1]) * dt;
  return e;
}

void ControlWaveform::validate() const {
  if (omega.empty())
    throw std::invalid_argument("ControlWaveform: empty sample sequence");
  if (!std::isfinite(dt) || dt <= 0.0)
    throw std::invalid_argument("ControlWaveform: dt must be finite and > 0");
  if (!std::isfinite(t0))
    throw std::invalid_argument("ControlWaveform: t0 must be finite");
  for (double w : omega)
    if (!std::isfinite(w))
      throw std::invalid_argument("ControlWaveform: non-finite sample");
}

double Trajectory::energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double h = points[i + 1].t - points[i].t;
    e += 0.25 * (points[i].omega * points[i].omega +
                 points[i + 1].omega * points[i + 1].omega) *
         h;
  }
  return e;
}

Magnetization cartesian_derivative(const Magnetization& m, double omega_x,
                                   double omega_y, double R) {
  if (!m.finite() || !std::isfinite(omega_x) || !std::isfinite(omega_y) ||
      !std::isfinite(R))
    throw std::invalid_argument("cartesian_derivative: non-finite input");
  if (R <= 0.0) throw std::invalid_argument("cartesian_derivative: R must be > 0");
  return Magnetization{
      -R * m.mx - omega_y * m.mz,       // d(mx)/dt
      -R * m.my + omega_x * m.mz,       // d(my)/dt
      omega_y * m.mx - omega_x * m.my}; // d(mz)/dt
}

SphericalCoords to_spherical(const Magnetization& m, double m0) {
  if (!std::isfinite(m0) || m0 <= 0.0)
    throw std::invalid_argument("to_spherical: m0 must be > 0");
  const double mag = m.norm();
  if (mag == 0.0 || !std::isfinite(mag))
    throw std::domain_error("to_spherical: zero magnitude, theta undefined");
  const double mperp = std::hypot(m.mx, m.my);
  SphericalCoords out;
  out.state.a = std::log(mag / m0);
  out.state.theta = std::atan2(mperp, m.mz); // in [0, pi]
  out.phi = std::atan2(m.my, m.mx);
  return out;
}

Magnetization from_spherical(const SphericalCoords& s, double m0) {
  if (!std::isfinite(m0) || m0 <= 0.0)
    throw std::invalid_argument("from_spherical: m0 must be > 0");
  const double mag = m0 * std::exp(s.state.a);
  const double st = std::sin(s.state.theta);
  return Magnetization{mag * st * std::cos(s.phi), mag * st * std::sin(s.phi),
                       mag * std::cos(s.state.theta)};
}

SphericalRate spherical_derivative(const SphericalState& s, double omega,
                                   double R) {
  if (R <= 0.0) throw std::invalid_argument("spherical_derivative: R must be > 0");
  const double st = std::sin(s.theta);
  const double ct = std::cos(s.theta);
  return SphericalRate{-R * st * st, omega - R * st * ct};
}

} // namespace relaxo
