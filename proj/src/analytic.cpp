#include "relaxo/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "relaxo/quadrature.hpp"

namespace relaxo {

namespace {

void check_ratio(double r) {
  if (!std::isfinite(r) || r <= 0.0 || r >= 1.0)
    throw std::invalid_argument("r must lie in (0,1)");
}

double magnitude_w(double theta, double kappa) {
  const double c = std::cos(theta);
  return std::sqrt(c * c + kappa * kappa);
}

// Antiderivative of sin(theta)/sqrt(cos^2(theta)+kappa^2).
double attenuation_primitive(double theta, double kappa) {
  return -std::asinh(std::cos(theta) / kappa);
}

} // namespace

double kappa(PulseTarget target, double r) {
  check_ratio(r);
  if (target == PulseTarget::HalfPi) return 2.0 * r / (1.0 - r * r);
  return 2.0 * std::sqrt(r) / (1.0 - r);
}

double feedback_omega(double theta, double kappa, double R) {
  if (!(kappa > 0.0) || !(R > 0.0))
    throw std::invalid_argument("feedback_omega: kappa and R must be > 0");
  if (!(theta >= -1e-9 && theta <= M_PI + 1e-9))
    throw std::invalid_argument("feedback_omega: theta outside [0, pi]");
  const double c = std::cos(theta);
  return R * std::sin(theta) * (c + magnitude_w(theta, kappa));
}

double constraint_residual(double kappa, PulseTarget target, double r,
                           double eps) {
  check_ratio(r);
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  const double theta_end = target_angle(target, eps);
  return attenuation_primitive(theta_end, kappa) -
         attenuation_primitive(eps, kappa) + std::log(r);
}

double constraint_residual_quadrature(double kappa, PulseTarget target,
                                      double r, double eps) {
  check_ratio(r);
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  const double theta_end = target_angle(target, eps);
  const double integral = quad::integrate_or_throw(
      [kappa](double th) { return std::sin(th) / magnitude_w(th, kappa); }, eps,
      theta_end);
  return integral + std::log(r);
}

double duration(PulseTarget target, const PulseParams& p) {
  p.validate();
  const double r = p.r;
  if (target == PulseTarget::HalfPi) {
    return (1.0 - r * r) / (1.0 + r * r) *
           (std::log((1.0 + r * r) / r) - std::log(p.eps)) / p.R;
  }
  const double onepr = 1.0 + r;
  return (1.0 - r) / onepr *
         (std::log(onepr * onepr / r) - 2.0 * std::log(p.eps)) / p.R;
}

double duration_quadrature(PulseTarget target, const PulseParams& p,
                           double kappa) {
  p.validate();
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  const double R = p.R;
  const double theta_end = target_angle(target, p.eps);
  auto integrand = [R, kappa](double th) {
    return 1.0 / (R * std::sin(th) * magnitude_w(th, kappa));
  };

  // Split point between the log-substituted endpoint stretch and the
  // direct mid-range integral.
  const double cut = std::min(0.5, 0.5 * (p.eps + M_PI / 2.0));
  double total = 0.0;
  // Lower stretch in u = ln(theta): integrand ~ 1/theta becomes bounded.
  total += quad::integrate_or_throw(
      [&](double u) {
        const double th = std::exp(u);
        return integrand(th) * th;
      },
      std::log(p.eps), std::log(cut));
  if (target == PulseTarget::HalfPi) {
    total += quad::integrate_or_throw(integrand, cut, theta_end);
  } else {
    total += quad::integrate_or_throw(integrand, cut, M_PI - cut);
    // Upper stretch in v = ln(pi - theta), same 1/angle behavior.
    total += quad::integrate_or_throw(
        [&](double v) {
          const double gap = std::exp(v);
          return integrand(M_PI - gap) * gap;
        },
        std::log(p.eps), std::log(cut));
  }
  return total;
}

double energy(PulseTarget target, const PulseParams& p) {
  p.validate();
  const double r = p.r;
  if (target == PulseTarget::HalfPi) return p.R / (1.0 - r * r);
  return p.R * (1.0 + r) / (1.0 - r);
}

double energy_quadrature(PulseTarget target, const PulseParams& p,
                         double kappa) {
  p.validate();
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  const double R = p.R;
  const double theta_end = target_angle(target, p.eps);
  // omega^2/(2 thetadot) with the common sin(theta) cancelled:
  //   (R/2) sin(theta) (cos(theta) + W)^2 / W, bounded on [0, pi].
  auto integrand = [R, kappa](double th) {
    const double c = std::cos(th);
    const double w = magnitude_w(th, kappa);
    const double cw = c + w;
    return 0.5 * R * std::sin(th) * cw * cw / w;
  };
  double total = quad::integrate_or_throw(integrand, p.eps,
                                          std::min(M_PI / 2.0, theta_end));
  if (theta_end > M_PI / 2.0)
    total += quad::integrate_or_throw(integrand, M_PI / 2.0, theta_end);
  return total;
}

AnalyticSolution analyze(PulseTarget target, const PulseParams& p) {
  p.validate();
  AnalyticSolution sol;
  sol.kappa = kappa(target, p.r);
  sol.duration = duration(target, p);
  sol.energy = energy(target, p);
  sol.params = p;
  sol.target = target;
  return sol;
}

} // namespace relaxo
