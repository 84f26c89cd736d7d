#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature on a finite interval.
// Bisection of the worst panel until the summed error estimate meets the
// tolerance or the panel budget runs out.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "relaxo/types.hpp"

namespace relaxo::quad {

struct Result {
  double value = 0.0;
  double error = 0.0; // summed panel error estimate
  int panels = 0;
  bool converged = false;
};

namespace detail {

// K15 abscissae on [0,1]; rows: node, Gauss-7 weight, Kronrod-15 weight.
inline constexpr double kNodes[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529}};

template <class F>
std::pair<double, double> g7k15(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double g7 = kNodes[0][1] * f0;
  double k15 = kNodes[0][2] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kNodes[i][0];
    const double fi = f(mid + dx) + f(mid - dx);
    g7 += kNodes[i][1] * fi;
    k15 += kNodes[i][2] * fi;
  }
  g7 *= half;
  k15 *= half;
  // QUADPACK-style error heuristic.
  double err = std::pow(200.0 * std::fabs(g7 - k15), 1.5);
  return {k15, err};
}

} // namespace detail

template <class F>
Result integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                 double rel_tol = 1e-12, int max_panels = 4000) {
  Result res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  struct Panel {
    double a, b, value, error;
  };
  auto [v0, e0] = detail::g7k15(f, a, b);
  std::vector<Panel> panels{{a, b, v0, e0}};
  res.panels = 1;
  for (;;) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].error;
      if (panels[i].error > panels[worst].error) worst = i;
    }
    res.value = total;
    res.error = err;
    if (err <= abs_tol || err <= rel_tol * std::fabs(total)) {
      res.converged = true;
      return res;
    }
    if (res.panels >= max_panels || !std::isfinite(total)) return res;
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    auto [vl, el] = detail::g7k15(f, p.a, mid);
    auto [vr, er] = detail::g7k15(f, mid, p.b);
    panels[worst] = {p.a, mid, vl, el};
    panels.push_back({mid, p.b, vr, er});
    ++res.panels;
  }
}

template <class F>
double integrate_or_throw(F&& f, double a, double b, double abs_tol = 1e-10,
                          double rel_tol = 1e-12, int max_panels = 4000) {
  const Result r = integrate(std::forward<F>(f), a, b, abs_tol, rel_tol, max_panels);
  if (!r.converged)
    throw NumericalError("quadrature did not converge on [" +
                         std::to_string(a) + ", " + std::to_string(b) +
                         "]: error estimate " + std::to_string(r.error) +
                         " after " + std::to_string(r.panels) + " panels");
  return r.value;
}

} // namespace relaxo::quad
