#pragma once

// Monotone cubic Hermite interpolation (Fritsch-Carlson). Shape-preserving:
// no overshoot between nodes, which matters when resampling the steeply
// rising control near theta = pi/2 at large kappa.

#include <cstddef>
#include <vector>

namespace relaxo {

class PchipInterpolant {
 public:
  // x must be strictly increasing and at least 2 points long.
  PchipInterpolant(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<double> x_, y_, d_; // d_: nodal derivatives
};

} // namespace relaxo
