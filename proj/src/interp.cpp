#include "relaxo/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relaxo {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Endpoint derivative: three-point one-sided estimate with the usual
// monotonicity clamps.
double edge_derivative(double h0, double h1, double d0, double d1) {
  double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (sign(d) != sign(d0)) {
    d = 0.0;
  } else if (sign(d0) != sign(d1) && std::fabs(d) > 3.0 * std::fabs(d0)) {
    d = 3.0 * d0;
  }
  return d;
}

} // namespace

PchipInterpolant::PchipInterpolant(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw std::invalid_argument("PchipInterpolant: need >= 2 matching nodes");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(x_[i + 1] > x_[i]))
      throw std::invalid_argument("PchipInterpolant: x must be strictly increasing");

  std::vector<double> h(n - 1), slope(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    slope[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = slope[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (slope[i - 1] * slope[i] <= 0.0) {
      d_[i] = 0.0;
    } else {
      // Weighted harmonic mean of adjacent slopes.
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
    }
  }
  d_[0] = edge_derivative(h[0], h[1], slope[0], slope[1]);
  d_[n - 1] = edge_derivative(h[n - 2], h[n - 3], slope[n - 2], slope[n - 3]);
}

double PchipInterpolant::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (x - x_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

} // namespace relaxo
