#pragma once

#include <algorithm>
#include <array>
#include <vector>

namespace dlab::detail {

// Four-point Gauss-Legendre on [0, 1]; exact for polynomials of degree <= 7.
inline constexpr std::array<double, 4> kGaussX{0.06943184420297371, 0.33000947820757187,
                                               0.6699905217924281, 0.9305681557970262};
inline constexpr std::array<double, 4> kGaussW{0.17392742256872684, 0.3260725774312731,
                                               0.3260725774312731, 0.17392742256872684};

/// Piecewise-linear interpolation of samples v at increasing times t,
/// clamped at both ends.
inline double interpolate(const std::vector<double>& t, const std::vector<double>& v, double x) {
  if (x <= t.front()) return v.front();
  if (x >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const auto k = static_cast<std::size_t>(it - t.begin());
  const double s = (x - t[k - 1]) / (t[k] - t[k - 1]);
  return (1.0 - s) * v[k - 1] + s * v[k];
}

}  // namespace dlab::detail
