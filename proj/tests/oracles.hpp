#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerical routines; each oracle is a direct brute-force
// evaluation of the defining formula.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline double p(double rho, double a, double g) { return a * std::pow(rho, g); }
inline double P(double rho, double a, double g) { return a / (g - 1.0) * std::pow(rho, g); }

/// Energy of arrays (rho, mx, my) with cell volume `vol`.
inline double energy_sum(const std::vector<double>& rho, const std::vector<double>& mx,
                         const std::vector<double>& my, double vol, double a, double g) {
  double s = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double m2 = mx[k] * mx[k] + my[k] * my[k];
    double kin = 0.0;
    if (m2 > 0.0) kin = rho[k] > 0.0 ? m2 / rho[k] : std::numeric_limits<double>::infinity();
    s += 0.5 * kin + P(rho[k], a, g);
  }
  return s * vol;
}

/// sup_X S:X - F(X) by dense search over symmetric 2x2 X, refined around the
/// best sample twice. F(X) = mu |X0|^2 + eta/2 (tr X)^2.
inline double conjugate_by_search(std::array<double, 3> S, double mu, double eta, int dim) {
  auto value = [&](double xx, double xy, double yy) {
    if (dim == 1) {
      xy = 0.0;
      yy = 0.0;
    }
    const double tr = dim == 1 ? xx : xx + yy;
    const double m = tr / dim;
    const double d0xx = xx - m, d0yy = dim == 1 ? 0.0 : yy - m;
    const double dev = dim == 1 ? 0.0 : d0xx * d0xx + 2 * xy * xy + d0yy * d0yy;
    const double F = mu * dev + 0.5 * eta * tr * tr;
    const double SX = S[0] * xx + 2 * S[1] * xy + (dim == 1 ? 0.0 : S[2] * yy);
    return SX - F;
  };
  std::array<double, 3> c{0.0, 0.0, 0.0};
  double span = 4.0;
  double best = value(0, 0, 0);
  for (int round = 0; round < 6; ++round) {
    const int n = 24;
    std::array<double, 3> bc = c;
    for (int i = -n; i <= n; ++i)
      for (int j = (dim == 1 ? 0 : -n); j <= (dim == 1 ? 0 : n); ++j)
        for (int k = (dim == 1 ? 0 : -n); k <= (dim == 1 ? 0 : n); ++k) {
          const double xx = c[0] + span * i / n, xy = c[1] + span * j / n, yy = c[2] + span * k / n;
          const double v = value(xx, xy, yy);
          if (v > best) {
            best = v;
            bc = {xx, xy, yy};
          }
        }
    c = bc;
    span /= 8.0;
  }
  return best;
}

/// Per-cell scan of the explicit step bound.
inline double dt_scan(const std::vector<double>& rho, const std::vector<double>& mx,
                      const std::vector<double>& my, double h, int dim, double a, double g,
                      double eps, double mu, double eta, double cfl) {
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double u = std::hypot(mx[k], my[k]) / rho[k];
    const double c = std::sqrt(g * p(rho[k], a, g) / rho[k]);
    dt = std::min(dt, h / (dim * (u + c)));
    if (eps > 0.0) dt = std::min(dt, h * h * rho[k] / (2.0 * eps * (2.0 * mu + eta)));
  }
  return cfl * dt;
}

/// Block means of a 1D or 2D array (x fastest) with factor H.
inline std::vector<double> block_mean(const std::vector<double>& v, int n, int dim, int H) {
  const int nc = n / H;
  std::vector<double> out(dim == 1 ? nc : nc * nc, 0.0);
  const double w = 1.0 / (dim == 1 ? H : H * H);
  for (int j = 0; j < (dim == 1 ? 1 : n); ++j)
    for (int i = 0; i < n; ++i) {
      const int bi = i / H, bj = j / H;
      out[bi + (dim == 1 ? 0 : nc * bj)] += w * v[i + n * j];
    }
  return out;
}

/// Eigenvalues of the symmetric matrix [[a, b], [b, c]] by the quadratic formula.
inline std::array<double, 2> eig2(double a, double b, double c) {
  const double tr = a + c, det = a * c - b * b;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return {tr / 2.0 - disc, tr / 2.0 + disc};
}

/// Exact integral over [lo, hi] of cos(pi k x) (sine = false) or sin(pi k x).
inline double trig_integral(int k, bool sine, double lo, double hi) {
  if (k == 0) return sine ? 0.0 : hi - lo;
  const double w = std::numbers::pi * k;
  if (!sine) return (std::sin(w * hi) - std::sin(w * lo)) / w;
  return (std::cos(w * lo) - std::cos(w * hi)) / w;
}

}  // namespace oracle

namespace oracle {

/// Exact simple wave of the gamma law with Riemann invariant
/// u - 2c/(gamma-1) held at its rest value (rho = 1, u = 0). The forward
/// speed lambda = u + c solves Burgers with lambda(x, 0) = c0 + amp sin(pi x);
/// valid before breaking, t < 1 / (pi amp).
struct SimpleWave {
  double amp, a, g;

  double c_of_rho(double rho) const { return std::sqrt(g * a * std::pow(rho, g - 1.0)); }

  std::array<double, 2> state(double x, double t) const {
    const double c0 = c_of_rho(1.0);
    const double w = -2.0 * c0 / (g - 1.0);
    const double pi = std::numbers::pi;
    double xi = x - c0 * t;
    for (int it = 0; it < 60; ++it) {
      const double lam = c0 + amp * std::sin(pi * xi);
      const double f = xi + lam * t - x;
      const double df = 1.0 + amp * pi * std::cos(pi * xi) * t;
      const double step = f / df;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double lam = c0 + amp * std::sin(pi * xi);
    const double c = (lam - w) * (g - 1.0) / (g + 1.0);
    const double rho = std::pow(c * c / (g * a), 1.0 / (g - 1.0));
    return {rho, rho * (lam - c)};
  }

  /// Cell averages over [lo, lo + h] by five-point Gauss-Legendre.
  std::array<double, 2> cell_average(double lo, double h, double t) const {
    static constexpr double X[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                    0.5384693101056831, 0.9061798459386640};
    static constexpr double W[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                    0.4786286704993665, 0.2369268850561891};
    std::array<double, 2> s{0.0, 0.0};
    for (int q = 0; q < 5; ++q) {
      const auto v = state(lo + 0.5 * h * (1.0 + X[q]), t);
      s[0] += 0.5 * W[q] * v[0];
      s[1] += 0.5 * W[q] * v[1];
    }
    return s;
  }
};

}  // namespace oracle
