#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace dlab {

// Small fixed-size algebra for d <= 2. One-dimensional quantities use only
// the first component; the second stays exactly zero.

using Vec2 = std::array<double, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(const Vec2& a) { return dot(a, a); }

/// Full 2x2 matrix, row-major: m[i][j] = d u_i / d x_j for velocity gradients.
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Symmetric 2x2 matrix stored as (xx, xy, yy).
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static Sym2 identity(int dim) { return dim == 1 ? Sym2{1.0, 0.0, 0.0} : Sym2{1.0, 0.0, 1.0}; }
  static Sym2 outer(const Vec2& a, const Vec2& b) {
    return {a[0] * b[0], 0.5 * (a[0] * b[1] + a[1] * b[0]), a[1] * b[1]};
  }
  static Sym2 sym_part(const Mat2& g) { return {g[0][0], 0.5 * (g[0][1] + g[1][0]), g[1][1]}; }

  double trace() const { return xx + yy; }
  /// Frobenius inner product A:B.
  double contract(const Sym2& o) const { return xx * o.xx + 2.0 * xy * o.xy + yy * o.yy; }
  double contract(const Mat2& g) const {
    return xx * g[0][0] + xy * (g[0][1] + g[1][0]) + yy * g[1][1];
  }
  double quadratic_form(const Vec2& v) const {
    return xx * v[0] * v[0] + 2.0 * xy * v[0] * v[1] + yy * v[1] * v[1];
  }
  Vec2 apply(const Vec2& v) const { return {xx * v[0] + xy * v[1], xy * v[0] + yy * v[1]}; }

  /// Closed-form eigenvalues, ascending.
  std::array<double, 2> eigenvalues() const {
    const double mean = 0.5 * (xx + yy);
    const double radius = std::hypot(0.5 * (xx - yy), xy);
    return {mean - radius, mean + radius};
  }
  /// Smallest eigenvalue restricted to the first `dim` coordinates.
  double min_eigenvalue(int dim) const { return dim == 1 ? xx : eigenvalues()[0]; }

  Sym2& operator+=(const Sym2& o) {
    xx += o.xx;
    xy += o.xy;
    yy += o.yy;
    return *this;
  }
  Sym2& operator-=(const Sym2& o) {
    xx -= o.xx;
    xy -= o.xy;
    yy -= o.yy;
    return *this;
  }
  Sym2& operator*=(double s) {
    xx *= s;
    xy *= s;
    yy *= s;
    return *this;
  }
  friend Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
  friend Sym2 operator-(Sym2 a, const Sym2& b) { return a -= b; }
  friend Sym2 operator*(double s, Sym2 a) { return a *= s; }
  friend bool operator==(const Sym2&, const Sym2&) = default;
};

/// Frobenius norm, counting the off-diagonal entry twice.
inline double frobenius(const Sym2& a) { return std::sqrt(a.contract(a)); }

}  // namespace dlab
