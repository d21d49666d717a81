#pragma once
// Shared value types and error taxonomy.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankone {

struct NyquistViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QuadratureNotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ScheduleDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooManyEscapes : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoneFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vec2 = std::array<double, 2>;

struct Mat2 {
  // row-major: [m00 m01; m10 m11]
  double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;

  static Mat2 identity() { return {}; }

  Vec2 apply(Vec2 v) const {
    return {m00 * v[0] + m01 * v[1], m10 * v[0] + m11 * v[1]};
  }
  Mat2 transpose() const { return {m00, m10, m01, m11}; }
  double det() const { return m00 * m11 - m01 * m10; }
  Mat2 inverse() const {
    double d = det();
    return {m11 / d, -m01 / d, -m10 / d, m00 / d};
  }
  bool is_identity() const {
    return m00 == 1.0 && m01 == 0.0 && m10 == 0.0 && m11 == 1.0;
  }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
          a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

// Deterministic pairwise reduction; the split points depend only on n, never
// on thread count, so parallel callers fill the buffer and reduce serially.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

// Symmetric two-interval set (-b,-a) u (a,b); measure convention 2(b-a).
struct Window {
  double a = 0.0;
  double b = 1.0;

  Window(double a_, double b_) : a(a_), b(b_) {
    if (!(a >= 0.0) || !(a < b)) {
      throw std::invalid_argument("Window requires 0 <= a < b");
    }
  }
  double measure() const { return 2.0 * (b - a); }
  double length() const { return b - a; }  // one half
};

// Uniform grid of sampled nonnegative values; 1D when ny == 1, else a
// row-major ny x nx field with square cells of side `step`.
struct SampledDensity {
  Vec2 origin{0.0, 0.0};
  double step = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 1;
  std::vector<double> values;

  bool is1d() const { return ny == 1; }
  double tau1(std::size_t ix) const { return origin[0] + double(ix) * step; }
  double tau2(std::size_t iy) const { return origin[1] + double(iy) * step; }
  double& at(std::size_t ix, std::size_t iy) { return values[iy * nx + ix]; }
  double at(std::size_t ix, std::size_t iy) const {
    return values[iy * nx + ix];
  }

  // Riemann mass of the sampled field (cells of measure step or step^2)
  double integral() const {
    double cell = is1d() ? step : step * step;
    return cell * pairwise_sum(values);
  }
  double max_value() const {
    double m = 0.0;
    for (double v : values) m = v > m ? v : m;
    return m;
  }
  bool same_grid(const SampledDensity& o) const {
    return origin == o.origin && step == o.step && nx == o.nx && ny == o.ny;
  }
};

}  // namespace rankone
