#pragma once
// Normalized exponential sums and their sampled square moduli. The grid
// kernels are the hot path: every sample reduces tau * frequency mod 1 in
// double-double before any trig call, so phases stay faithful even when the
// raw product is far past 2^53.

#include <complex>
#include <cstddef>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/types.hpp"

namespace rankone {

inline constexpr double kTwoPi = 0x1.921fb54442d18p+2;

// q^{-1/2} * sum_y e(tau * frequencies[y]); frequencies strictly increasing
struct ExpSum1D {
  std::vector<double> frequencies;
  double norm = 1.0;  // 1/sqrt(q)

  static ExpSum1D from_geometry(const StageGeometry& g);
  static ExpSum1D from_frequencies(std::vector<double> f);

  std::size_t q() const { return frequencies.size(); }
  double spread() const {
    return frequencies.size() < 2 ? 0.0
                                  : frequencies.back() - frequencies.front();
  }
};

// fixed summation order y = 0..q-1
std::complex<double> eval_point(const ExpSum1D& s, double tau);

// aliasing guard for sampled |P|^2; +inf when the sum has no spread
double nyquist_step(const ExpSum1D& s);

// |P|^2 at origin + k*step for k = 0..count-1. Throws NyquistViolation when
// step > nyquist_step(s) and the caller did not override. OpenMP across
// samples; identical results for any partitioning.
SampledDensity eval_grid(const ExpSum1D& s, double origin, double step,
                         std::size_t count, bool overrideNyquist = false);

// P(tau) = P_x(u1) * P_y(u2) with u = frame^T tau
struct ExpSum2D {
  ExpSum1D x, y;
  Mat2 frame;
};

std::complex<double> eval_point_2d(const ExpSum2D& s, Vec2 tau);

// |P|^2 on a row-major ny x nx grid with square cells; the identity-frame
// fast path is the exact outer product of the two 1D grids
SampledDensity eval_grid_2d(const ExpSum2D& s, Vec2 origin, double step,
                            std::size_t nx, std::size_t ny,
                            bool overrideNyquist = false);

}  // namespace rankone
