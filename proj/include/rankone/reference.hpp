#pragma once
// Serial reference implementations of the parallel kernels. Same per-sample
// arithmetic, plain loops, no OpenMP. Tests pin the parallel paths to these
// bit for bit; the bench target times one against the other.

#include "rankone/expsum.hpp"
#include "rankone/types.hpp"

namespace rankone::ref {

SampledDensity eval_grid(const ExpSum1D& s, double origin, double step,
                         std::size_t count, bool overrideNyquist = false);

SampledDensity eval_grid_2d(const ExpSum2D& s, Vec2 origin, double step,
                            std::size_t nx, std::size_t ny,
                            bool overrideNyquist = false);

// pointwise product of same-grid densities
SampledDensity multiply_grids(const SampledDensity& a, const SampledDensity& b);

}  // namespace rankone::ref
