#include "rankone/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace rankone::ref {

SampledDensity eval_grid(const ExpSum1D& s, double origin, double step,
                         std::size_t count, bool overrideNyquist) {
  if (!(step > 0.0)) throw std::invalid_argument("grid: step must be > 0");
  if (count == 0) throw std::invalid_argument("grid: empty");
  if (!overrideNyquist && step > nyquist_step(s)) {
    throw NyquistViolation("grid step above the 1/(4 spread) guard");
  }
  SampledDensity d;
  d.origin = {origin, 0.0};
  d.step = step;
  d.nx = count;
  d.ny = 1;
  d.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    double tau = origin + double(k) * step;
    d.values[k] = std::norm(eval_point(s, tau));
  }
  return d;
}

SampledDensity eval_grid_2d(const ExpSum2D& s, Vec2 origin, double step,
                            std::size_t nx, std::size_t ny,
                            bool overrideNyquist) {
  if (!(step > 0.0)) throw std::invalid_argument("grid: step must be > 0");
  if (nx * ny == 0) throw std::invalid_argument("grid: empty");
  SampledDensity d;
  d.origin = origin;
  d.step = step;
  d.nx = nx;
  d.ny = ny;
  d.values.resize(nx * ny);
  if (s.frame.is_identity()) {
    if (!overrideNyquist &&
        (step > nyquist_step(s.x) || step > nyquist_step(s.y))) {
      throw NyquistViolation("2d grid step above the aliasing guard");
    }
    std::vector<double> vx(nx), vy(ny);
    for (std::size_t i = 0; i < nx; ++i) {
      vx[i] = std::norm(eval_point(s.x, origin[0] + double(i) * step));
    }
    for (std::size_t j = 0; j < ny; ++j) {
      vy[j] = std::norm(eval_point(s.y, origin[1] + double(j) * step));
    }
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        d.values[j * nx + i] = vx[i] * vy[j];
      }
    }
    return d;
  }
  Mat2 ft = s.frame.transpose();
  if (!overrideNyquist) {
    double du1 = step * std::max(std::fabs(ft.m00), std::fabs(ft.m01));
    double du2 = step * std::max(std::fabs(ft.m10), std::fabs(ft.m11));
    if (du1 > nyquist_step(s.x) || du2 > nyquist_step(s.y)) {
      throw NyquistViolation("2d grid step above the aliasing guard");
    }
  }
  for (std::size_t j = 0; j < ny; ++j) {
    double t2 = origin[1] + double(j) * step;
    for (std::size_t i = 0; i < nx; ++i) {
      double t1 = origin[0] + double(i) * step;
      Vec2 u = ft.apply({t1, t2});
      d.values[j * nx + i] =
          std::norm(eval_point(s.x, u[0])) * std::norm(eval_point(s.y, u[1]));
    }
  }
  return d;
}

SampledDensity multiply_grids(const SampledDensity& a,
                              const SampledDensity& b) {
  if (!a.same_grid(b)) throw GridMismatch("grids differ");
  SampledDensity out = a;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] *= b.values[k];
  }
  return out;
}

}  // namespace rankone::ref
