#include "rankone/expsum.hpp"

#include <cmath>
#include <stdexcept>

#include "rankone/dd.hpp"

namespace rankone {

ExpSum1D ExpSum1D::from_geometry(const StageGeometry& g) {
  ExpSum1D s;
  s.frequencies = g.positions;
  s.norm = 1.0 / std::sqrt(double(g.positions.size()));
  return s;
}

ExpSum1D ExpSum1D::from_frequencies(std::vector<double> f) {
  if (f.empty()) throw std::invalid_argument("exp sum: no frequencies");
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    if (!(f[i] < f[i + 1])) {
      throw std::invalid_argument("exp sum: frequencies must increase");
    }
  }
  ExpSum1D s;
  s.norm = 1.0 / std::sqrt(double(f.size()));
  s.frequencies = std::move(f);
  return s;
}

std::complex<double> eval_point(const ExpSum1D& s, double tau) {
  double re = 0.0, im = 0.0;
  for (double w : s.frequencies) {
    double ang = kTwoPi * frac_mod1(tau, w);
    re += std::cos(ang);
    im += std::sin(ang);
  }
  return {re * s.norm, im * s.norm};
}

double nyquist_step(const ExpSum1D& s) {
  double sp = s.spread();
  if (sp <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (4.0 * sp);
}

namespace {
void check_grid_args(double step, std::size_t count) {
  if (!(step > 0.0)) throw std::invalid_argument("grid: step must be > 0");
  if (count == 0) throw std::invalid_argument("grid: empty");
}
}  // namespace

SampledDensity eval_grid(const ExpSum1D& s, double origin, double step,
                         std::size_t count, bool overrideNyquist) {
  check_grid_args(step, count);
  if (!overrideNyquist && step > nyquist_step(s)) {
    throw NyquistViolation("grid step above the 1/(4 spread) guard");
  }
  SampledDensity d;
  d.origin = {origin, 0.0};
  d.step = step;
  d.nx = count;
  d.ny = 1;
  d.values.resize(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < std::int64_t(count); ++k) {
    double tau = origin + double(k) * step;
    d.values[std::size_t(k)] = std::norm(eval_point(s, tau));
  }
  return d;
}

std::complex<double> eval_point_2d(const ExpSum2D& s, Vec2 tau) {
  Vec2 u = s.frame.transpose().apply(tau);
  return eval_point(s.x, u[0]) * eval_point(s.y, u[1]);
}

namespace {
// largest per-axis u movement caused by one tau grid step
void check_nyquist_2d(const ExpSum2D& s, double step) {
  Mat2 ft = s.frame.transpose();
  double du1 = step * std::max(std::fabs(ft.m00), std::fabs(ft.m01));
  double du2 = step * std::max(std::fabs(ft.m10), std::fabs(ft.m11));
  if (du1 > nyquist_step(s.x) || du2 > nyquist_step(s.y)) {
    throw NyquistViolation("2d grid step above the aliasing guard");
  }
}
}  // namespace

SampledDensity eval_grid_2d(const ExpSum2D& s, Vec2 origin, double step,
                            std::size_t nx, std::size_t ny,
                            bool overrideNyquist) {
  check_grid_args(step, nx * ny);
  if (!overrideNyquist) check_nyquist_2d(s, step);
  SampledDensity d;
  d.origin = origin;
  d.step = step;
  d.nx = nx;
  d.ny = ny;
  d.values.resize(nx * ny);
  if (s.frame.is_identity()) {
    // tensor fast path: exact outer product of the 1D rows
    std::vector<double> vx(nx), vy(ny);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(nx); ++i) {
      vx[std::size_t(i)] =
          std::norm(eval_point(s.x, origin[0] + double(i) * step));
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < std::int64_t(ny); ++j) {
      vy[std::size_t(j)] =
          std::norm(eval_point(s.y, origin[1] + double(j) * step));
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < std::int64_t(ny); ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        d.values[std::size_t(j) * nx + i] = vx[i] * vy[std::size_t(j)];
      }
    }
    return d;
  }
  Mat2 ft = s.frame.transpose();
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < std::int64_t(ny); ++j) {
    double t2 = origin[1] + double(j) * step;
    for (std::size_t i = 0; i < nx; ++i) {
      double t1 = origin[0] + double(i) * step;
      Vec2 u = ft.apply({t1, t2});
      d.values[std::size_t(j) * nx + i] =
          std::norm(eval_point(s.x, u[0])) * std::norm(eval_point(s.y, u[1]));
    }
  }
  return d;
}

}  // namespace rankone
