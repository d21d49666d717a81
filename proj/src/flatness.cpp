#include "rankone/flatness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace rankone {

std::string flatness_report_to_json(const FlatnessReport& r) {
  nlohmann::json j;
  j["l1Defect"] = r.l1Defect;
  j["l1SquareDefect"] = r.l1SquareDefect;
  j["l2Defect"] = r.l2Defect;
  j["supBound"] = r.supBound;
  j["gridStep"] = r.gridStep;
  j["refinementError"] = r.refinementError;
  return j.dump();
}

namespace {

struct Level {
  double l1 = 0.0, l1sq = 0.0, l2 = 0.0, sup = 0.0, step = 0.0;
};

// midpoint sums over one half-window (lo,hi), already scaled by step
Level level_1d(const ExpSum1D& s, double lo, double hi, std::size_t cells) {
  double step = (hi - lo) / double(cells);
  SampledDensity d = eval_grid(s, lo + 0.5 * step, step, cells, true);
  std::vector<double> t1(cells), t2(cells), t3(cells);
  double sup = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    double v = d.values[k];
    double m = std::sqrt(v);
    t1[k] = std::fabs(m - 1.0);
    t2[k] = std::fabs(v - 1.0);
    t3[k] = (m - 1.0) * (m - 1.0);
    sup = std::max(sup, m);
  }
  Level out;
  out.step = step;
  out.sup = sup;
  out.l1 = pairwise_sum(t1.data(), cells) * step;
  out.l1sq = pairwise_sum(t2.data(), cells) * step;
  out.l2 = pairwise_sum(t3.data(), cells) * step;  // squared for now
  return out;
}

std::size_t auto_cells(const ExpSum1D& s, double length, std::size_t floor) {
  double ny = nyquist_step(s);
  std::size_t n = floor;
  if (std::isfinite(ny) && length / ny > double(floor)) {
    n = std::size_t(std::ceil(length / ny));
  }
  return n;
}

double level_gap(const Level& a, const Level& b) {
  return std::max({std::fabs(a.l1 - b.l1), std::fabs(a.l1sq - b.l1sq),
                   std::fabs(a.l2 - b.l2)});
}

FlatnessReport report_from(const Level& fine, double err) {
  FlatnessReport r;
  r.l1Defect = fine.l1;
  r.l1SquareDefect = fine.l1sq;
  r.l2Defect = fine.l2;
  r.supBound = fine.sup;
  r.gridStep = fine.step;
  r.refinementError = err;
  return r;
}

}  // namespace

FlatnessReport measure_flatness(const ExpSum1D& s, const Window& g,
                                double epsQuadrature, int maxRefinements,
                                std::size_t initialCells) {
  if (!(epsQuadrature > 0.0)) {
    throw std::invalid_argument("flatness: tolerance must be > 0");
  }
  std::size_t n = initialCells ? initialCells : auto_cells(s, g.length(), 64);
  auto scaled = [&](std::size_t cells) {
    Level l = level_1d(s, g.a, g.b, cells);
    l.l1 *= 2.0;
    l.l1sq *= 2.0;
    l.l2 = std::sqrt(2.0 * l.l2);
    return l;
  };
  Level prev = scaled(n);
  for (int it = 0; it < maxRefinements; ++it) {
    n *= 2;
    Level cur = scaled(n);
    double err = level_gap(cur, prev);
    if (err <= epsQuadrature) return report_from(cur, err);
    prev = cur;
  }
  throw QuadratureNotConverged("flatness defects on the window");
}

double integrate_abs_p(const ExpSum1D& s, double lo, double hi,
                       double epsQuadrature, int maxRefinements) {
  if (!(hi > lo)) throw std::invalid_argument("integrate: empty interval");
  if (!(epsQuadrature > 0.0)) {
    throw std::invalid_argument("integrate: tolerance must be > 0");
  }
  std::size_t n = auto_cells(s, hi - lo, 64);
  auto mass = [&](std::size_t cells) {
    double step = (hi - lo) / double(cells);
    SampledDensity d = eval_grid(s, lo + 0.5 * step, step, cells, true);
    std::vector<double> t(cells);
    for (std::size_t k = 0; k < cells; ++k) t[k] = std::sqrt(d.values[k]);
    return pairwise_sum(t.data(), cells) * step;
  };
  double prev = mass(n);
  for (int it = 0; it < maxRefinements; ++it) {
    n *= 2;
    double cur = mass(n);
    if (std::fabs(cur - prev) <= epsQuadrature) return cur;
    prev = cur;
  }
  throw QuadratureNotConverged("abs-sum mass on the interval");
}

double measure_near_zero(const ExpSum1D& s, double a, double epsQuadrature,
                         int maxRefinements) {
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("near-zero: a must lie in (0,1)");
  }
  return 2.0 * integrate_abs_p(s, 0.0, a, epsQuadrature / 2.0, maxRefinements);
}

namespace {

// one frame-coordinate rectangle (a,b)^2; factor moduli are even in u,
// so this carries a quarter of the full window mass
Level level_2d(const ExpSum2D& s, double a, double b, std::size_t cells) {
  double step = (b - a) / double(cells);
  SampledDensity dx = eval_grid(s.x, a + 0.5 * step, step, cells, true);
  SampledDensity dy = eval_grid(s.y, a + 0.5 * step, step, cells, true);
  std::vector<double> mx(cells), my(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    mx[k] = std::sqrt(dx.values[k]);
    my[k] = std::sqrt(dy.values[k]);
  }
  std::vector<double> row1(cells), row2(cells), row3(cells);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < std::int64_t(cells); ++j) {
    std::vector<double> t1(cells), t2(cells), t3(cells);
    double vy = my[std::size_t(j)];
    for (std::size_t i = 0; i < cells; ++i) {
      double m = mx[i] * vy;
      t1[i] = std::fabs(m - 1.0);
      t2[i] = std::fabs(m * m - 1.0);
      t3[i] = (m - 1.0) * (m - 1.0);
    }
    row1[std::size_t(j)] = pairwise_sum(t1.data(), cells);
    row2[std::size_t(j)] = pairwise_sum(t2.data(), cells);
    row3[std::size_t(j)] = pairwise_sum(t3.data(), cells);
  }
  double cell = step * step;
  Level out;
  out.step = step;
  out.sup = *std::max_element(mx.begin(), mx.end()) *
            *std::max_element(my.begin(), my.end());
  out.l1 = pairwise_sum(row1.data(), cells) * cell;
  out.l1sq = pairwise_sum(row2.data(), cells) * cell;
  out.l2 = pairwise_sum(row3.data(), cells) * cell;
  return out;
}

}  // namespace

FlatnessReport measure_flatness_2d(const ExpSum2D& s, const Window& g,
                                   double epsQuadrature, int maxRefinements,
                                   std::size_t initialCells) {
  if (!(epsQuadrature > 0.0)) {
    throw std::invalid_argument("flatness: tolerance must be > 0");
  }
  double det = s.frame.det();
  if (!(std::fabs(det) > 0.0)) {
    throw std::invalid_argument("flatness: singular frame");
  }
  std::size_t n = initialCells
                      ? initialCells
                      : std::max(auto_cells(s.x, g.length(), 32),
                                 auto_cells(s.y, g.length(), 32));
  auto scaled = [&](std::size_t cells) {
    Level l = level_2d(s, g.a, g.b, cells);
    double jac = 4.0 / std::fabs(det);
    l.l1 *= jac;
    l.l1sq *= jac;
    l.l2 = std::sqrt(l.l2 * jac);
    return l;
  };
  Level prev = scaled(n);
  for (int it = 0; it < maxRefinements; ++it) {
    n *= 2;
    Level cur = scaled(n);
    double err = level_gap(cur, prev);
    if (err <= epsQuadrature) return report_from(cur, err);
    prev = cur;
  }
  throw QuadratureNotConverged("2d flatness defects on the window");
}

}  // namespace rankone
