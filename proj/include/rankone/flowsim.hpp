#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/types.hpp"

namespace rankone {

// Finite-depth inverse-limit point: coords[k] lives on [0, height(k)] and
// projects consistently down the tower stack.
struct FlowPoint {
  int baseDepth = 0;
  std::vector<double> coords;
};

// Cell values of a piecewise-constant complex profile on [0, h0). Treating
// the profile as exactly piecewise constant makes the lattice
// autocorrelation and its linear interpolation exact, not approximate.
struct LevelFunction {
  int baseDepth = 0;
  double h0 = 1.0;
  std::vector<std::complex<double>> samples;
  double cellWidth() const { return h0 / double(samples.size()); }
  // 0 outside (0, h0): the tower floor carries the mass, the seam point
  // x = 0 belongs to the spacer/atom part
  std::complex<double> eval(double x) const;
};

inline constexpr std::size_t kDefaultProfileCells = std::size_t(1) << 14;

// indicator of the base level, scaled to unit weighted L2 norm
LevelFunction make_indicator_function(const TowerSchedule& sched,
                                      int baseDepth,
                                      std::size_t cells = kDefaultProfileCells);
// nonnegative raised-cosine profile (transform positive near zero)
LevelFunction make_bump_function(const TowerSchedule& sched, int baseDepth,
                                 std::size_t cells = kDefaultProfileCells);

// weighted L2 norm (1-gamma)/h0 * integral |f|^2; 1 for the factory outputs
double level_function_norm(const LevelFunction& f, const TowerSchedule& sched);

// base-copy offsets of level `baseDepth` inside the level `level` tower
std::vector<double> tower_offsets(const TowerSchedule& sched, int baseDepth,
                                  int level);

// Uniform draw from the depth-level tower measure (atom weight included for
// depth below the schedule top), projected down. Deterministic per seed.
FlowPoint sample_point(const TowerSchedule& sched, int depth,
                       std::uint64_t seed);

// checks phi(coords[k+1]) == coords[k] at every stored level
bool projection_consistent(const TowerSchedule& sched, const FlowPoint& p,
                           double tol = 0.0);

// Time-t map at finite depth: shifts every coordinate from the first level
// that keeps |t| clear of both tower ends, reprojects below, and reports
// escape (no such level) instead of wrapping.
std::optional<FlowPoint> apply_time(const TowerSchedule& sched,
                                    const FlowPoint& p, double t);

struct TGrid {
  double tStart = 0.0;
  double tStep = 1e-3;
  std::size_t count = 1;
};

struct CorrelationTrace {
  std::vector<double> t;
  std::vector<std::complex<double>> values;
  std::vector<double> stderrs;  // zero for the analytic path
};

// R_level(t) = (1-gamma)/h * sum over copy pairs of the base overlap; exact
// for piecewise-constant profiles up to rounding.
CorrelationTrace correlation_analytic(const LevelFunction& f,
                                      const TowerSchedule& sched, int level,
                                      const TGrid& grid);

// 2 Re Filon transform of the Hermitian extension of a trace starting at
// t = 0; exact for the piecewise-linear interpolant of the trace.
SampledDensity correlation_spectrum(const CorrelationTrace& trace,
                                    double origin, double step,
                                    std::size_t count);

struct MonteCarloEstimate {
  std::complex<double> value;
  double stderrEstimate = 0.0;
  std::size_t kept = 0;
  std::size_t escaped = 0;
};

// Mean of f(T^t x) conj f(x) over sample_point draws; samples where f
// vanishes contribute zero without needing the time map. Escapes above 10%
// raise TooManyEscapes.
MonteCarloEstimate correlation_monte_carlo(const LevelFunction& f,
                                           const TowerSchedule& sched,
                                           int depth, double t,
                                           std::size_t samples,
                                           std::uint64_t seed);

// CSV columns t,re,im,stderr
std::string trace_to_csv(const CorrelationTrace& trace);

}  // namespace rankone
