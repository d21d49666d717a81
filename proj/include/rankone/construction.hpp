#pragma once
// Stage geometry for cutting-and-stacking towers driven by exponential
// frequency laws, plus the bookkeeping derived from a stacked schedule:
// tower masses (gammas) and the rotated frames used by the planar module.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rankone/types.hpp"

namespace rankone {

inline constexpr double kDefaultBetaCap = 1.0;
inline constexpr double kDefaultDivergenceBound = 8.0;

struct FrequencyParams {
  double m = 1.0;
  double beta = 0.5;  // 1/beta must be a positive integer
  std::int64_t q = 2;
};

// throws std::invalid_argument on m <= 0, beta outside (0, betaCap],
// non-integer 1/beta, or q < 1
void validate_params(const FrequencyParams& p, double betaCap = kDefaultBetaCap);

// m * (q / beta^2) * exp(beta * y / q)
double omega(const FrequencyParams& p, std::int64_t y);

struct StageGeometry {
  double h = 0.0;                 // base step height
  std::vector<double> positions;  // omega(y) - omega(0), strictly increasing
  std::vector<double> spacers;    // q-1 gaps above each copy; spacers[0] == 0
  double hNext = 0.0;             // stacked height: positions.back() + h
};

// Positions are stored shifted by -omega(0). For q == 1 the degenerate
// single-copy convention is h = (m / beta) * (e^beta - 1).
StageGeometry derive_stage_geometry(const FrequencyParams& p);

struct Stage {
  FrequencyParams params;
  StageGeometry geom;
};

struct TowerSchedule {
  std::vector<Stage> stages;
  std::vector<double> xis;  // empty, or one rotation parameter per stage
  std::int64_t depth = 0;   // gamma truncation depth, defaults to stage count

  std::size_t size() const { return stages.size(); }
  // tower height at a level; level == size() is the final stacked height
  double height(std::size_t level) const;
};

// m for a follow-up stage whose base step equals the stacked height hNext
double chain_m(double hNext, double beta, std::int64_t q);

// chains stages so each stage's h continues the previous stage's hNext
TowerSchedule build_schedule(
    double m0, const std::vector<std::pair<double, std::int64_t>>& betaQ,
    std::vector<double> xis = {});

// from explicit per-stage params; rejects schedules whose heights do not chain
TowerSchedule make_schedule(const std::vector<FrequencyParams>& params,
                            std::vector<double> xis = {},
                            std::int64_t depth = -1);

// gammas[n] for n = 0..depth with gamma_depth = 0 and
// (1 - gamma_n) = prod_{k=n}^{depth-1} q_k h_k / hNext_k.
// Throws ScheduleDivergence when sum log(hNext/(q h)) over all stages
// exceeds divergenceBound.
std::vector<double> derive_gammas(const TowerSchedule& s, std::size_t depth,
                                  double divergenceBound = kDefaultDivergenceBound);

// truncation error of the gamma tail: sum of log(hNext/(q h)) past depth
double gamma_tail_log_bound(const TowerSchedule& s, std::size_t depth);

struct PlanarFrames {
  std::vector<Mat2> psis;      // psis[0] = I, psis[n+1] = V_n * psis[n]
  std::vector<double> ells;    // q_n * h_n * e^{beta_n}
  std::vector<double> angles;  // angles[n] = sum_{k<n} atan(xi_k)
};

PlanarFrames derive_planar_frames(const TowerSchedule& s);

// {"stages":[{"m":...,"beta":...,"q":...}],"xis":[...],"depth":...}
std::string schedule_to_json(const TowerSchedule& s);
// strict: unknown or missing keys raise ConfigError
TowerSchedule schedule_from_json(const std::string& text);

}  // namespace rankone
