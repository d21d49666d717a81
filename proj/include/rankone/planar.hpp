#pragma once
// Plane-action layer: rotated strip families, their intersection geometry,
// 2D density accumulation, region bookkeeping, and density rendering.
//
// A StripSet lives in tau coordinates as {tau : frame * tau in B} where B is
// the union of the two axis boxes [-b,b]x[-a,a] and [-a,a]x[-b,b]. Stage
// exponential sums pair with a strip through frame^T: an ExpSum2D built with
// frame = strip.frame.transpose() factors exactly along the strip axes.

#include <cstddef>
#include <string>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/expsum.hpp"
#include "rankone/riesz.hpp"
#include "rankone/types.hpp"

namespace rankone {

struct StripSet {
  double a = 0.0;  // half thickness
  double b = 0.0;  // half length
  Mat2 frame = Mat2::identity();
};

// throws std::invalid_argument unless 0 < a < b and the frame is invertible
StripSet make_strip(double a, double b, const Mat2& frame);

bool strip_contains(const StripSet& s, Vec2 tau);

// Largest distance from the origin reachable inside a transverse crossing of
// the two strip unions. Parallel frames return +infinity; crossings between
// rectangles whose long axes coincide do not count (they run along a strip
// instead of across it).
double strip_intersection_radius(const StripSet& s1, const StripSet& s2);

struct CollapseReport {
  std::vector<double> ratios;     // a_n / sum_{k>=n} xi_k
  std::vector<double> tailRadii;  // max pairwise crossing radius, stages >= n
  bool decreasing = false;
  bool belowThreshold = false;
  bool passes = false;
};

// Advisory check that strip thicknesses shrink fast enough against the
// remaining rotation budget. windows[n] supplies (a_n, b_n) for stage n.
CollapseReport validate_collapse_condition(const TowerSchedule& s,
                                           const std::vector<Window>& windows,
                                           double threshold = 0.5);

struct PlanarRieszState {
  SampledDensity grid;  // square patch centered on 0, ny == nx
  std::vector<StripSet> stageStrips;
  std::vector<StageDiagnostics> stages;
  double pi0 = 1.0;
  double exceptionalMass = 0.0;
};

// midpoint grid over (-extent, extent)^2, values 1
PlanarRieszState make_planar_unit_state(double extent, std::size_t cells);
// tensor square of the 1D indicator seed h0 sinc^2(pi tau h0)
PlanarRieszState make_planar_seeded_state(double extent, std::size_t cells,
                                          double h0);

// Multiply the grid by |P|^2 of the stage and append the stage's strip and
// diagnostics. The stage is evaluated on the state's own grid.
void accumulate_2d(PlanarRieszState& state, const ExpSum2D& stage,
                   const StripSet& strip);

// region labels: 0 = crossed by at least two strips, 1 = inside the limit
// line tube, 2 = free
struct RegionMap {
  std::size_t nx = 0, ny = 0;
  std::vector<unsigned char> labels;
  double massCovered = 0.0;
  double massTube = 0.0;
  double massFree = 0.0;
  Vec2 limitDir1{1.0, 0.0};
  Vec2 limitDir2{0.0, 1.0};
};

// limitAngle is the accumulated rotation of the frames (angles.back() from
// derive_planar_frames); the two limit lines pass through 0 along the
// rotated axis directions
RegionMap classify_regions(const PlanarRieszState& state, double limitAngle,
                           double tubeHalfWidth);

std::string region_masses_to_csv(const RegionMap& regions);

// L1 mass of |P| over the strip within distance limitRadius of the center
// along the long axes (limitRadius < 0 means the whole strip). Exact
// inclusion-exclusion of the two boxes; per-axis integrals use the
// measure_near_zero quadrature contract.
double strip_mass_bound(const ExpSum2D& stage, const StripSet& strip,
                        double limitRadius = -1.0,
                        double epsQuadrature = 1e-7);

struct RenderPaths {
  std::string pgmPath;
  std::string sidecarPath;
};

// writes <prefix>.pgm and <prefix>.json; bitwise deterministic per state
RenderPaths render_density(const PlanarRieszState& state,
                           const std::string& pathPrefix);

}  // namespace rankone
