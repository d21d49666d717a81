#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankone/types.hpp"

namespace rankone {

// Per-stage certificate inputs. Stage indices are 1-based in the alpha
// relation: alphaN^2 = epsN * prod_{k<=n} Mk, so a constant bound M gives
// alphaN = sqrt(M^n epsN).
struct StageDiagnostics {
  double Mn = 1.0;      // sup of the multiplier on the window, floored at 1
  double epsN = 0.0;    // L1 distance of the multiplier from 1 on the window
  double alphaN = 0.0;
};

// Partial product of window multipliers plus running certificate sums.
// The density grid covers midpoints of (a,b); mirror symmetry supplies the
// negative half, so window masses are doubled single-side integrals.
struct RieszState {
  Window window{0.5, 2.0};
  SampledDensity density;
  std::vector<StageDiagnostics> stages;
  double pi0 = 1.0;              // prod (1 + alphaN)
  double exceptionalMass = 0.0;  // sum of Chebyshev bounds epsN/alphaN
};

// density == 1 on a midpoint grid of the positive half-window
RieszState make_unit_state(const Window& g, std::size_t cells);

// seed |f^(tau)|^2 for the unit-L2 indicator of [0,h0): h0 * sinc^2(pi tau h0)
SampledDensity sinc_seed_grid(const Window& g, std::size_t cells, double h0);
RieszState make_seeded_state(const Window& g, std::size_t cells, double h0);

double window_mass(const RieszState& state);

// Multiply the running product by one stage grid and append diagnostics.
void accumulate(RieszState& state, const SampledDensity& qn);

struct CertificateCaps {
  double alphaCap = 1.0;
  double borelCantelliCap = 1e3;
};

struct CertificateRecord {
  double alphaSum = 0.0;
  double borelCantelliSum = 0.0;  // sum epsN/alphaN over stages with epsN > 0
  double pi0 = 1.0;
  double majorantBound = 0.0;  // pi0 * alphaSum
  bool certified = false;
};

CertificateRecord check_summability(const std::vector<StageDiagnostics>& stages,
                                    const CertificateCaps& caps = {});

struct RateBound {
  double eps0 = 0.0;            // sum of alphaN
  double measureBound = 0.0;    // window measure minus 2 * eps0
  double deviationBound = 0.0;  // pi0 - 1
  bool withinRateLaw = false;   // pi0 - 1 < 3 * eps0 when eps0 < cap
};

RateBound convergence_rate_bound(const std::vector<StageDiagnostics>& stages,
                                 const Window& g, double eps0Cap = 1.0);

// Divergence example on [0,1]: multipliers worth 1 / 0 / 2 on the dyadic
// split, mass-preserving yet collapsing onto the right endpoint.
SampledDensity counterexample_multiplier(int n, std::size_t cells);
SampledDensity counterexample_product(int N);

struct AtomReport {
  std::vector<double> windowIntegrals;
  double atomEstimate = 0.0;  // 1 - mass captured by the last window
  double zeroRadius = 0.0;
};

// States must come on nested windows closing in on zero.
AtomReport detect_atom(const std::vector<RieszState>& states,
                       double zeroRadius);

// Empirical covariance of two stage grids; diagnostic only.
double stage_covariance(const SampledDensity& a, const SampledDensity& b);

// Checkpointing: JSON carries window, grid meta, diagnostics, and sums;
// CSV carries the density samples. Round trip is bitwise.
std::string riesz_state_to_json(const RieszState& state);
RieszState riesz_state_from_json(const std::string& jsonText,
                                 const std::string& densityCsv);

}  // namespace rankone
