#pragma once

#include <cstddef>
#include <string>

#include "rankone/expsum.hpp"
#include "rankone/types.hpp"

namespace rankone {

// Defects of |P| against the flat profile 1 on a window, all as plain
// integrals over the full two-sided window (no measure normalization).
struct FlatnessReport {
  double l1Defect = 0.0;        // int_G | |P| - 1 |
  double l1SquareDefect = 0.0;  // int_G | |P|^2 - 1 |
  double l2Defect = 0.0;        // sqrt( int_G (|P| - 1)^2 )
  double supBound = 0.0;        // max |P| over the quadrature grid
  double gridStep = 0.0;
  double refinementError = 0.0;  // max defect change at the last halving
};

std::string flatness_report_to_json(const FlatnessReport& r);

// Composite midpoint quadrature on (a,b), doubled by tau -> -tau symmetry.
// Starts Nyquist-compliant and halves the step until consecutive resolutions
// agree to epsQuadrature; throws QuadratureNotConverged past maxRefinements.
// initialCells == 0 picks the coarsest Nyquist-compliant grid.
FlatnessReport measure_flatness(const ExpSum1D& s, const Window& g,
                                double epsQuadrature, int maxRefinements = 24,
                                std::size_t initialCells = 0);

// int_lo^hi |P| dtau under the same two-resolution refinement contract.
double integrate_abs_p(const ExpSum1D& s, double lo, double hi,
                       double epsQuadrature, int maxRefinements = 24);

// L1 mass of |P| on (-a,a), the hole the windows leave around zero.
double measure_near_zero(const ExpSum1D& s, double a,
                         double epsQuadrature = 1e-7, int maxRefinements = 24);

// 2D defects over the four rectangles {u : |u_1|, |u_2| in (a,b)} taken in
// frame coordinates u = frame^T tau; the Jacobian 1/det(frame) converts the
// result back to tau-space mass. Factor moduli are even in u, so one
// rectangle is computed and quadrupled.
FlatnessReport measure_flatness_2d(const ExpSum2D& s, const Window& g,
                                   double epsQuadrature,
                                   int maxRefinements = 12,
                                   std::size_t initialCells = 0);

}  // namespace rankone
