#pragma once

#include <string>
#include <vector>

#include "rankone/types.hpp"

namespace rankone {

// CSV columns: tau,value (1D) or tau1,tau2,value (2D); shortest
// round-trippable decimal digits, so load(save(d)) is bitwise.
std::string density_to_csv(const SampledDensity& d);

// Values in row order; count must be validated against the target grid.
std::vector<double> density_values_from_csv(const std::string& text);

// 16-bit big-endian P5 after log10 scaling; constant fields map to
// mid-range. Returns the sidecar JSON recording the scaling bounds.
struct PgmRender {
  std::string pgm;
  std::string sidecarJson;  // {"min":...,"max":...} of log10(value + 1e-12)
};
PgmRender render_density_pgm(const SampledDensity& d);

// shortest round-trip decimal for a double
std::string format_double(double v);

}  // namespace rankone
