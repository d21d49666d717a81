#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/flatness.hpp"
#include "rankone/types.hpp"

namespace rankone {

// Arithmetic scan over stage degrees q at fixed (m, beta).
struct SearchSpec {
  Window window{0.5, 2.0};
  double eps = 0.1;
  double m = 1.0;
  double beta = 0.25;
  std::int64_t qMin = 2;
  std::int64_t qMax = 1024;
  std::int64_t qStride = 1;
};

void validate_search_spec(const SearchSpec& spec);

struct FlatQHit {
  std::int64_t q = 0;
  FlatnessReport report;
};

// All q in the range whose window L1 defect beats eps, ascending; the
// smallest hit is the stage selection. Throws NoneFound on an empty scan.
std::vector<FlatQHit> find_flat_q(const SearchSpec& spec);

// Linear flow t*(log 2, ..., log(K+1)) on the K-torus.
struct TorusProbe {
  int K = 1;
  double eps = 0.1;
  double tMax = 1e4;
  double dt = 1e-3;
};

void validate_torus_probe(const TorusProbe& probe);

// Smallest scanned t with max-metric distance to 0 below eps, required to
// leave the neighborhood first; nullopt when tMax is exhausted.
std::optional<double> torus_return_time(const TorusProbe& probe);

}  // namespace rankone
