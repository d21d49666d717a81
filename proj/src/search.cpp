#include "rankone/search.hpp"

#include <cmath>
#include <stdexcept>

#include "rankone/dd.hpp"
#include "rankone/expsum.hpp"

namespace rankone {

void validate_search_spec(const SearchSpec& spec) {
  validate_params({spec.m, spec.beta, std::max<std::int64_t>(spec.qMin, 1)});
  if (spec.qMin < 1) throw std::invalid_argument("search: qMin must be >= 1");
  if (spec.qMax < spec.qMin) {
    throw std::invalid_argument("search: qMax below qMin");
  }
  if (spec.qStride < 1) {
    throw std::invalid_argument("search: qStride must be >= 1");
  }
  if (!(spec.eps > 0.0)) throw std::invalid_argument("search: eps must be > 0");
}

std::vector<FlatQHit> find_flat_q(const SearchSpec& spec) {
  validate_search_spec(spec);
  // quadrature well under the decision boundary; candidates run in
  // sequence, each measurement uses the parallel grid kernels
  double epsQuad = std::max(spec.eps / 100.0, 1e-7);
  std::vector<FlatQHit> hits;
  for (std::int64_t q = spec.qMin; q <= spec.qMax; q += spec.qStride) {
    StageGeometry geom = derive_stage_geometry({spec.m, spec.beta, q});
    ExpSum1D s = ExpSum1D::from_geometry(geom);
    FlatnessReport r = measure_flatness(s, spec.window, epsQuad);
    if (r.l1Defect < spec.eps) hits.push_back({q, r});
  }
  if (hits.empty()) {
    throw NoneFound("no degree in range beats the flatness target");
  }
  return hits;
}

void validate_torus_probe(const TorusProbe& probe) {
  if (probe.K < 1) throw std::invalid_argument("torus: K must be >= 1");
  if (!(probe.eps > 0.0 && probe.eps < 0.5)) {
    throw std::invalid_argument("torus: eps must lie in (0, 1/2)");
  }
  if (!(probe.tMax > 0.0)) {
    throw std::invalid_argument("torus: tMax must be > 0");
  }
  if (!(probe.dt > 0.0 && probe.dt < probe.eps)) {
    throw std::invalid_argument("torus: dt must lie in (0, eps)");
  }
}

std::optional<double> torus_return_time(const TorusProbe& probe) {
  validate_torus_probe(probe);
  std::vector<double> v(std::size_t(probe.K));
  for (int k = 0; k < probe.K; ++k) v[std::size_t(k)] = std::log(double(k + 2));
  bool left = false;
  std::int64_t steps = std::int64_t(std::floor(probe.tMax / probe.dt));
  for (std::int64_t n = 1; n <= steps; ++n) {
    double t = double(n) * probe.dt;
    double dist = 0.0;
    for (double vk : v) dist = std::max(dist, std::fabs(frac_mod1(t, vk)));
    if (dist < probe.eps) {
      if (left) return t;
    } else {
      left = true;
    }
  }
  return std::nullopt;
}

}  // namespace rankone
