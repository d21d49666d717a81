#include "rankone/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "rankone/dd.hpp"
#include "rankone/density_io.hpp"
#include "rankone/expsum.hpp"

namespace rankone {

namespace {

// pair enumeration over base copies is quadratic; keep it bounded
constexpr std::size_t kMaxCopies = 2048;

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double u01(std::uint64_t& s) {
  return double(splitmix64(s) >> 11) * 0x1p-53;
}

// phi: drop one level through the stage's copy layout; gaps flatten to 0
double project_down(const StageGeometry& g, double x) {
  const std::vector<double>& pos = g.positions;
  auto it = std::upper_bound(pos.begin(), pos.end(), x);
  double r = x - *(it - 1);
  return r <= g.h ? r : 0.0;
}

LevelFunction make_profile(const TowerSchedule& sched, int baseDepth,
                           std::size_t cells, bool bumped) {
  if (baseDepth < 0 || std::size_t(baseDepth) > sched.size()) {
    throw std::invalid_argument("profile base depth out of range");
  }
  if (cells == 0) {
    throw std::invalid_argument("profile needs at least one cell");
  }
  std::vector<double> gam = derive_gammas(sched, sched.size());
  double weight = 1.0 - gam[std::size_t(baseDepth)];

  LevelFunction f;
  f.baseDepth = baseDepth;
  f.h0 = sched.height(std::size_t(baseDepth));
  f.samples.assign(cells, 0.0);
  if (!bumped) {
    double c = 1.0 / std::sqrt(weight);
    for (std::complex<double>& v : f.samples) v = c;
    return f;
  }
  std::vector<double> sq(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    double p = 1.0 - std::cos(kTwoPi * (double(k) + 0.5) / double(cells));
    f.samples[k] = p;
    sq[k] = p * p;
  }
  double norm2 =
      weight / double(cells) * pairwise_sum(sq.data(), sq.size());
  double c = 1.0 / std::sqrt(norm2);
  for (std::complex<double>& v : f.samples) v *= c;
  return f;
}

// lattice autocorrelation G[m] = delta * sum_k f[k+m] conj f[k]; exact knot
// values of the overlap integral for the piecewise-constant profile
std::vector<std::complex<double>> lattice_correlation(const LevelFunction& f) {
  std::int64_t S = std::int64_t(f.samples.size());
  double delta = f.cellWidth();
  std::vector<std::complex<double>> G(std::size_t(S) + 1, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t m = 0; m < S; ++m) {
    std::complex<double> acc = 0.0;
    for (std::int64_t k = 0; k + m < S; ++k) {
      acc += f.samples[std::size_t(k + m)] *
             std::conj(f.samples[std::size_t(k)]);
    }
    G[std::size_t(m)] = acc * delta;
  }
  return G;
}

// overlap integral at arbitrary lag: linear between lattice knots, which is
// exact because the integrand is piecewise constant
std::complex<double> lerp_correlation(
    const std::vector<std::complex<double>>& G, double delta, double h0,
    double u) {
  if (!(std::fabs(u) < h0)) return {0.0, 0.0};
  double y = u / delta;
  double fl = std::floor(y);
  double fr = y - fl;
  std::int64_t m = std::int64_t(fl);
  auto at = [&](std::int64_t i) -> std::complex<double> {
    std::int64_t a = i < 0 ? -i : i;
    if (a >= std::int64_t(G.size())) return {0.0, 0.0};
    return i >= 0 ? G[std::size_t(a)] : std::conj(G[std::size_t(a)]);
  };
  return at(m) * (1.0 - fr) + at(m + 1) * fr;
}

}  // namespace

std::complex<double> LevelFunction::eval(double x) const {
  if (!(x > 0.0) || !(x < h0)) return {0.0, 0.0};
  std::size_t idx = std::size_t(x / cellWidth());
  if (idx >= samples.size()) idx = samples.size() - 1;
  return samples[idx];
}

LevelFunction make_indicator_function(const TowerSchedule& sched,
                                      int baseDepth, std::size_t cells) {
  return make_profile(sched, baseDepth, cells, false);
}

LevelFunction make_bump_function(const TowerSchedule& sched, int baseDepth,
                                 std::size_t cells) {
  return make_profile(sched, baseDepth, cells, true);
}

double level_function_norm(const LevelFunction& f, const TowerSchedule& sched) {
  std::vector<double> gam = derive_gammas(sched, sched.size());
  std::vector<double> sq(f.samples.size());
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = std::norm(f.samples[k]);
  double weight = 1.0 - gam[std::size_t(f.baseDepth)];
  return std::sqrt(weight / double(sq.size()) *
                   pairwise_sum(sq.data(), sq.size()));
}

std::vector<double> tower_offsets(const TowerSchedule& sched, int baseDepth,
                                  int level) {
  if (baseDepth < 0 || level < baseDepth ||
      std::size_t(level) > sched.size()) {
    throw std::invalid_argument(
        "offset levels must satisfy 0 <= base <= level <= stage count");
  }
  std::vector<double> offs{0.0};
  for (int k = baseDepth; k < level; ++k) {
    const std::vector<double>& pos = sched.stages[std::size_t(k)].geom.positions;
    std::vector<double> next;
    next.reserve(offs.size() * pos.size());
    for (double p : pos) {
      for (double d : offs) next.push_back(p + d);
    }
    offs = std::move(next);
  }
  std::sort(offs.begin(), offs.end());
  return offs;
}

FlowPoint sample_point(const TowerSchedule& sched, int depth,
                       std::uint64_t seed) {
  if (depth < 0 || std::size_t(depth) > sched.size()) {
    throw std::invalid_argument("sample depth out of range");
  }
  std::vector<double> gam = derive_gammas(sched, sched.size());
  std::uint64_t state = seed;
  double atomDraw = u01(state);
  double posDraw = u01(state);

  FlowPoint p;
  p.baseDepth = 0;
  p.coords.assign(std::size_t(depth) + 1, 0.0);
  if (atomDraw < gam[std::size_t(depth)]) return p;
  p.coords[std::size_t(depth)] = posDraw * sched.height(std::size_t(depth));
  for (int k = depth - 1; k >= 0; --k) {
    p.coords[std::size_t(k)] = project_down(sched.stages[std::size_t(k)].geom,
                                            p.coords[std::size_t(k) + 1]);
  }
  return p;
}

bool projection_consistent(const TowerSchedule& sched, const FlowPoint& p,
                           double tol) {
  if (p.coords.empty()) return false;
  std::size_t top = std::size_t(p.baseDepth) + p.coords.size() - 1;
  if (top > sched.size()) return false;
  for (std::size_t k = 0; k < p.coords.size(); ++k) {
    double h = sched.height(std::size_t(p.baseDepth) + k);
    if (!(p.coords[k] >= 0.0 && p.coords[k] <= h)) return false;
  }
  for (std::size_t k = 0; k + 1 < p.coords.size(); ++k) {
    std::size_t lvl = std::size_t(p.baseDepth) + k;
    double want = project_down(sched.stages[lvl].geom, p.coords[k + 1]);
    if (std::fabs(want - p.coords[k]) > tol) return false;
  }
  return true;
}

std::optional<FlowPoint> apply_time(const TowerSchedule& sched,
                                    const FlowPoint& p, double t) {
  if (p.coords.empty()) {
    throw std::invalid_argument("flow point has no coordinates");
  }
  std::size_t top = std::size_t(p.baseDepth) + p.coords.size() - 1;
  if (top > sched.size()) {
    throw std::invalid_argument("flow point does not fit the schedule");
  }
  if (!(std::fabs(t) < sched.height(top))) {
    throw std::invalid_argument("lag must stay below the top tower height");
  }
  if (t == 0.0) return p;

  double a = std::fabs(t);
  std::ptrdiff_t pick = -1;
  for (std::size_t k = 0; k < p.coords.size(); ++k) {
    double h = sched.height(std::size_t(p.baseDepth) + k);
    if (a < p.coords[k] && p.coords[k] < h - a) {
      pick = std::ptrdiff_t(k);
      break;
    }
  }
  if (pick < 0) return std::nullopt;

  FlowPoint out = p;
  for (std::size_t k = std::size_t(pick); k < out.coords.size(); ++k) {
    out.coords[k] += t;
  }
  for (std::ptrdiff_t k = pick - 1; k >= 0; --k) {
    std::size_t lvl = std::size_t(p.baseDepth) + std::size_t(k);
    out.coords[std::size_t(k)] =
        project_down(sched.stages[lvl].geom, out.coords[std::size_t(k) + 1]);
  }
  return out;
}

CorrelationTrace correlation_analytic(const LevelFunction& f,
                                      const TowerSchedule& sched, int level,
                                      const TGrid& grid) {
  if (f.samples.empty()) {
    throw std::invalid_argument("profile has no samples");
  }
  if (grid.count == 0) {
    throw std::invalid_argument("correlation grid is empty");
  }
  if (!(grid.tStep > 0.0)) {
    throw std::invalid_argument("correlation grid step must be positive");
  }
  double delta = f.cellWidth();
  if (grid.tStep < delta) {
    throw ResolutionError("t grid step is finer than the profile cell width");
  }
  std::vector<double> offs = tower_offsets(sched, f.baseDepth, level);
  if (offs.size() > kMaxCopies) {
    throw std::invalid_argument("too many base copies for pair enumeration");
  }
  std::vector<double> gam = derive_gammas(sched, sched.size());
  double w =
      (1.0 - gam[std::size_t(level)]) / sched.height(std::size_t(level));

  std::vector<std::complex<double>> G = lattice_correlation(f);
  std::vector<double> diffs;
  diffs.reserve(offs.size() * offs.size());
  for (double d1 : offs) {
    for (double d2 : offs) diffs.push_back(d1 - d2);
  }
  std::sort(diffs.begin(), diffs.end());

  CorrelationTrace tr;
  tr.t.resize(grid.count);
  tr.values.resize(grid.count);
  tr.stderrs.assign(grid.count, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < std::int64_t(grid.count); ++i) {
    double t = grid.tStart + double(i) * grid.tStep;
    auto lo = std::lower_bound(diffs.begin(), diffs.end(), t - f.h0);
    auto hi = std::upper_bound(lo, diffs.end(), t + f.h0);
    std::complex<double> acc = 0.0;
    for (auto it = lo; it != hi; ++it) {
      acc += lerp_correlation(G, delta, f.h0, t - *it);
    }
    tr.t[std::size_t(i)] = t;
    tr.values[std::size_t(i)] = acc * w;
  }
  return tr;
}

SampledDensity correlation_spectrum(const CorrelationTrace& trace,
                                    double origin, double step,
                                    std::size_t count) {
  std::size_t n = trace.t.size();
  if (n < 2 || trace.values.size() != n) {
    throw std::invalid_argument("trace needs at least two uniform samples");
  }
  if (trace.t[0] != 0.0) {
    throw std::invalid_argument("trace must start at t = 0");
  }
  double dt = trace.t[1] - trace.t[0];
  double tEnd = trace.t[n - 1];
  if (!(dt > 0.0) ||
      std::fabs(tEnd - double(n - 1) * dt) > 1e-9 * (1.0 + std::fabs(tEnd))) {
    throw std::invalid_argument("trace grid is not uniform");
  }
  if (count == 0) {
    throw std::invalid_argument("spectrum grid is empty");
  }

  SampledDensity out;
  out.origin = Vec2{origin, 0.0};
  out.step = step;
  out.nx = count;
  out.ny = 1;
  out.values.assign(count, 0.0);

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < std::int64_t(count); ++i) {
    double tau = out.tau1(std::size_t(i));
    double omega = kTwoPi * tau * dt;
    std::complex<double> z(0.0, -omega);

    // segment weights: integral of (1, u) e^{z u} du over the unit cell
    std::complex<double> p1, p2;
    if (std::fabs(omega) < 0.5) {
      std::complex<double> zk = 1.0;
      double fact = 1.0;
      p1 = 0.0;
      p2 = 0.0;
      for (int m = 0; m < 24; ++m) {
        p1 += zk / (fact * double(m + 1));
        p2 += zk / (fact * double(m + 2));
        zk *= z;
        fact *= double(m + 1);
        if (std::abs(zk) / fact < 1e-20) break;
      }
    } else {
      std::complex<double> e = std::polar(1.0, -omega);
      p1 = (e - 1.0) / z;
      p2 = (e * (z - 1.0) + 1.0) / (z * z);
    }

    std::complex<double> rot = std::polar(1.0, -omega);
    std::complex<double> phase = 1.0;
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (k % 4096 == 0) {
        // phase reseeded from the exact product mod 1 to stop drift
        phase = std::polar(1.0, -kTwoPi * frac_mod1(tau, trace.t[k]));
      }
      std::complex<double> av = trace.values[k];
      std::complex<double> bv = trace.values[k + 1];
      acc += phase * (av * p1 + (bv - av) * p2);
      phase *= rot;
    }
    out.values[std::size_t(i)] = 2.0 * (acc * dt).real();
  }
  return out;
}

MonteCarloEstimate correlation_monte_carlo(const LevelFunction& f,
                                           const TowerSchedule& sched,
                                           int depth, double t,
                                           std::size_t samples,
                                           std::uint64_t seed) {
  if (depth < f.baseDepth || std::size_t(depth) > sched.size()) {
    throw std::invalid_argument("sampling depth out of range");
  }
  if (samples < 16) {
    throw std::invalid_argument("need at least 16 samples");
  }
  if (!(std::fabs(t) < sched.height(std::size_t(depth)))) {
    throw std::invalid_argument("lag must stay below the sampling height");
  }

  // fixed-size blocks keep the reduction order independent of thread count
  const std::size_t block = 4096;
  std::size_t nblocks = (samples + block - 1) / block;
  std::vector<std::complex<double>> sums(nblocks, 0.0);
  std::vector<double> sqs(nblocks, 0.0);
  std::vector<std::size_t> escs(nblocks, 0);

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < std::int64_t(nblocks); ++b) {
    std::complex<double> sum = 0.0;
    double sq = 0.0;
    std::size_t esc = 0;
    std::size_t kLo = std::size_t(b) * block;
    std::size_t kHi = std::min(kLo + block, samples);
    for (std::size_t k = kLo; k < kHi; ++k) {
      FlowPoint x =
          sample_point(sched, depth, seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
      std::complex<double> fx = f.eval(x.coords[std::size_t(f.baseDepth)]);
      std::complex<double> v = 0.0;
      if (fx != std::complex<double>(0.0)) {
        std::optional<FlowPoint> y = apply_time(sched, x, t);
        if (!y.has_value()) {
          esc += 1;
          continue;
        }
        v = f.eval(y->coords[std::size_t(f.baseDepth)]) * std::conj(fx);
      }
      sum += v;
      sq += std::norm(v);
    }
    sums[std::size_t(b)] = sum;
    sqs[std::size_t(b)] = sq;
    escs[std::size_t(b)] = esc;
  }

  std::complex<double> total = 0.0;
  double sqTotal = 0.0;
  std::size_t escaped = 0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    total += sums[b];
    sqTotal += sqs[b];
    escaped += escs[b];
  }
  std::size_t kept = samples - escaped;
  if (escaped * 10 > samples || kept < 2) {
    throw TooManyEscapes("more than 10% of samples escaped the tower");
  }

  MonteCarloEstimate est;
  est.kept = kept;
  est.escaped = escaped;
  est.value = total / double(kept);
  double centered = sqTotal - std::norm(total) / double(kept);
  if (centered < 0.0) centered = 0.0;
  est.stderrEstimate =
      std::sqrt(centered / (double(kept) * double(kept - 1)));
  return est;
}

std::string trace_to_csv(const CorrelationTrace& trace) {
  std::string out = "t,re,im,stderr\n";
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    out += format_double(trace.t[k]);
    out += ',';
    out += format_double(trace.values[k].real());
    out += ',';
    out += format_double(trace.values[k].imag());
    out += ',';
    out += format_double(trace.stderrs[k]);
    out += '\n';
  }
  return out;
}

}  // namespace rankone
