#include "rankone/planar.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "rankone/density_io.hpp"
#include "rankone/flatness.hpp"

namespace rankone {

namespace {

struct Pt {
  double x, y;
};

double cross(Pt a, Pt b) { return a.x * b.y - a.y * b.x; }

// one frame box pulled back to tau space, counterclockwise
std::vector<Pt> box_polygon(const StripSet& s, bool horizontal) {
  double ux = horizontal ? s.b : s.a;
  double uy = horizontal ? s.a : s.b;
  Mat2 inv = s.frame.inverse();
  const double sx[4] = {1.0, -1.0, -1.0, 1.0};
  const double sy[4] = {1.0, 1.0, -1.0, -1.0};
  std::vector<Pt> poly;
  poly.reserve(4);
  for (int k = 0; k < 4; ++k) {
    Vec2 t = inv.apply({sx[k] * ux, sy[k] * uy});
    poly.push_back({t[0], t[1]});
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    area2 += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  if (area2 < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

// Sutherland-Hodgman; the clip polygon must run counterclockwise
std::vector<Pt> clip_convex(std::vector<Pt> subject,
                            const std::vector<Pt>& clip) {
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    Pt a = clip[e];
    Pt b = clip[(e + 1) % clip.size()];
    Pt dir{b.x - a.x, b.y - a.y};
    auto side = [&](Pt p) {
      return dir.x * (p.y - a.y) - dir.y * (p.x - a.x);
    };
    std::vector<Pt> out;
    out.reserve(subject.size() + 2);
    for (std::size_t i = 0; i < subject.size(); ++i) {
      Pt p = subject[i];
      Pt q = subject[(i + 1) % subject.size()];
      double sp = side(p), sq = side(q);
      if (sp >= 0.0) out.push_back(p);
      if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
        double t = sp / (sp - sq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    subject = std::move(out);
  }
  return subject;
}

Vec2 long_axis(const StripSet& s, bool horizontal) {
  Mat2 inv = s.frame.inverse();
  return inv.apply(horizontal ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0});
}

bool parallel_dirs(Vec2 u, Vec2 v) {
  double c = u[0] * v[1] - u[1] * v[0];
  double scale = std::hypot(u[0], u[1]) * std::hypot(v[0], v[1]);
  return std::fabs(c) <= 1e-12 * scale;
}

// L1 mass of |P| on (-c, c); measure_near_zero caps its argument at 1
double axis_abs_mass(const ExpSum1D& s, double c, double eps) {
  if (c < 1.0) return measure_near_zero(s, c, eps);
  return 2.0 * integrate_abs_p(s, 0.0, c, eps / 2.0);
}

double frame_scale(const Mat2& m) {
  return std::max(std::max(std::fabs(m.m00), std::fabs(m.m01)),
                  std::max(std::fabs(m.m10), std::fabs(m.m11)));
}

}  // namespace

StripSet make_strip(double a, double b, const Mat2& frame) {
  if (!(a > 0.0) || !(a < b)) {
    throw std::invalid_argument("strip: requires 0 < a < b");
  }
  double scale = frame_scale(frame);
  if (!(std::fabs(frame.det()) > 1e-12 * scale * scale)) {
    throw std::invalid_argument("strip: frame must be invertible");
  }
  return {a, b, frame};
}

bool strip_contains(const StripSet& s, Vec2 tau) {
  Vec2 u = s.frame.apply(tau);
  double ax = std::fabs(u[0]), ay = std::fabs(u[1]);
  return (ax <= s.b && ay <= s.a) || (ax <= s.a && ay <= s.b);
}

double strip_intersection_radius(const StripSet& s1, const StripSet& s2) {
  if (parallel_dirs(long_axis(s1, true), long_axis(s2, true))) {
    return std::numeric_limits<double>::infinity();
  }
  double best = 0.0;
  for (bool h1 : {true, false}) {
    std::vector<Pt> subject = box_polygon(s1, h1);
    Vec2 d1 = long_axis(s1, h1);
    for (bool h2 : {true, false}) {
      if (parallel_dirs(d1, long_axis(s2, h2))) continue;
      std::vector<Pt> cut = clip_convex(subject, box_polygon(s2, h2));
      for (const Pt& p : cut) best = std::max(best, std::hypot(p.x, p.y));
    }
  }
  return best;
}

CollapseReport validate_collapse_condition(const TowerSchedule& s,
                                           const std::vector<Window>& windows,
                                           double threshold) {
  const std::size_t n = s.size();
  if (n < 2) throw std::invalid_argument("collapse: needs at least 2 stages");
  if (s.xis.size() != n) {
    throw std::invalid_argument("collapse: schedule carries no rotations");
  }
  if (windows.size() != n) {
    throw std::invalid_argument("collapse: one window per stage required");
  }
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("collapse: threshold must be > 0");
  }
  for (double xi : s.xis) {
    if (!(xi > 0.0)) {
      throw std::invalid_argument("collapse: rotations must be positive");
    }
  }

  CollapseReport rep;
  std::vector<double> tails(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) tails[k] = tails[k + 1] + s.xis[k];
  rep.ratios.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    rep.ratios[k] = windows[k].a / tails[k];
  }
  rep.decreasing = true;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    rep.decreasing = rep.decreasing && rep.ratios[k + 1] < rep.ratios[k];
  }
  rep.belowThreshold = rep.ratios.back() < threshold;
  rep.passes = rep.decreasing && rep.belowThreshold;

  PlanarFrames frames = derive_planar_frames(s);
  std::vector<StripSet> strips;
  strips.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    strips.push_back(make_strip(windows[k].a, windows[k].b, frames.psis[k]));
  }
  rep.tailRadii.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double m = i + 1 < n ? rep.tailRadii[i + 1] : 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      m = std::max(m, strip_intersection_radius(strips[i], strips[j]));
    }
    rep.tailRadii[i] = m;
  }
  return rep;
}

PlanarRieszState make_planar_unit_state(double extent, std::size_t cells) {
  if (!(extent > 0.0)) {
    throw std::invalid_argument("planar: extent must be > 0");
  }
  if (cells == 0) throw std::invalid_argument("planar: empty grid");
  PlanarRieszState st;
  st.grid.step = 2.0 * extent / double(cells);
  double o = -extent + 0.5 * st.grid.step;
  st.grid.origin = {o, o};
  st.grid.nx = cells;
  st.grid.ny = cells;
  st.grid.values.assign(cells * cells, 1.0);
  return st;
}

PlanarRieszState make_planar_seeded_state(double extent, std::size_t cells,
                                          double h0) {
  if (!(h0 > 0.0)) throw std::invalid_argument("planar: h0 must be > 0");
  PlanarRieszState st = make_planar_unit_state(extent, cells);
  const double pi = kTwoPi / 2.0;
  std::vector<double> axis(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    double tau = st.grid.origin[0] + double(k) * st.grid.step;
    double x = pi * tau * h0;
    double s = x == 0.0 ? 1.0 : std::sin(x) / x;
    axis[k] = h0 * s * s;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < std::int64_t(cells); ++j) {
    for (std::size_t i = 0; i < cells; ++i) {
      st.grid.values[std::size_t(j) * cells + i] = axis[i] * axis[std::size_t(j)];
    }
  }
  return st;
}

void accumulate_2d(PlanarRieszState& state, const ExpSum2D& stage,
                   const StripSet& strip) {
  SampledDensity qn =
      eval_grid_2d(stage, state.grid.origin, state.grid.step, state.grid.nx,
                   state.grid.ny, false);
  const std::size_t n = qn.values.size();
  std::vector<double> dev(n);
  double sup = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double v = qn.values[k];
    dev[k] = std::fabs(v - 1.0);
    sup = std::max(sup, v);
  }
  StageDiagnostics d;
  d.Mn = std::max(1.0, sup);
  d.epsN = qn.step * qn.step * pairwise_sum(dev.data(), n);
  double prodM = d.Mn;
  for (const StageDiagnostics& past : state.stages) prodM *= past.Mn;
  d.alphaN = d.epsN > 0.0 ? std::sqrt(d.epsN * prodM) : 0.0;

  double* out = state.grid.values.data();
  const double* in = qn.values.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < std::int64_t(n); ++k) out[k] *= in[k];

  state.stageStrips.push_back(strip);
  state.stages.push_back(d);
  state.pi0 *= 1.0 + d.alphaN;
  if (d.epsN > 0.0) state.exceptionalMass += d.epsN / d.alphaN;
}

RegionMap classify_regions(const PlanarRieszState& state, double limitAngle,
                           double tubeHalfWidth) {
  if (state.stageStrips.size() < 2) {
    throw std::invalid_argument("regions: needs at least two stages");
  }
  if (!(tubeHalfWidth > 0.0)) {
    throw std::invalid_argument("regions: tube width must be > 0");
  }
  RegionMap map;
  map.nx = state.grid.nx;
  map.ny = state.grid.ny;
  map.labels.assign(map.nx * map.ny, 2);
  double c = std::cos(limitAngle), s = std::sin(limitAngle);
  map.limitDir1 = {c, -s};
  map.limitDir2 = {s, c};

#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < std::int64_t(map.ny); ++j) {
    double t2 = state.grid.origin[1] + double(j) * state.grid.step;
    for (std::size_t i = 0; i < map.nx; ++i) {
      double t1 = state.grid.origin[0] + double(i) * state.grid.step;
      int hits = 0;
      for (const StripSet& sp : state.stageStrips) {
        if (strip_contains(sp, {t1, t2})) {
          if (++hits == 2) break;
        }
      }
      unsigned char label;
      if (hits >= 2) {
        label = 0;
      } else {
        double d1 = std::fabs(map.limitDir1[0] * t2 - map.limitDir1[1] * t1);
        double d2 = std::fabs(map.limitDir2[0] * t2 - map.limitDir2[1] * t1);
        label = (d1 < tubeHalfWidth || d2 < tubeHalfWidth) ? 1 : 2;
      }
      map.labels[std::size_t(j) * map.nx + i] = label;
    }
  }

  const double cell = state.grid.step * state.grid.step;
  std::vector<double> masked(map.labels.size());
  double mass[3];
  for (unsigned char cls = 0; cls < 3; ++cls) {
    for (std::size_t k = 0; k < masked.size(); ++k) {
      masked[k] = map.labels[k] == cls ? state.grid.values[k] : 0.0;
    }
    mass[cls] = cell * pairwise_sum(masked.data(), masked.size());
  }
  map.massCovered = mass[0];
  map.massTube = mass[1];
  map.massFree = mass[2];
  return map;
}

std::string region_masses_to_csv(const RegionMap& regions) {
  std::string out = "region,mass\n";
  out += "covered," + format_double(regions.massCovered) + "\n";
  out += "tube," + format_double(regions.massTube) + "\n";
  out += "free," + format_double(regions.massFree) + "\n";
  return out;
}

double strip_mass_bound(const ExpSum2D& stage, const StripSet& strip,
                        double limitRadius, double epsQuadrature) {
  if (!(strip.a < 1.0)) {
    throw std::invalid_argument("strip mass: thin half width must be < 1");
  }
  Mat2 ft = stage.frame.transpose();
  double tol = 1e-12 * std::max(frame_scale(ft), frame_scale(strip.frame));
  if (std::fabs(ft.m00 - strip.frame.m00) > tol ||
      std::fabs(ft.m01 - strip.frame.m01) > tol ||
      std::fabs(ft.m10 - strip.frame.m10) > tol ||
      std::fabs(ft.m11 - strip.frame.m11) > tol) {
    throw std::invalid_argument(
        "strip mass: stage frame does not pair with the strip frame");
  }
  double L = limitRadius < 0.0 ? strip.b : std::min(limitRadius, strip.b);
  if (!(L > 0.0)) {
    throw std::invalid_argument("strip mass: neighborhood must be > 0");
  }
  double mxL = axis_abs_mass(stage.x, L, epsQuadrature);
  double mya = axis_abs_mass(stage.y, strip.a, epsQuadrature);
  double mxa = axis_abs_mass(stage.x, strip.a, epsQuadrature);
  double myL = axis_abs_mass(stage.y, L, epsQuadrature);
  // union of the two boxes clipped to the center neighborhood; the overlap
  // square has side 2 min(a, L)
  double mxc = strip.a <= L ? mxa : mxL;
  double myc = strip.a <= L ? mya : myL;
  double mass = mxL * mya + mxa * myL - mxc * myc;
  return mass / std::fabs(strip.frame.det());
}

RenderPaths render_density(const PlanarRieszState& state,
                           const std::string& pathPrefix) {
  PgmRender r = render_density_pgm(state.grid);
  RenderPaths out{pathPrefix + ".pgm", pathPrefix + ".json"};
  auto write = [](const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw std::runtime_error("render: cannot open " + path + ": " +
                               std::strerror(errno));
    }
    f.write(bytes.data(), std::streamsize(bytes.size()));
    f.flush();
    if (!f) {
      throw std::runtime_error("render: write failed for " + path + ": " +
                               std::strerror(errno));
    }
  };
  write(out.pgmPath, r.pgm);
  write(out.sidecarPath, r.sidecarJson);
  return out;
}

}  // namespace rankone
