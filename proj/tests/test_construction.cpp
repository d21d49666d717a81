#include "doctest.h"
#include "rankone/construction.hpp"
#include "rankone/dd.hpp"

#include <cmath>

using namespace rankone;

namespace {

// Independent extended-precision re-derivation of a stage. Mirrors the
// contract, not the implementation: frequencies via dd_exp, no expm1.
struct DdGeom {
  dd h;
  std::vector<dd> pos;
  std::vector<dd> spacers;
  dd hNext;
};

DdGeom dd_geom(double m, double beta, std::int64_t q) {
  DdGeom g;
  dd b{beta, 0.0};
  dd scale = dd_div(dd_mul(dd{m, 0.0}, double(q)), dd_mul(b, b));
  if (q == 1) {
    g.h = dd_mul(dd_div(dd{m, 0.0}, beta), dd_add(dd_exp(b), -1.0));
    g.pos = {dd{0.0, 0.0}};
    g.hNext = g.h;
    return g;
  }
  std::vector<dd> w(q);
  for (std::int64_t y = 0; y < q; ++y) {
    dd arg = dd_div(dd_mul(b, double(y)), double(q));
    w[y] = dd_mul(scale, dd_exp(arg));
  }
  g.pos.resize(q);
  for (std::int64_t y = 0; y < q; ++y) g.pos[y] = dd_sub(w[y], w[0]);
  g.h = g.pos[1];
  g.spacers.resize(q - 1);
  for (std::int64_t j = 0; j + 1 < q; ++j) {
    g.spacers[j] = dd_sub(dd_sub(g.pos[j + 1], g.pos[j]), g.h);
  }
  g.hNext = dd_add(g.pos.back(), g.h);
  return g;
}

double rel(double got, dd want) {
  double w = want.hi;
  double scale = std::fabs(w) > 1e-300 ? std::fabs(w) : 1.0;
  return std::fabs(got - w) / scale;
}

}  // namespace

TEST_CASE("stage geometry q=64 m=1 beta=1/4 matches extended precision") {
  FrequencyParams p{1.0, 0.25, 64};
  StageGeometry g = derive_stage_geometry(p);
  DdGeom o = dd_geom(1.0, 0.25, 64);

  REQUIRE(g.positions.size() == 64);
  REQUIRE(g.spacers.size() == 63);
  CHECK(rel(g.h, o.h) < 1e-12);
  CHECK(rel(g.hNext, o.hNext) < 1e-12);
  for (std::size_t j = 0; j < 64; ++j) CHECK(rel(g.positions[j], o.pos[j]) < 1e-12);
  for (std::size_t j = 0; j < 63; ++j) {
    if (j == 0) {
      CHECK(g.spacers[0] == 0.0);  // first gap is exactly the step
    } else {
      CHECK(rel(g.spacers[j], o.spacers[j]) < 1e-12);
    }
  }

  // frozen 200-bit anchors
  CHECK(std::fabs(g.h - 0x1.00802ab55777dp+2) / 4.0 < 1e-12);
  CHECK(std::fabs(g.hNext - 0x1.21b948bc4077cp+8) / 290.0 < 1e-12);
  CHECK(std::fabs(g.positions[63] - 0x1.1db748116b19ep+8) / 286.0 < 1e-12);
  CHECK(std::fabs(g.spacers[1] - 0x1.010095956b672p-6) / 0.0157 < 1e-12);
  CHECK(std::fabs(g.spacers[31] - 0x1.0827f786b88bdp-1) / 0.516 < 1e-12);
  CHECK(std::fabs(g.spacers[62] - 0x1.19289baab3cd3p+0) / 1.098 < 1e-12);

  for (std::size_t j = 0; j + 1 < g.positions.size(); ++j) {
    CHECK(g.positions[j] < g.positions[j + 1]);
    CHECK(g.spacers[j] >= 0.0);
  }
}

TEST_CASE("stage geometry closed forms") {
  SUBCASE("q=2 m=1 beta=1") {
    StageGeometry g = derive_stage_geometry({1.0, 1.0, 2});
    CHECK(g.positions[0] == 0.0);
    CHECK(std::fabs(g.positions[1] - 0x1.4c2531c3c0d38p+0) < 1e-15);
    CHECK(g.h == g.positions[1]);
    CHECK(g.spacers.size() == 1);
    CHECK(g.spacers[0] == 0.0);
    CHECK(std::fabs(g.hNext - 0x1.4c2531c3c0d38p+1) < 1e-14);
  }
  SUBCASE("q=1 single copy convention") {
    StageGeometry g = derive_stage_geometry({1.0, 0.5, 1});
    CHECK(g.positions == std::vector<double>{0.0});
    CHECK(g.spacers.empty());
    CHECK(g.h == doctest::Approx(2.0 * std::expm1(0.5)).epsilon(1e-15));
    CHECK(g.hNext == g.h);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate_params({1.0, 0.5, 0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_params({0.0, 0.5, 4}), std::invalid_argument);
  CHECK_THROWS_AS(validate_params({1.0, 0.3, 4}), std::invalid_argument);
  CHECK_THROWS_AS(validate_params({1.0, 2.0, 4}), std::invalid_argument);
  CHECK_THROWS_AS(validate_params({1.0, -0.5, 4}), std::invalid_argument);
  CHECK_NOTHROW(validate_params({1.0, 1.0 / 3.0, 4}));
  CHECK_NOTHROW(validate_params({1.0, 0.125, 1}));
  // cap can be widened explicitly
  CHECK_NOTHROW(validate_params({1.0, 1.0, 4}, 1.0));
}

TEST_CASE("flattened frequency law loses monotonicity and is rejected") {
  // beta/q so small that adjacent frequencies collapse in binary64
  FrequencyParams p{1.0, 0x1p-40, std::int64_t(1) << 20};
  CHECK_THROWS_AS(derive_stage_geometry(p), std::invalid_argument);
}

TEST_CASE("chained schedule: heights continue and gammas satisfy the ratio law") {
  std::vector<std::pair<double, std::int64_t>> bq;
  for (int n = 0; n < 6; ++n) bq.push_back({std::ldexp(1.0, -(n + 1)), 8});
  TowerSchedule s = build_schedule(1.0, bq);
  REQUIRE(s.size() == 6);

  for (std::size_t n = 0; n + 1 < s.size(); ++n) {
    double hn = s.stages[n].geom.hNext;
    double h1 = s.stages[n + 1].geom.h;
    CHECK(std::fabs(hn - h1) / hn < 1e-13);
  }

  std::vector<double> g = derive_gammas(s, 6);
  REQUIRE(g.size() == 7);
  CHECK(g[6] == 0.0);
  for (std::size_t n = 0; n + 1 < g.size(); ++n) CHECK(g[n] > g[n + 1]);

  // frozen anchor for gamma_0 of this exact schedule
  CHECK(std::fabs(g[0] - 0x1.234cacd0abfa5p-2) < 1e-12);

  // fundamental relation (1-g_{n+1})/(1-g_n) = hNext_n/(q_n h_n)
  for (std::size_t n = 0; n < 6; ++n) {
    double lhs = (1.0 - g[n + 1]) / (1.0 - g[n]);
    double rhs = s.stages[n].geom.hNext /
                 (double(s.stages[n].params.q) * s.stages[n].geom.h);
    CHECK(std::fabs(lhs - rhs) < 1e-12);
  }

  // extended-precision cross-check of the whole gamma chain
  dd prod{1.0, 0.0};
  for (int k = 5; k >= 0; --k) {
    const Stage& st = s.stages[k];
    dd num = dd_mul(dd{st.geom.h, 0.0}, double(st.params.q));
    prod = dd_div(dd_mul(prod, num), dd{st.geom.hNext, 0.0});
  }
  CHECK(std::fabs(g[0] - (1.0 - prod.hi)) < 1e-13);

  CHECK(gamma_tail_log_bound(s, 6) == 0.0);
  CHECK(gamma_tail_log_bound(s, 4) > 0.0);
}

TEST_CASE("divergent schedule is rejected") {
  std::vector<std::pair<double, std::int64_t>> bq(48, {0.5, 8});
  TowerSchedule s = build_schedule(1.0, bq);
  CHECK_THROWS_AS(derive_gammas(s, 8), ScheduleDivergence);
}

TEST_CASE("planar frames compose scaled rotations") {
  TowerSchedule s = build_schedule(1.0, {{0.5, 4}, {0.25, 4}}, {0.5, 0.25});
  PlanarFrames f = derive_planar_frames(s);
  REQUIRE(f.psis.size() == 3);
  CHECK(f.psis[0].is_identity());
  // V(1/4) * V(1/2) has exact dyadic entries
  CHECK(f.psis[2].m00 == 0.875);
  CHECK(f.psis[2].m01 == -0.75);
  CHECK(f.psis[2].m10 == 0.75);
  CHECK(f.psis[2].m11 == 0.875);
  CHECK(f.psis[2].det() == 1.328125);  // (1+1/4)(1+1/16)
  CHECK(f.angles[1] == doctest::Approx(std::atan(0.5)).epsilon(1e-15));
  CHECK(f.angles[2] ==
        doctest::Approx(std::atan(0.5) + std::atan(0.25)).epsilon(1e-15));
  REQUIRE(f.ells.size() == 2);
  for (std::size_t n = 0; n < 2; ++n) {
    const Stage& st = s.stages[n];
    CHECK(f.ells[n] == doctest::Approx(double(st.params.q) * st.geom.h *
                                       std::exp(st.params.beta))
                           .epsilon(1e-14));
  }
}

TEST_CASE("schedule json round trip is exact and strict") {
  TowerSchedule s = build_schedule(1.0, {{0.5, 8}, {0.25, 16}}, {0.5, 0.25});
  std::string text = schedule_to_json(s);
  TowerSchedule r = schedule_from_json(text);
  REQUIRE(r.size() == s.size());
  for (std::size_t n = 0; n < s.size(); ++n) {
    CHECK(r.stages[n].params.m == s.stages[n].params.m);
    CHECK(r.stages[n].params.beta == s.stages[n].params.beta);
    CHECK(r.stages[n].params.q == s.stages[n].params.q);
    CHECK(r.stages[n].geom.h == s.stages[n].geom.h);
    CHECK(r.stages[n].geom.hNext == s.stages[n].geom.hNext);
  }
  CHECK(r.xis == s.xis);
  CHECK(r.depth == s.depth);

  CHECK_THROWS_AS(schedule_from_json("{\"stages\":[]}"), ConfigError);
  CHECK_THROWS_AS(
      schedule_from_json(
          "{\"stages\":[{\"m\":1.0,\"beta\":0.5,\"q\":4}],\"xis\":[],"
          "\"depth\":1,\"bogus\":3}"),
      ConfigError);
  CHECK_THROWS_AS(
      schedule_from_json(
          "{\"stages\":[{\"m\":1.0,\"beta\":0.5}],\"xis\":[],\"depth\":1}"),
      ConfigError);
}

TEST_CASE("mismatched heights are rejected by make_schedule") {
  // two independent stages whose heights do not chain
  std::vector<FrequencyParams> ps{{1.0, 0.5, 8}, {1.0, 0.5, 8}};
  CHECK_THROWS_AS(make_schedule(ps), std::invalid_argument);
}
