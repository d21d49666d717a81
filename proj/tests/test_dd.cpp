#include "doctest.h"
#include "rankone/dd.hpp"
#include "rankone/types.hpp"

#include <cmath>
#include <random>

using namespace rankone;

namespace {
double dd_rel_err(dd got, double want_hi, double want_lo) {
  dd diff = dd_sub(got, dd{want_hi, want_lo});
  double mag = std::fabs(want_hi);
  return std::fabs(diff.hi) / (mag > 0 ? mag : 1.0);
}
}  // namespace

TEST_CASE("two_prod is an exact split") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e8, 1e8);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng);
    dd p = two_prod(a, b);
    // lo must land below one ulp of hi
    CHECK(std::fabs(p.lo) <= std::ldexp(std::fabs(p.hi), -52));
    long double exact = (long double)a * (long double)b;
    CHECK((long double)p.hi + (long double)p.lo == exact);
  }
}

TEST_CASE("dd_exp matches frozen 200-bit values") {
  struct Case {
    double x;
    double hi, lo;
  };
  static const Case cases[] = {
      {1.0, 0x1.5bf0a8b145769p+1, 0x1.4d57ee2b1013ap-53},
      {-0.5, 0x1.368b2fc6f960ap-1, -0x1.85314b9559e64p-61},
      {0.123456789, 0x1.21a380e17ced3p+0, 0x1.e674904529187p-56},
      {10.25, 0x1.b9ea2aed2a0f1p+14, 0x1.c639d5d11309ap-40},
      {-3.75, 0x1.81509354f0d29p-6, 0x1.75db52f890742p-60},
  };
  for (const auto& c : cases) {
    dd got = dd_exp(dd{c.x, 0.0});
    CHECK(dd_rel_err(got, c.hi, c.lo) < 1e-29);
  }
}

TEST_CASE("dd_div round trips against dd_mul") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 100.0);
  for (int i = 0; i < 500; ++i) {
    dd a{u(rng), 0.0};
    dd b{u(rng), 0.0};
    dd q = dd_div(a, b);
    dd back = dd_mul(q, b);
    CHECK(dd_rel_err(back, a.hi, a.lo) < 1e-30);
  }
}

TEST_CASE("frac_nearest is exact and centered") {
  CHECK(frac_nearest(3.0) == 0.0);
  CHECK(frac_nearest(2.25) == 0.25);
  CHECK(frac_nearest(2.75) == -0.25);
  CHECK(frac_nearest(-7.125) == -0.125);
  CHECK(std::fabs(frac_nearest(0.5)) == 0.5);
}

TEST_CASE("frac_mod1 agrees with long double reduction on large products") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> utau(0.25, 4.0);
  std::uniform_real_distribution<double> uw(1e3, 1e12);
  for (int i = 0; i < 2000; ++i) {
    double tau = utau(rng), w = uw(rng);
    double f = frac_mod1(tau, w);
    CHECK(f >= -0.5);
    CHECK(f <= 0.5);
    long double prod = (long double)tau * (long double)w;
    long double r = prod - roundl(prod);
    long double diff = fabsl((long double)f - r);
    if (diff > 0.5) diff = 1.0L - diff;  // both ends of the wrap are fine
    // the 64-bit oracle itself carries ~|tau*w| * 2^-63 of rounding
    double tol = std::fabs(tau * w) * 0x1p-61 + 1e-15;
    CHECK((double)diff < tol);
  }
}

TEST_CASE("frac_mod1 exact on constructed integer-plus-quarter products") {
  // tau * w = 2^40 + 0.25 exactly: tau = 2^20, w = 2^20 + 2^-22
  double tau = 0x1p20;
  double w = 0x1p20 + 0x1p-22;
  CHECK(frac_mod1(tau, w) == 0.25);
}

TEST_CASE("pairwise_sum is deterministic and exact on dyadics") {
  std::vector<double> v(1023, 0.125);
  CHECK(pairwise_sum(v) == 1023 * 0.125);
  std::vector<double> w{1.0, -1.0, 0.5, -0.5, 0.25};
  CHECK(pairwise_sum(w) == 0.25);
}

TEST_CASE("Mat2 algebra") {
  Mat2 v{1.0, -0.5, 0.5, 1.0};
  CHECK(v.det() == doctest::Approx(1.25).epsilon(1e-15));
  Mat2 vi = v.inverse();
  Mat2 id = v * vi;
  CHECK(id.m00 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(id.m01) < 1e-15);
  CHECK(std::fabs(id.m10) < 1e-15);
  CHECK(id.m11 == doctest::Approx(1.0).epsilon(1e-15));
  Vec2 p = v.apply({2.0, 4.0});
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 5.0);
}

TEST_CASE("Window validates and measures") {
  Window g(0.5, 2.0);
  CHECK(g.measure() == 3.0);
  CHECK_THROWS_AS(Window(2.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(Window(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Window(1.0, 1.0), std::invalid_argument);
}
