#pragma once
// Compensated double-double arithmetic. Grid kernels only need frac_mod1 for
// phase reduction; the full dd type exists so tests can evaluate frequencies
// and cumulative products at ~2^-100 and compare the binary64 paths against
// an independent extended-precision route.
//
// Invariant after normalization: |lo| <= ulp(hi)/2, value = hi + lo exactly.

#include <cmath>

namespace rankone {

struct dd {
  double hi = 0.0;
  double lo = 0.0;
};

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bv = s - a;
  return {s, (a - (s - bv)) + (b - bv)};
}

// requires |a| >= |b| or a == 0
inline dd quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, dd b) {
  dd s = two_sum(a.hi, b.hi);
  return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline dd dd_add(dd a, double b) {
  dd s = two_sum(a.hi, b);
  return quick_two_sum(s.hi, s.lo + a.lo);
}

inline dd dd_neg(dd a) { return {-a.hi, -a.lo}; }

inline dd dd_sub(dd a, dd b) { return dd_add(a, dd_neg(b)); }

inline dd dd_mul(dd a, dd b) {
  dd p = two_prod(a.hi, b.hi);
  return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

inline dd dd_mul(dd a, double b) {
  dd p = two_prod(a.hi, b);
  return quick_two_sum(p.hi, p.lo + a.lo * b);
}

inline dd dd_div(dd a, double b) {
  double q0 = a.hi / b;
  dd p = two_prod(q0, b);
  dd r = dd_add(a, dd_neg(p));
  double q1 = (r.hi + r.lo) / b;
  return quick_two_sum(q0, q1);
}

inline dd dd_div(dd a, dd b) {
  double q0 = a.hi / b.hi;
  dd r = dd_sub(a, dd_mul(b, q0));
  double q1 = r.hi / b.hi;
  r = dd_sub(r, dd_mul(b, q1));
  double q2 = r.hi / b.hi;
  dd q = quick_two_sum(q0, q1);
  return dd_add(q, q2);
}

// exp via ln2 range reduction and a Taylor tail, good to ~2^-100 for
// |x| < 700. Oracle-grade only; kernels never call this.
inline dd dd_exp(dd x) {
  constexpr dd kLn2{0x1.62e42fefa39efp-1, 0x1.abc9e3b39803fp-56};
  double k = std::nearbyint(x.hi / kLn2.hi);
  dd r = dd_add(x, dd_mul(kLn2, -k));
  dd term{1.0, 0.0};
  dd sum{1.0, 0.0};
  for (int n = 1; n < 64; ++n) {
    term = dd_div(dd_mul(term, r), double(n));
    sum = dd_add(sum, term);
    if (std::fabs(term.hi) < 0x1p-104 * std::fabs(sum.hi)) break;
  }
  int ki = int(k);
  return {std::ldexp(sum.hi, ki), std::ldexp(sum.lo, ki)};
}

// x - nearest integer, exact for any |x| < 2^53 (Sterbenz once |n| >= 1)
inline double frac_nearest(double x) { return x - std::nearbyint(x); }

inline double dd_frac(dd x) {
  double r = frac_nearest(x.hi) + frac_nearest(x.lo);
  return frac_nearest(r);
}

// fractional part of a*b mapped to [-0.5, 0.5]. The product is formed as an
// exact two_prod, so aliasing from |a*b| >> 1 cancels before any trig call.
inline double frac_mod1(double a, double b) {
  dd p = two_prod(a, b);
  double r = frac_nearest(p.hi) + frac_nearest(p.lo);
  return frac_nearest(r);
}

}  // namespace rankone
