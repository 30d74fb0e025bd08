#pragma once

// Double-word arithmetic on WideScalar. Addition and multiplication follow
// the accurate algorithms of Joldes, Muller and Popescu (relative error
// below 3u^2 and 4u^2 with u = 2^-53); division and square root use one
// extra correction term in the style of the QD library.
//
// This file must be compiled without floating-point contraction: the
// error-free transforms rely on every + and * being rounded separately.

#include <cmath>
#include <limits>

#include "tsir/precision.hpp"

namespace tsir::dw {

inline WideScalar two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

// Requires exponent(a) >= exponent(b) (or a == 0).
inline WideScalar fast_two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double e = b - (s - a);
  return {s, e};
}

inline WideScalar two_prod(double a, double b) noexcept {
  const double p = a * b;
#if defined(__FMA__) || defined(FP_FAST_FMA)
  return {p, std::fma(a, b, -p)};
#else
  // Veltkamp splitting; exact unless a*b overflows.
  constexpr double kSplit = 134217729.0;  // 2^27 + 1
  const double ca = kSplit * a;
  const double ah = ca - (ca - a);
  const double al = a - ah;
  const double cb = kSplit * b;
  const double bh = cb - (cb - b);
  const double bl = b - bh;
  const double e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
  return {p, e};
#endif
}

inline double fused(double a, double b, double c) noexcept {
#if defined(__FMA__) || defined(FP_FAST_FMA)
  return std::fma(a, b, c);
#else
  return a * b + c;
#endif
}

inline WideScalar from_double(double x) noexcept { return {x, 0.0}; }
inline double to_double(const WideScalar& x) noexcept { return x.hi; }
inline bool is_finite(const WideScalar& x) noexcept { return std::isfinite(x.hi); }
inline WideScalar neg(const WideScalar& x) noexcept { return {-x.hi, -x.lo}; }
inline WideScalar abs(const WideScalar& x) noexcept { return x.hi < 0.0 ? neg(x) : x; }

inline WideScalar add(const WideScalar& x, const WideScalar& y) noexcept {
  if (!std::isfinite(x.hi) || !std::isfinite(y.hi)) return {x.hi + y.hi, 0.0};
  const WideScalar s = two_sum(x.hi, y.hi);
  const WideScalar t = two_sum(x.lo, y.lo);
  const double c = s.lo + t.hi;
  const WideScalar v = fast_two_sum(s.hi, c);
  const double w = t.lo + v.lo;
  const WideScalar z = fast_two_sum(v.hi, w);
  if (!std::isfinite(z.hi)) return {z.hi, 0.0};
  return z;
}

inline WideScalar sub(const WideScalar& x, const WideScalar& y) noexcept { return add(x, neg(y)); }

inline WideScalar add(const WideScalar& x, double y) noexcept {
  if (!std::isfinite(x.hi) || !std::isfinite(y)) return {x.hi + y, 0.0};
  const WideScalar s = two_sum(x.hi, y);
  const double v = x.lo + s.lo;
  const WideScalar z = fast_two_sum(s.hi, v);
  if (!std::isfinite(z.hi)) return {z.hi, 0.0};
  return z;
}

inline WideScalar mul(const WideScalar& x, double y) noexcept {
  const WideScalar c = two_prod(x.hi, y);
  if (!std::isfinite(c.hi)) return {c.hi, 0.0};
  const double cl3 = fused(x.lo, y, c.lo);
  const WideScalar z = fast_two_sum(c.hi, cl3);
  if (!std::isfinite(z.hi)) return {z.hi, 0.0};
  return z;
}

inline WideScalar mul(const WideScalar& x, const WideScalar& y) noexcept {
  const WideScalar c = two_prod(x.hi, y.hi);
  if (!std::isfinite(c.hi)) return {c.hi, 0.0};
  const double tl0 = x.lo * y.lo;
  const double tl1 = fused(x.hi, y.lo, tl0);
  const double cl2 = fused(x.lo, y.hi, tl1);
  const double cl3 = c.lo + cl2;
  const WideScalar z = fast_two_sum(c.hi, cl3);
  if (!std::isfinite(z.hi)) return {z.hi, 0.0};
  return z;
}

inline WideScalar div(const WideScalar& a, const WideScalar& b) noexcept {
  const double q1 = a.hi / b.hi;
  if (!std::isfinite(q1) || !std::isfinite(a.hi) || b.hi == 0.0) return {q1, 0.0};
  WideScalar r = sub(a, mul(b, q1));
  const double q2 = r.hi / b.hi;
  r = sub(r, mul(b, q2));
  const double q3 = r.hi / b.hi;
  const WideScalar q = fast_two_sum(q1, q2);
  return add(q, q3);
}

inline WideScalar sqrt(const WideScalar& a) noexcept {
  if (a.hi == 0.0) return {a.hi, 0.0};
  if (!(a.hi > 0.0)) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  if (!std::isfinite(a.hi)) return {a.hi, 0.0};
  const double s = std::sqrt(a.hi);
  const WideScalar diff = sub(a, two_prod(s, s));
  const double corr = diff.hi / (2.0 * s);
  return fast_two_sum(s, corr);
}

inline bool less(const WideScalar& a, const WideScalar& b) noexcept {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}

}  // namespace tsir::dw

namespace tsir {

inline WideScalar operator+(const WideScalar& a, const WideScalar& b) noexcept { return dw::add(a, b); }
inline WideScalar operator-(const WideScalar& a, const WideScalar& b) noexcept { return dw::sub(a, b); }
inline WideScalar operator*(const WideScalar& a, const WideScalar& b) noexcept { return dw::mul(a, b); }
inline WideScalar operator/(const WideScalar& a, const WideScalar& b) noexcept { return dw::div(a, b); }
inline WideScalar operator-(const WideScalar& a) noexcept { return dw::neg(a); }

}  // namespace tsir
