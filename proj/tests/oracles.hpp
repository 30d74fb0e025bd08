#pragma once

// Independent references used by the unit and acceptance tests. Nothing in
// here calls into the library's rounding code.

#include <gmpxx.h>
#include <mpfr.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace oracle {

// Round a finite or non-finite double to a binary format with p significand
// bits and minimum normal exponent emin, using integer arithmetic on the
// significand. Ties go to even; results above max_finite become infinity.
inline double round_bits(double x, int p, int emin, double max_finite) {
  if (!std::isfinite(x) || x == 0.0) return x;
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const bool neg = bits >> 63;
  const int biased = static_cast<int>((bits >> 52) & 0x7ff);
  std::uint64_t m = bits & ((std::uint64_t{1} << 52) - 1);
  int e;  // x = m * 2^(e - 52)
  if (biased == 0) {
    e = -1022;
  } else {
    m |= std::uint64_t{1} << 52;
    e = biased - 1023;
  }
  // Normalize subnormal doubles so that bit 52 is set.
  while (!(m >> 52)) {
    m <<= 1;
    --e;
  }
  int drop = 53 - p;
  if (e < emin) drop += emin - e;
  std::uint64_t q;
  if (drop >= 64) {
    q = 0;
  } else {
    q = m >> drop;
    const std::uint64_t rem = m & ((std::uint64_t{1} << drop) - 1);
    const std::uint64_t half = std::uint64_t{1} << (drop - 1);
    if (rem > half || (rem == half && (q & 1))) ++q;
  }
  double r = std::ldexp(static_cast<double>(q), e - 52 + drop);
  if (r > max_finite) r = std::numeric_limits<double>::infinity();
  return neg ? -r : r;
}

inline double half_round(double x) { return round_bits(x, 11, -14, 65504.0); }
inline double bf16_round(double x) { return round_bits(x, 8, -126, 0x1.fep127); }

// IEEE binary16 encode of a float, classic shift-and-round on the bit
// pattern (subnormals, ties to even, overflow to infinity).
inline std::uint16_t float_to_half_bits(float f) {
  const std::uint32_t x = std::bit_cast<std::uint32_t>(f);
  const std::uint16_t sign = static_cast<std::uint16_t>((x >> 16) & 0x8000);
  const std::uint32_t abs = x & 0x7fffffff;
  if (abs >= 0x7f800000) return sign | (abs > 0x7f800000 ? 0x7e00 : 0x7c00);
  const int exp = static_cast<int>(abs >> 23) - 127;
  std::uint32_t mant = (abs & 0x7fffff) | 0x800000;
  if (exp > 15) return sign | 0x7c00;
  if (exp < -25) return sign;
  int shift = exp >= -14 ? 13 : 13 + (-14 - exp);
  std::uint32_t q = mant >> shift;
  const std::uint32_t rem = mant & ((1u << shift) - 1);
  const std::uint32_t half = 1u << (shift - 1);
  if (rem > half || (rem == half && (q & 1))) ++q;
  std::uint32_t out;
  if (exp >= -14) {
    // q holds 11 bits including the implicit one; a carry bumps the exponent.
    out = (static_cast<std::uint32_t>(exp + 15) << 10) + (q - 0x400);
    if (q == 0x800) out = static_cast<std::uint32_t>(exp + 16) << 10;
  } else {
    out = q;  // subnormal, may carry into the smallest normal
  }
  if (out >= 0x7c00) return sign | 0x7c00;
  return static_cast<std::uint16_t>(sign | out);
}

inline double half_bits_to_double(std::uint16_t h) {
  const bool neg = h & 0x8000;
  const int e = (h >> 10) & 0x1f;
  const int m = h & 0x3ff;
  double v;
  if (e == 0) {
    v = std::ldexp(m, -24);
  } else if (e == 31) {
    v = m ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
  } else {
    v = std::ldexp(m + 1024, e - 25);
  }
  return neg ? -v : v;
}

inline double float_to_bf16(float f) {
  std::uint32_t x = std::bit_cast<std::uint32_t>(f);
  if ((x & 0x7fffffff) > 0x7f800000) return f;
  x += 0x7fff + ((x >> 16) & 1);
  x &= 0xffff0000u;
  return static_cast<double>(std::bit_cast<float>(x));
}

inline mpq_class exact(double hi, double lo = 0.0) { return mpq_class(hi) + mpq_class(lo); }

// |approx - exact| / |exact| as a double (0 when both vanish).
inline double rel_error(const mpq_class& approx, const mpq_class& truth) {
  if (truth == 0) return approx == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  mpq_class d = approx - truth;
  d = abs(d) / abs(truth);
  return d.get_d();
}

// sqrt(hi + lo) to 400 bits, returned as an exact rational.
inline mpq_class sqrt_exact(double hi, double lo) {
  mpfr_t a, b, r;
  mpfr_inits2(400, a, b, r, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(a, hi, MPFR_RNDN);
  mpfr_set_d(b, lo, MPFR_RNDN);
  mpfr_add(a, a, b, MPFR_RNDN);
  mpfr_sqrt(r, a, MPFR_RNDN);
  mpz_class mant;
  const long exp = mpfr_get_z_2exp(mant.get_mpz_t(), r);
  mpq_class out(mant);
  if (exp >= 0) {
    mpq_class scale(1);
    mpz_mul_2exp(scale.get_num_mpz_t(), scale.get_num_mpz_t(), static_cast<unsigned long>(exp));
    out *= scale;
  } else {
    mpz_mul_2exp(out.get_den_mpz_t(), out.get_den_mpz_t(), static_cast<unsigned long>(-exp));
    out.canonicalize();
  }
  mpfr_clears(a, b, r, static_cast<mpfr_ptr>(nullptr));
  return out;
}

}  // namespace oracle
