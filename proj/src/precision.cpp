#include "tsir/precision.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "tsir/double_word.hpp"

namespace tsir {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<PrecisionFormat, 5> kFormats{{
    {Format::Half, 11, -14, 15, 0x1p-11, 65504.0, "half"},
    {Format::BFloat16, 8, -126, 127, 0x1p-8, 0x1.fep127, "bfloat16"},
    {Format::Single, 24, -126, 127, 0x1p-24, 0x1.fffffep127, "single"},
    {Format::Double, 53, -1022, 1023, 0x1p-53, std::numeric_limits<double>::max(), "double"},
    // Nominal double-word precision. Individual operations are accurate to
    // a few units of 2^-106 (see double_word.hpp).
    {Format::QuadDD, 106, -1022, 1023, 0x1p-106, std::numeric_limits<double>::max(), "quad"},
}};

// 2^k for k in the normal binary64 range, built from the bit pattern.
inline double pow2(int k) noexcept {
  return std::bit_cast<double>(static_cast<std::uint64_t>(k + 1023) << 52);
}

// Exponent of |x| for finite nonzero x, valid for binary64 subnormals too.
inline int exponent_of(double x) noexcept {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  const int biased = static_cast<int>((bits >> 52) & 0x7ff);
  if (biased != 0) return biased - 1023;
  return std::ilogb(x);
}

// Rounds finite nonzero x to p significant bits with exponent floor emin,
// ignoring the upper exponent limit. Also reports the quantum used.
inline double round_unbounded(double x, int p, int emin, double& quantum) noexcept {
  int e = exponent_of(x);
  if (e < emin) e = emin;
  const int shift = e - p + 1;
  // Scaling by a power of two is exact; nearbyint honours ties-to-even.
  if (shift >= -1022) {
    quantum = pow2(shift);
    return std::nearbyint(x * pow2(-shift)) * quantum;
  }
  quantum = std::ldexp(1.0, shift);
  return std::nearbyint(std::ldexp(x, -shift)) * quantum;
}

}  // namespace

const PrecisionFormat& descriptor(Format f) noexcept { return kFormats[static_cast<std::size_t>(f)]; }

Format parse_format(std::string_view text) {
  if (text == "h" || text == "half" || text == "fp16") return Format::Half;
  if (text == "b" || text == "bfloat16" || text == "bf16") return Format::BFloat16;
  if (text == "s" || text == "single" || text == "fp32") return Format::Single;
  if (text == "d" || text == "double" || text == "fp64") return Format::Double;
  if (text == "q" || text == "quad" || text == "quaddd" || text == "fp128") return Format::QuadDD;
  throw std::invalid_argument("unknown precision format '" + std::string(text) + "'");
}

char format_code(Format f) noexcept {
  switch (f) {
    case Format::Half: return 'h';
    case Format::BFloat16: return 'b';
    case Format::Single: return 's';
    case Format::Double: return 'd';
    case Format::QuadDD: return 'q';
  }
  return '?';
}

Format square_format(Format u) {
  switch (u) {
    case Format::Half:
    case Format::BFloat16: return Format::Single;
    case Format::Single: return Format::Double;
    case Format::Double: return Format::QuadDD;
    case Format::QuadDD: break;
  }
  throw std::invalid_argument("no format realizes the square of quad precision");
}

double round_to_double(double x, Format f) noexcept {
  if (f == Format::Double || f == Format::QuadDD) return x;
  if (x == 0.0 || !std::isfinite(x)) return x;
  const PrecisionFormat& d = descriptor(f);
  double quantum = 0.0;
  const double r = round_unbounded(x, d.significand_bits, d.min_exponent, quantum);
  if (std::fabs(r) > d.max_finite) return std::copysign(kInf, x);
  return r;
}

WideScalar round_to(double x, Format f) noexcept { return {round_to_double(x, f), 0.0}; }

WideScalar round_to(const WideScalar& x, Format f) noexcept {
  if (f == Format::QuadDD) {
    if (!std::isfinite(x.hi)) return {x.hi, 0.0};
    return dw::two_sum(x.hi, x.lo);
  }
  const WideScalar t = dw::two_sum(x.hi, x.lo);
  if (f == Format::Double || t.lo == 0.0 || !std::isfinite(t.hi) || t.hi == 0.0) {
    return round_to(t.hi, f);
  }
  // t.hi is the binary64 rounding of the exact value; it only misleads the
  // second rounding when it lands exactly on a midpoint of the target grid.
  const PrecisionFormat& d = descriptor(f);
  double quantum = 0.0;
  double r = round_unbounded(t.hi, d.significand_bits, d.min_exponent, quantum);
  const double offset = t.hi - r;
  if (std::fabs(offset) == 0.5 * quantum && (offset > 0.0) == (t.lo > 0.0)) {
    r += 2.0 * offset;
  }
  if (std::fabs(r) > d.max_finite) return {std::copysign(kInf, t.hi), 0.0};
  return {r, 0.0};
}

WideScalar sim_op(Op op, const WideScalar& a, const WideScalar& b, Format f) noexcept {
  if (f == Format::QuadDD) {
    switch (op) {
      case Op::Add: return dw::add(a, b);
      case Op::Sub: return dw::sub(a, b);
      case Op::Mul: return dw::mul(a, b);
      case Op::Div: return dw::div(a, b);
      case Op::Sqrt: return dw::sqrt(a);
    }
  }
  // Binary64 is at least 2p+2 bits wide for every other format, so rounding
  // the binary64 result once more is a correctly rounded operation.
  double r = 0.0;
  switch (op) {
    case Op::Add: r = a.hi + b.hi; break;
    case Op::Sub: r = a.hi - b.hi; break;
    case Op::Mul: r = a.hi * b.hi; break;
    case Op::Div: r = a.hi / b.hi; break;
    case Op::Sqrt: r = std::sqrt(a.hi); break;
  }
  return {round_to_double(r, f), 0.0};
}

}  // namespace tsir
