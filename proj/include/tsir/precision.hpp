#pragma once

#include <cstdint>
#include <string_view>

namespace tsir {

// Simulated floating-point formats. Half, BFloat16 and Single live inside
// binary64 storage and are rounded after every operation; QuadDD is a
// double-word (hi + lo) format standing in for binary128.
enum class Format : std::uint8_t { Half, BFloat16, Single, Double, QuadDD };

struct PrecisionFormat {
  Format name;
  int significand_bits;  // precision p, implicit bit included
  int min_exponent;      // exponent of the smallest positive normal number
  int max_exponent;      // exponent of the largest finite number
  double unit_roundoff;  // 2^-p
  double max_finite;
  std::string_view label;
};

const PrecisionFormat& descriptor(Format f) noexcept;

inline double unit_roundoff(Format f) noexcept { return descriptor(f).unit_roundoff; }
inline double max_finite(Format f) noexcept { return descriptor(f).max_finite; }
inline std::string_view format_name(Format f) noexcept { return descriptor(f).label; }

// Accepts the long names ("half", "single", ...) and the one-letter codes
// used on the command line (h, b, s, d, q). Throws std::invalid_argument.
Format parse_format(std::string_view text);
char format_code(Format f) noexcept;

// Format used to realize "precision u^2" for a working precision u.
// Throws std::invalid_argument when no wider format exists.
Format square_format(Format u);

// Orders formats by unit roundoff: true when a is at least as precise as b.
inline bool at_least_as_precise(Format a, Format b) noexcept {
  return unit_roundoff(a) <= unit_roundoff(b);
}

// Carrier for every simulated precision. For formats other than QuadDD,
// lo is zero and hi is representable in the tagged format. For QuadDD,
// |lo| <= ulp(hi)/2.
struct WideScalar {
  double hi = 0.0;
  double lo = 0.0;

  constexpr WideScalar() = default;
  constexpr WideScalar(double h) : hi(h) {}  // NOLINT(google-explicit-constructor)
  constexpr WideScalar(double h, double l) : hi(h), lo(l) {}

  friend constexpr bool operator==(const WideScalar&, const WideScalar&) = default;
};

// Round-to-nearest-even into the format's grid with gradual underflow and
// overflow to signed infinity. NaN propagates. Returns a double for the
// binary64-backed formats; Double and QuadDD are returned unchanged.
double round_to_double(double x, Format f) noexcept;

WideScalar round_to(double x, Format f) noexcept;
WideScalar round_to(const WideScalar& x, Format f) noexcept;

enum class Op : std::uint8_t { Add, Sub, Mul, Div, Sqrt };

// One arithmetic operation in format f. Operands are assumed representable
// in f. For Sqrt, b is ignored.
WideScalar sim_op(Op op, const WideScalar& a, const WideScalar& b, Format f) noexcept;

}  // namespace tsir
