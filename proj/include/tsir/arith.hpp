#pragma once

// Compile-time arithmetic policies used by the dense kernels. Public entry
// points take a runtime Format and call with_arith() once per kernel, so
// the inner loops run without per-operation dispatch.

#include <cmath>
#include <utility>

#include "tsir/double_word.hpp"
#include "tsir/precision.hpp"

namespace tsir::detail {

template <Format F>
struct RoundedArith {
  using value_type = double;
  static constexpr Format format = F;

  static double load(const WideScalar& w) noexcept {
    return w.lo == 0.0 ? round_to_double(w.hi, F) : round_to(w, F).hi;
  }
  static double load(double v) noexcept { return round_to_double(v, F); }
  static WideScalar store(double v) noexcept { return {v, 0.0}; }
  static double to_double(double v) noexcept { return v; }

  static double add(double a, double b) noexcept { return round_to_double(a + b, F); }
  static double sub(double a, double b) noexcept { return round_to_double(a - b, F); }
  static double mul(double a, double b) noexcept { return round_to_double(a * b, F); }
  static double div(double a, double b) noexcept { return round_to_double(a / b, F); }
  static double sqrt(double a) noexcept { return round_to_double(std::sqrt(a), F); }
  static double abs(double a) noexcept { return std::fabs(a); }
  static double neg(double a) noexcept { return -a; }
  static bool finite(double a) noexcept { return std::isfinite(a); }
  static bool less(double a, double b) noexcept { return a < b; }
  static bool is_zero(double a) noexcept { return a == 0.0; }
};

struct DoubleArith {
  using value_type = double;
  static constexpr Format format = Format::Double;

  static double load(const WideScalar& w) noexcept { return w.lo == 0.0 ? w.hi : w.hi + w.lo; }
  static double load(double v) noexcept { return v; }
  static WideScalar store(double v) noexcept { return {v, 0.0}; }
  static double to_double(double v) noexcept { return v; }

  static double add(double a, double b) noexcept { return a + b; }
  static double sub(double a, double b) noexcept { return a - b; }
  static double mul(double a, double b) noexcept { return a * b; }
  static double div(double a, double b) noexcept { return a / b; }
  static double sqrt(double a) noexcept { return std::sqrt(a); }
  static double abs(double a) noexcept { return std::fabs(a); }
  static double neg(double a) noexcept { return -a; }
  static bool finite(double a) noexcept { return std::isfinite(a); }
  static bool less(double a, double b) noexcept { return a < b; }
  static bool is_zero(double a) noexcept { return a == 0.0; }
};

struct DoubleWordArith {
  using value_type = WideScalar;
  static constexpr Format format = Format::QuadDD;

  static WideScalar load(const WideScalar& w) noexcept { return w; }
  static WideScalar load(double v) noexcept { return {v, 0.0}; }
  static WideScalar store(const WideScalar& v) noexcept { return v; }
  static double to_double(const WideScalar& v) noexcept { return v.hi; }

  static WideScalar add(const WideScalar& a, const WideScalar& b) noexcept { return dw::add(a, b); }
  static WideScalar sub(const WideScalar& a, const WideScalar& b) noexcept { return dw::sub(a, b); }
  static WideScalar mul(const WideScalar& a, const WideScalar& b) noexcept {
    if (a.lo == 0.0) return dw::mul(b, a.hi);
    if (b.lo == 0.0) return dw::mul(a, b.hi);
    return dw::mul(a, b);
  }
  static WideScalar div(const WideScalar& a, const WideScalar& b) noexcept { return dw::div(a, b); }
  static WideScalar sqrt(const WideScalar& a) noexcept { return dw::sqrt(a); }
  static WideScalar abs(const WideScalar& a) noexcept { return dw::abs(a); }
  static WideScalar neg(const WideScalar& a) noexcept { return dw::neg(a); }
  static bool finite(const WideScalar& a) noexcept { return std::isfinite(a.hi) && std::isfinite(a.lo); }
  static bool less(const WideScalar& a, const WideScalar& b) noexcept { return dw::less(a, b); }
  static bool is_zero(const WideScalar& a) noexcept { return a.hi == 0.0; }
};

template <class Fn>
decltype(auto) with_arith(Format f, Fn&& fn) {
  switch (f) {
    case Format::Half: return std::forward<Fn>(fn)(RoundedArith<Format::Half>{});
    case Format::BFloat16: return std::forward<Fn>(fn)(RoundedArith<Format::BFloat16>{});
    case Format::Single: return std::forward<Fn>(fn)(RoundedArith<Format::Single>{});
    case Format::Double: return std::forward<Fn>(fn)(DoubleArith{});
    case Format::QuadDD: break;
  }
  return std::forward<Fn>(fn)(DoubleWordArith{});
}

}  // namespace tsir::detail
