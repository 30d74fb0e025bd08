#include "tsir/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsir/arith.hpp"

namespace tsir {
namespace {

double pow2_floor_inverse(double norm) { return std::ldexp(1.0, -std::ilogb(norm)); }

bool within_band(const std::vector<double>& norms) {
  return std::all_of(norms.begin(), norms.end(), [](double v) { return v >= 0.5 && v <= 2.0; });
}

}  // namespace

LUFactors lu_factor(const DenseMatrix& a, Format fmt_f) {
  if (!a.square()) throw std::invalid_argument("lu_factor: matrix must be square");
  const std::size_t n = a.rows();
  LUFactors f;
  f.n = n;
  f.fmt_f = fmt_f;
  f.piv.resize(n);
  std::iota(f.piv.begin(), f.piv.end(), 0);
  f.row_scale.assign(n, 1.0);
  f.col_scale.assign(n, 1.0);

  std::vector<WideScalar> packed(n * n);
  detail::with_arith(fmt_f, [&](auto ar) {
    using Ar = decltype(ar);
    using T = typename Ar::value_type;
    std::vector<T> w(n * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) w[j * n + i] = Ar::load(a(i, j));
    auto at = [&](std::size_t i, std::size_t j) -> T& { return w[j * n + i]; };

    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      T best = Ar::abs(at(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const T cand = Ar::abs(at(i, k));
        if (Ar::less(best, cand)) {
          best = cand;
          p = i;
        }
      }
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
        std::swap(f.piv[k], f.piv[p]);
      }
      const T pivot = at(k, k);
      for (std::size_t i = k + 1; i < n; ++i) at(i, k) = Ar::div(at(i, k), pivot);
      for (std::size_t j = k + 1; j < n; ++j) {
        const T ukj = at(k, j);
        for (std::size_t i = k + 1; i < n; ++i) at(i, j) = Ar::sub(at(i, j), Ar::mul(at(i, k), ukj));
      }
    }
    for (std::size_t idx = 0; idx < n * n; ++idx) packed[idx] = Ar::store(w[idx]);
  });
  f.lu = DenseMatrix(rounded, n, n, std::move(packed), fmt_f);
  return f;
}

bool has_nonfinite(const DenseMatrix& a) {
  return std::any_of(a.values().begin(), a.values().end(),
                     [](const WideScalar& w) { return !std::isfinite(w.hi) || !std::isfinite(w.lo); });
}

bool has_nonfinite(const DenseVector& v) {
  return std::any_of(v.values().begin(), v.values().end(),
                     [](const WideScalar& w) { return !std::isfinite(w.hi) || !std::isfinite(w.lo); });
}

SqueezeResult squeeze_scale(const DenseMatrix& a, Format fmt_f, double theta) {
  if (!a.square()) throw std::invalid_argument("squeeze_scale: matrix must be square");
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("squeeze_scale: theta must lie in (0, 1]");
  if (has_nonfinite(a)) throw SqueezeError("squeeze_scale: matrix has Inf or NaN entries");
  const std::size_t n = a.rows();
  std::vector<double> mag(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) mag[j * n + i] = std::fabs(a(i, j).hi);

  SqueezeResult out;
  out.row_scale.assign(n, 1.0);
  out.col_scale.assign(n, 1.0);
  std::vector<double> rnorm(n), cnorm(n);
  auto row_norms = [&] {
    std::fill(rnorm.begin(), rnorm.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        rnorm[i] = std::max(rnorm[i], out.row_scale[i] * mag[j * n + i] * out.col_scale[j]);
  };
  auto col_norms = [&] {
    for (std::size_t j = 0; j < n; ++j) {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c = std::max(c, out.row_scale[i] * mag[j * n + i] * out.col_scale[j]);
      cnorm[j] = c;
    }
  };

  row_norms();
  col_norms();
  for (std::size_t i = 0; i < n; ++i) {
    if (rnorm[i] == 0.0) throw SqueezeError("squeeze_scale: row " + std::to_string(i) + " is zero");
    if (cnorm[i] == 0.0) throw SqueezeError("squeeze_scale: column " + std::to_string(i) + " is zero");
  }

  constexpr int kMaxSweeps = 10;
  while (out.sweeps < kMaxSweeps && !(within_band(rnorm) && within_band(cnorm))) {
    for (std::size_t i = 0; i < n; ++i) out.row_scale[i] *= pow2_floor_inverse(rnorm[i]);
    col_norms();
    for (std::size_t j = 0; j < n; ++j) out.col_scale[j] *= pow2_floor_inverse(cnorm[j]);
    row_norms();
    col_norms();
    ++out.sweeps;
  }

  const double amax = *std::max_element(rnorm.begin(), rnorm.end());
  out.mu = round_to_double(theta * max_finite(fmt_f) / amax, fmt_f);

  std::vector<WideScalar> scaled(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      // R and S are powers of two, so only the product with mu rounds.
      const double ras = out.row_scale[i] * a(i, j).hi * out.col_scale[j];
      scaled[j * n + i] = round_to(dw::two_prod(out.mu, ras), fmt_f);
    }
  }
  out.scaled = DenseMatrix(rounded, n, n, std::move(scaled), fmt_f);
  return out;
}

LUFactors factor_with_retry(const DenseMatrix& a, Format fmt_f, const FactorOptions& options) {
  LUFactors first = lu_factor(a, fmt_f);
  if (!has_nonfinite(first.lu)) return first;
  if (!options.allow_squeeze) {
    first.failed = true;
    return first;
  }
  SqueezeResult sq;
  try {
    sq = squeeze_scale(a, fmt_f, options.theta);
  } catch (const SqueezeError&) {
    first.failed = true;
    return first;
  }
  LUFactors second = lu_factor(sq.scaled, fmt_f);
  second.row_scale = std::move(sq.row_scale);
  second.col_scale = std::move(sq.col_scale);
  second.mu = sq.mu;
  second.scaled = true;
  second.failed = has_nonfinite(second.lu);
  return second;
}

DenseVector tri_solve(const LUFactors& f, const DenseVector& rhs, Format fmt) {
  const std::size_t n = f.n;
  if (rhs.size() != n) throw std::invalid_argument("tri_solve: dimension mismatch");
  std::vector<WideScalar> out(n);
  detail::with_arith(fmt, [&](auto ar) {
    using Ar = decltype(ar);
    using T = typename Ar::value_type;
    std::vector<T> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = Ar::load(rhs[i]);
    if (f.scaled) {
      const T mu = Ar::load(f.mu);
      for (std::size_t i = 0; i < n; ++i) t[i] = Ar::mul(Ar::mul(t[i], Ar::load(f.row_scale[i])), mu);
    }
    std::vector<T> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = t[static_cast<std::size_t>(f.piv[k])];
    for (std::size_t k = 0; k < n; ++k) {
      const T ck = c[k];
      for (std::size_t i = k + 1; i < n; ++i) c[i] = Ar::sub(c[i], Ar::mul(Ar::load(f.lu(i, k)), ck));
    }
    for (std::size_t k = n; k-- > 0;) {
      c[k] = Ar::div(c[k], Ar::load(f.lu(k, k)));
      const T ck = c[k];
      for (std::size_t i = 0; i < k; ++i) c[i] = Ar::sub(c[i], Ar::mul(Ar::load(f.lu(i, k)), ck));
    }
    if (f.scaled) {
      for (std::size_t j = 0; j < n; ++j) c[j] = Ar::mul(c[j], Ar::load(f.col_scale[j]));
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = Ar::store(c[i]);
  });
  return DenseVector(rounded, std::move(out), fmt);
}

}  // namespace tsir
