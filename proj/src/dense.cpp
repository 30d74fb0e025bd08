#include "tsir/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tsir/arith.hpp"
#include "tsir/factor.hpp"

namespace tsir {
namespace {

std::vector<WideScalar> rounded_copy(std::vector<WideScalar> data, Format fmt) {
  for (auto& w : data) w = round_to(w, fmt);
  return data;
}

double abs_max(std::span<const WideScalar> values) {
  double m = 0.0;
  for (const auto& w : values) {
    const double a = std::fabs(w.hi);
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------- vector

DenseVector::DenseVector(std::size_t n, Format fmt) : data_(n), fmt_(fmt) {}

DenseVector::DenseVector(std::vector<WideScalar> data, Format fmt)
    : data_(rounded_copy(std::move(data), fmt)), fmt_(fmt) {}

DenseVector::DenseVector(rounded_t, std::vector<WideScalar> data, Format fmt)
    : data_(std::move(data)), fmt_(fmt) {}

DenseVector DenseVector::from(std::span<const double> values, Format fmt) {
  return DenseVector(std::vector<WideScalar>(values.begin(), values.end()), fmt);
}

DenseVector DenseVector::from(std::initializer_list<double> values, Format fmt) {
  return from(std::span<const double>(values.begin(), values.size()), fmt);
}

void DenseVector::set(std::size_t i, const WideScalar& value) { data_.at(i) = round_to(value, fmt_); }

std::vector<double> DenseVector::to_doubles() const {
  std::vector<double> out(data_.size());
  std::transform(data_.begin(), data_.end(), out.begin(), [](const WideScalar& w) { return w.hi; });
  return out;
}

DenseVector DenseVector::converted(Format fmt) const { return DenseVector(data_, fmt); }

// ---------------------------------------------------------------- matrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Format fmt)
    : rows_(rows), cols_(cols), data_(rows * cols), fmt_(fmt) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("DenseMatrix dimensions must be positive");
}

DenseMatrix::DenseMatrix(rounded_t, std::size_t rows, std::size_t cols, std::vector<WideScalar> data,
                         Format fmt)
    : rows_(rows), cols_(cols), data_(std::move(data)), fmt_(fmt) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("DenseMatrix dimensions must be positive");
  if (data_.size() != rows * cols) throw std::invalid_argument("DenseMatrix data size mismatch");
}

DenseMatrix DenseMatrix::identity(std::size_t n, Format fmt) {
  DenseMatrix m(n, n, fmt);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = WideScalar(1.0);
  return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows, Format fmt) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  DenseMatrix m(r, c, fmt);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("ragged row list");
    std::size_t j = 0;
    for (double v : row) m.set(i, j++, v);
    ++i;
  }
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag, Format fmt) {
  DenseMatrix m(diag.size(), diag.size(), fmt);
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
  return m;
}

void DenseMatrix::set(std::size_t i, std::size_t j, const WideScalar& value) {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("DenseMatrix index");
  data_[j * rows_ + i] = round_to(value, fmt_);
}

DenseMatrix DenseMatrix::converted(Format fmt) const {
  return DenseMatrix(rounded, rows_, cols_, rounded_copy(data_, fmt), fmt);
}

DenseMatrix DenseMatrix::transposed() const {
  std::vector<WideScalar> t(data_.size());
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t[i * cols_ + j] = data_[j * rows_ + i];
  return DenseMatrix(rounded, cols_, rows_, std::move(t), fmt_);
}

std::size_t DenseMatrix::count_nonzeros() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](const WideScalar& w) { return w.hi != 0.0; }));
}

// ---------------------------------------------------------------- kernels

DenseVector matvec(const DenseMatrix& a, const DenseVector& x, Format fmt) {
  if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<WideScalar> y(m);
  detail::with_arith(fmt, [&](auto ar) {
    using Ar = decltype(ar);
    using T = typename Ar::value_type;
    std::vector<T> acc(m, Ar::load(0.0));
    // Column sweep; each y_i still accumulates sum_j a_ij x_j in order j = 0..n-1.
    for (std::size_t j = 0; j < n; ++j) {
      const T xj = Ar::load(x[j]);
      for (std::size_t i = 0; i < m; ++i) {
        acc[i] = Ar::add(acc[i], Ar::mul(Ar::load(a(i, j)), xj));
      }
    }
    for (std::size_t i = 0; i < m; ++i) y[i] = Ar::store(acc[i]);
  });
  return DenseVector(rounded, std::move(y), fmt);
}

double inf_norm(const DenseVector& v) { return abs_max(v.values()); }

double inf_norm_mat(const DenseMatrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    WideScalar row;
    for (std::size_t j = 0; j < a.cols(); ++j) row = row + dw::abs(a(i, j));
    if (std::isnan(row.hi)) return row.hi;
    best = std::max(best, row.hi);
  }
  return best;
}

DenseVector axpy_update(const DenseVector& x, const WideScalar& alpha, const DenseVector& d, Format fmt) {
  if (x.size() != d.size()) throw std::invalid_argument("axpy_update: dimension mismatch");
  std::vector<WideScalar> out(x.size());
  detail::with_arith(fmt, [&](auto ar) {
    using Ar = decltype(ar);
    const auto a = Ar::load(alpha);
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = Ar::store(Ar::add(Ar::load(x[i]), Ar::mul(a, Ar::load(d[i]))));
    }
  });
  return DenseVector(rounded, std::move(out), fmt);
}

DenseMatrix inverse_quad(const DenseMatrix& a) {
  if (!a.square()) throw std::invalid_argument("inverse_quad: matrix must be square");
  const std::size_t n = a.rows();
  const LUFactors f = lu_factor(a, Format::QuadDD);
  for (std::size_t k = 0; k < n; ++k) {
    if (f.upper(k, k).hi == 0.0) {
      throw SingularMatrixError("zero pivot at step " + std::to_string(k) + " of the quad LU factorization");
    }
  }
  std::vector<WideScalar> inv(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    DenseVector e(n, Format::QuadDD);
    e.set(j, 1.0);
    const DenseVector col = tri_solve(f, e, Format::QuadDD);
    std::copy(col.values().begin(), col.values().end(), inv.begin() + static_cast<std::ptrdiff_t>(j * n));
  }
  return DenseMatrix(rounded, n, n, std::move(inv), Format::QuadDD);
}

double kappa_inf(const DenseMatrix& a) { return inf_norm_mat(a) * inf_norm_mat(inverse_quad(a)); }

}  // namespace tsir
