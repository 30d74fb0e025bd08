#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsir/precision.hpp"

namespace tsir {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tag for constructors that take entries already rounded to the target
// format (used by kernels that produced them in that format).
struct rounded_t {
  explicit rounded_t() = default;
};
inline constexpr rounded_t rounded{};

class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n, Format fmt = Format::Double);
  DenseVector(std::vector<WideScalar> data, Format fmt);
  DenseVector(rounded_t, std::vector<WideScalar> data, Format fmt);

  static DenseVector from(std::span<const double> values, Format fmt = Format::Double);
  static DenseVector from(std::initializer_list<double> values, Format fmt = Format::Double);

  std::size_t size() const noexcept { return data_.size(); }
  Format format() const noexcept { return fmt_; }

  const WideScalar& operator[](std::size_t i) const { return data_[i]; }
  void set(std::size_t i, const WideScalar& value);

  std::span<const WideScalar> values() const noexcept { return data_; }
  std::vector<double> to_doubles() const;

  // Copy rounded into another format.
  DenseVector converted(Format fmt) const;

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<WideScalar> data_;
  Format fmt_ = Format::Double;
};

// Column-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, Format fmt = Format::Double);
  DenseMatrix(rounded_t, std::size_t rows, std::size_t cols, std::vector<WideScalar> data, Format fmt);

  static DenseMatrix identity(std::size_t n, Format fmt = Format::Double);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows,
                               Format fmt = Format::Double);
  static DenseMatrix diagonal(std::span<const double> diag, Format fmt = Format::Double);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  Format format() const noexcept { return fmt_; }

  const WideScalar& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }
  void set(std::size_t i, std::size_t j, const WideScalar& value);

  std::span<const WideScalar> values() const noexcept { return data_; }
  DenseMatrix converted(Format fmt) const;
  DenseMatrix transposed() const;
  std::size_t count_nonzeros() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<WideScalar> data_;
  Format fmt_ = Format::Double;
};

// y = A x with every multiply and add performed in fmt; result tagged fmt.
DenseVector matvec(const DenseMatrix& a, const DenseVector& x, Format fmt);

double inf_norm(const DenseVector& v);
double inf_norm_mat(const DenseMatrix& a);

// x + alpha * d in fmt.
DenseVector axpy_update(const DenseVector& x, const WideScalar& alpha, const DenseVector& d, Format fmt);

// ||A||_inf * ||A^-1||_inf with the inverse formed by a QuadDD LU solve.
// Throws SingularMatrixError on a zero pivot.
double kappa_inf(const DenseMatrix& a);

// Explicit QuadDD inverse (columns of A^-1), used by kappa_inf and tests.
DenseMatrix inverse_quad(const DenseMatrix& a);

}  // namespace tsir
