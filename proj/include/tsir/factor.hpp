#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tsir/dense.hpp"
#include "tsir/precision.hpp"

namespace tsir {

struct FactorOptions {
  bool allow_squeeze = true;  // retry a nonfinite factorization on a squeezed matrix
  double theta = 0.1;         // headroom: largest scaled entry is theta * max_finite
};

// GEPP factors P * (mu R A S) = L U, packed in one matrix. L has an implicit
// unit diagonal. row_scale/col_scale are powers of two; without scaling they
// are all ones and mu is 1.
struct LUFactors {
  std::size_t n = 0;
  Format fmt_f = Format::Double;
  DenseMatrix lu;
  std::vector<int> piv;  // row piv[k] of the (scaled) input is row k of L U
  std::vector<double> row_scale;
  std::vector<double> col_scale;
  double mu = 1.0;
  bool scaled = false;
  bool failed = false;  // both attempts produced Inf/NaN factors

  WideScalar lower(std::size_t i, std::size_t j) const {
    if (i == j) return 1.0;
    return i > j ? lu(i, j) : WideScalar(0.0);
  }
  WideScalar upper(std::size_t i, std::size_t j) const { return i <= j ? lu(i, j) : WideScalar(0.0); }
};

class SqueezeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SqueezeResult {
  std::vector<double> row_scale;
  std::vector<double> col_scale;
  double mu = 1.0;
  DenseMatrix scaled;  // mu * R * A * S rounded to fmt_f
  int sweeps = 0;
};

// Right-looking GEPP with every operation in fmt_f. Pivot is the first
// entry of largest magnitude. Inf/NaN are not rejected.
LUFactors lu_factor(const DenseMatrix& a, Format fmt_f);

bool has_nonfinite(const DenseMatrix& a);
bool has_nonfinite(const DenseVector& v);

// Two-sided power-of-two equilibration (row then column infinity norms,
// at most 10 sweeps, stop once every norm lies in [1/2, 2]) followed by a
// range stretch mu = theta * max_finite(fmt_f) / max|RAS|.
// Throws SqueezeError on a zero row or column or nonfinite input.
SqueezeResult squeeze_scale(const DenseMatrix& a, Format fmt_f, double theta);

// Unscaled factorization first; on Inf/NaN, retry on the squeezed matrix.
// Sets failed when no finite factorization was obtained.
LUFactors factor_with_retry(const DenseMatrix& a, Format fmt_f, const FactorOptions& options = {});

// Solves A x = rhs with the factors, every operation in fmt (which may be
// wider than fmt_f). Applies mu*R before and S after the substitutions.
DenseVector tri_solve(const LUFactors& f, const DenseVector& rhs, Format fmt);

}  // namespace tsir
