#pragma once

#include <vector>

#include "tsir/dense.hpp"
#include "tsir/factor.hpp"

namespace tsir {

struct GmresOutcome {
  DenseVector d;                        // correction, in the working format
  int iters = 0;                        // Arnoldi steps taken
  double relres = 0.0;                  // final Givens estimate of ||M^-1(r - A d)|| / ||M^-1 r||
  bool converged = false;
  std::vector<double> relres_history;   // one entry per iteration
};

// M^-1 v with M = LU from f, evaluated in prod_fmt and rounded to u.
// A failed factorization is treated as M = I.
DenseVector apply_preconditioner(const LUFactors& f, const DenseVector& v, Format prod_fmt, Format u);

// w = U^-1 L^-1 A v with the product and both substitutions in prod_fmt,
// rounded to u. The preconditioned matrix is never formed.
DenseVector apply_precond_op(const LUFactors& f, const DenseMatrix& a, const DenseVector& v, Format prod_fmt,
                             Format u);

// Left-preconditioned GMRES from a zero initial guess. MGS Arnoldi and
// Givens least squares in u; operator applications in prod_fmt. No restarts.
GmresOutcome pgmres(const LUFactors& f, const DenseMatrix& a, const DenseVector& r, double tau, int max_iters,
                    Format prod_fmt, Format u);

}  // namespace tsir
