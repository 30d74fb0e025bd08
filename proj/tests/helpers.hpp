#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <vector>

#include "tsir/dense.hpp"
#include "tsir/double_word.hpp"
#include "tsir/matgen.hpp"

namespace testing_util {

inline tsir::DenseMatrix gaussian_matrix(std::size_t n, tsir::Rng& rng, double diag_shift = 0.0) {
  tsir::DenseMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a.set(i, j, rng.normal() + (i == j ? diag_shift : 0.0));
  return a;
}

inline tsir::DenseVector gaussian_vector(std::size_t n, tsir::Rng& rng) {
  tsir::DenseVector v(n);
  for (std::size_t i = 0; i < n; ++i) v.set(i, rng.normal());
  return v;
}

inline double rel_diff(const tsir::DenseVector& x, const tsir::DenseVector& y) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num = std::fmax(num, std::fabs(x[i].hi - y[i].hi));
    den = std::fmax(den, std::fabs(y[i].hi));
  }
  return num / den;
}

// max_k ||A^T A v_k - sigma_k^2 v_k||_inf / ||A||_inf^2 in QuadDD, where
// v_k are the right singular vectors used to build A.
inline double sigma_fidelity(const tsir::RandSvdFactors& f) {
  using tsir::WideScalar;
  const std::size_t n = f.a.rows();
  const double an = tsir::inf_norm_mat(f.a);
  double worst = 0.0;
  std::vector<WideScalar> av(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      WideScalar s;
      for (std::size_t j = 0; j < n; ++j) s = tsir::dw::add(s, tsir::dw::mul(f.a(i, j), f.v(j, k)));
      av[i] = s;
    }
    const WideScalar s2 = tsir::dw::two_prod(f.sigma[k], f.sigma[k]);
    for (std::size_t j = 0; j < n; ++j) {
      WideScalar s;
      for (std::size_t i = 0; i < n; ++i) s = tsir::dw::add(s, tsir::dw::mul(av[i], f.a(i, j)));
      s = tsir::dw::sub(s, tsir::dw::mul(s2, f.v(j, k)));
      worst = std::max(worst, std::fabs(s.hi));
    }
  }
  return worst / (an * an);
}

// Largest singular value by power iteration on M^T M in QuadDD.
inline double sigma_max_power(const tsir::DenseMatrix& m, int iters) {
  using tsir::WideScalar;
  const std::size_t n = m.rows();
  tsir::Rng rng(12345);
  std::vector<WideScalar> x(n), y(n);
  for (auto& e : x) e = rng.normal();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    WideScalar nx;
    for (const auto& e : x) nx = tsir::dw::add(nx, tsir::dw::mul(e, e));
    const WideScalar inv = tsir::dw::div(WideScalar(1.0), tsir::dw::sqrt(nx));
    for (auto& e : x) e = tsir::dw::mul(e, inv);
    for (std::size_t i = 0; i < n; ++i) {
      WideScalar s;
      for (std::size_t j = 0; j < n; ++j) s = tsir::dw::add(s, tsir::dw::mul(m(i, j), x[j]));
      y[i] = s;
    }
    WideScalar ny;
    for (const auto& e : y) ny = tsir::dw::add(ny, tsir::dw::mul(e, e));
    lambda = ny.hi;
    for (std::size_t j = 0; j < n; ++j) {
      WideScalar s;
      for (std::size_t i = 0; i < n; ++i) s = tsir::dw::add(s, tsir::dw::mul(m(i, j), y[i]));
      x[j] = s;
    }
  }
  return std::sqrt(lambda);
}

// sigma_max(A) * sigma_max(A^-1).
inline double kappa2_power(const tsir::DenseMatrix& a, int iters = 600) {
  return sigma_max_power(a, iters) * sigma_max_power(tsir::inverse_quad(a), iters);
}

}  // namespace testing_util
