#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "tsir/dense.hpp"
#include "tsir/double_word.hpp"

using namespace tsir;

TEST_CASE("constructors round entries into the storage format") {
  const DenseVector v = DenseVector::from({0.1, 1.0 + std::ldexp(1.0, -12)}, Format::Half);
  CHECK(v.format() == Format::Half);
  CHECK(v[1].hi == 1.0);
  for (const auto& e : v.values()) CHECK(round_to(e, Format::Half) == e);

  const DenseMatrix m = DenseMatrix::from_rows({{0.1, 0.2}, {0.3, 70000.0}}, Format::Half);
  CHECK(m.rows() == 2);
  CHECK(m(1, 1).hi == INFINITY);
  CHECK(m(0, 1).hi == round_to_double(0.2, Format::Half));
  DenseMatrix w(2, 2, Format::Single);
  w.set(0, 0, 0.1);
  CHECK(w(0, 0).hi == static_cast<double>(0.1f));
}

TEST_CASE("conversion and transposition") {
  const DenseMatrix m = DenseMatrix::from_rows({{1.0, 2.0, 0.0}, {0.1, 5.0, 6.0}, {0.0, 0.0, 9.0}});
  CHECK(m.transposed()(0, 1) == m(1, 0));
  CHECK(m.transposed().transposed() == m);
  CHECK(m.count_nonzeros() == 6);
  const DenseMatrix h = m.converted(Format::Half);
  CHECK(h.format() == Format::Half);
  CHECK(h(1, 0).hi == round_to_double(0.1, Format::Half));
  CHECK(DenseMatrix::identity(3).count_nonzeros() == 3);
}

TEST_CASE("matvec on small integer matrices is exact in Double") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 12);
    DenseMatrix a(n, n);
    DenseVector x(n);
    for (std::size_t i = 0; i < n; ++i) {
      x.set(i, std::floor(rng.uniform() * 200) - 100);
      for (std::size_t j = 0; j < n; ++j) a.set(i, j, std::floor(rng.uniform() * 200) - 100);
    }
    const DenseVector y = matvec(a, x, Format::Double);
    for (std::size_t i = 0; i < n; ++i) {
      long long s = 0;
      for (std::size_t j = 0; j < n; ++j) s += static_cast<long long>(a(i, j).hi) * static_cast<long long>(x[j].hi);
      REQUIRE(y[i].hi == static_cast<double>(s));
    }
  }
}

TEST_CASE("matvec rounds every operation in the requested format") {
  // 1 + 2^-11 + 2^-11: each partial sum rounds back to 1 in Half.
  const DenseMatrix sq = DenseMatrix::from_rows({{1.0, 1.0, 1.0}, {0, 0, 0}, {0, 0, 0}});
  const DenseVector x = DenseVector::from({1.0, std::ldexp(1.0, -11), std::ldexp(1.0, -11)});
  CHECK(matvec(sq, x, Format::Half)[0].hi == 1.0);
  CHECK(matvec(sq, x, Format::Double)[0].hi == 1.0 + std::ldexp(1.0, -10));
  const DenseVector tiny = DenseVector::from({1.0, std::ldexp(1.0, -70), 0.0});
  const DenseVector q = matvec(sq, tiny, Format::QuadDD);
  CHECK(q[0].hi == 1.0);
  CHECK(q[0].lo == std::ldexp(1.0, -70));
  CHECK(q.format() == Format::QuadDD);
}

TEST_CASE("inf_norm obeys the triangle inequality") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const DenseVector u = testing_util::gaussian_vector(17, rng);
    const DenseVector v = testing_util::gaussian_vector(17, rng);
    const DenseVector s = axpy_update(u, 1.0, v, Format::Double);
    REQUIRE(inf_norm(s) <= inf_norm(u) + inf_norm(v));
  }
  CHECK(inf_norm(DenseVector::from({1.0, -3.0, 2.0})) == 3.0);
  CHECK(inf_norm_mat(DenseMatrix::from_rows({{1, -2}, {3, 4}})) == 7.0);
  CHECK(std::isnan(inf_norm(DenseVector::from({1.0, NAN}))));
}

TEST_CASE("axpy_update keeps the full scale factor") {
  const DenseVector x = DenseVector::from({1.0, 2.0});
  const DenseVector d = DenseVector::from({1.0, 1.0});
  const DenseVector y = axpy_update(x, WideScalar(0.5, std::ldexp(1.0, -60)), d, Format::QuadDD);
  CHECK(y[0].hi == 1.5);
  CHECK(y[0].lo == std::ldexp(1.0, -60));
  const DenseVector h = axpy_update(x.converted(Format::Half), std::ldexp(1.0, -12), d.converted(Format::Half),
                                    Format::Half);
  CHECK(h[0].hi == 1.0);
}

TEST_CASE("kappa_inf examples") {
  CHECK(kappa_inf(DenseMatrix::identity(5)) == 1.0);
  const double d[] = {1.0, 1e-5};
  CHECK(kappa_inf(DenseMatrix::diagonal(d)) == doctest::Approx(1e5).epsilon(1e-14));
  CHECK(kappa_inf(DenseMatrix::from_rows({{1, 2}, {3, 4}})) == doctest::Approx(21.0).epsilon(1e-14));
  CHECK_THROWS_AS(kappa_inf(DenseMatrix::from_rows({{1, 2}, {2, 4}})), SingularMatrixError);
}

TEST_CASE("kappa_inf is invariant under positive scaling") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix a = testing_util::gaussian_matrix(12, rng);
    const double alpha = std::ldexp(1.0 + rng.uniform(), static_cast<int>(rng.uniform() * 40) - 20);
    DenseMatrix scaled(12, 12);
    for (std::size_t j = 0; j < 12; ++j)
      for (std::size_t i = 0; i < 12; ++i) scaled.set(i, j, a(i, j).hi * alpha);
    REQUIRE(kappa_inf(scaled) == doctest::Approx(kappa_inf(a)).epsilon(1e-8));
  }
}

TEST_CASE("inverse_quad times A is the identity") {
  Rng rng(2);
  const DenseMatrix a = testing_util::gaussian_matrix(10, rng);
  const DenseMatrix inv = inverse_quad(a);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      WideScalar s = 0.0;
      for (std::size_t k = 0; k < 10; ++k) s = dw::add(s, dw::mul(a(i, k), inv(k, j)));
      REQUIRE(std::fabs(s.hi - (i == j ? 1.0 : 0.0)) <= 1e-25);
    }
}
