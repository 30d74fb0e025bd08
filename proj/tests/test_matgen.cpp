#include <cmath>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "tsir/double_word.hpp"
#include "tsir/matgen.hpp"

using namespace tsir;

TEST_CASE("Rng streams are fixed") {
  Rng a(1), b(1), c(2);
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  CHECK(x >= 0.0);
  CHECK(x < 1.0);
  // First mt19937_64 output for seed 1, shifted to 53 bits.
  std::mt19937_64 ref(1);
  CHECK(x == static_cast<double>(ref() >> 11) * 0x1.0p-53);
}

TEST_CASE("normal variates have the right moments") {
  Rng rng(3);
  const int count = 200000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < count; ++k) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::fabs(s / count) < 0.01);
  CHECK(std::fabs(s2 / count - 1.0) < 0.01);
}

TEST_CASE("singular value laws") {
  const auto s2 = randsvd_sigma(5, 1e4, RandSvdMode::OneSmall);
  CHECK(s2 == std::vector<double>{1, 1, 1, 1, 1e-4});
  const auto s3 = randsvd_sigma(5, 1e4, RandSvdMode::Geometric);
  CHECK(s3.front() == 1.0);
  CHECK(s3.back() == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(s3[2] == doctest::Approx(1e-2).epsilon(1e-15));
  CHECK_THROWS_AS(randsvd_sigma(1, 10, RandSvdMode::OneSmall), std::invalid_argument);
  CHECK_THROWS_AS(randsvd_sigma(4, 0.5, RandSvdMode::OneSmall), std::invalid_argument);
  CHECK_THROWS_AS(parse_randsvd_mode(1), std::invalid_argument);
  CHECK(parse_randsvd_mode(3) == RandSvdMode::Geometric);
}

TEST_CASE("Haar factors are orthogonal with random orientation") {
  Rng rng(5);
  int negative = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const DenseMatrix q = haar_orthogonal(12, rng);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j) {
        WideScalar s;
        for (std::size_t k = 0; k < 12; ++k) s = dw::add(s, dw::mul(q(k, i), q(k, j)));
        REQUIRE(std::fabs(s.hi - (i == j ? 1.0 : 0.0)) <= 1e-14);
      }
    // Sign of the determinant through Gaussian elimination.
    std::vector<double> m(q.values().size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = q.values()[k].hi;
    double sign = 1.0;
    for (std::size_t k = 0; k < 12; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < 12; ++i)
        if (std::fabs(m[k * 12 + i]) > std::fabs(m[k * 12 + p])) p = i;
      if (p != k) {
        sign = -sign;
        for (std::size_t j = 0; j < 12; ++j) std::swap(m[j * 12 + k], m[j * 12 + p]);
      }
      if (m[k * 12 + k] < 0) sign = -sign;
      for (std::size_t i = k + 1; i < 12; ++i) {
        const double l = m[k * 12 + i] / m[k * 12 + k];
        for (std::size_t j = k; j < 12; ++j) m[j * 12 + i] -= l * m[j * 12 + k];
      }
    }
    if (sign < 0) ++negative;
  }
  CHECK(negative > 5);
  CHECK(negative < 35);
}

TEST_CASE("randsvd singular values are reproduced") {
  for (auto mode : {RandSvdMode::OneSmall, RandSvdMode::Geometric}) {
    for (double kappa : {1e1, 1e7, 1e14}) {
      Rng rng(7);
      const RandSvdFactors f = randsvd_factors(RandSvdSpec{.n = 40, .kappa2 = kappa, .mode = mode}, rng);
      CHECK(testing_util::sigma_fidelity(f) <= 1e-10);
    }
  }
}

TEST_CASE("randsvd hits the requested 2-norm condition number") {
  for (auto mode : {RandSvdMode::OneSmall, RandSvdMode::Geometric}) {
    for (double kappa : {1e2, 1e9}) {
      const DenseMatrix a = randsvd(RandSvdSpec{.n = 30, .kappa2 = kappa, .mode = mode, .seed = 2});
      CHECK(testing_util::kappa2_power(a) == doctest::Approx(kappa).epsilon(0.01));
    }
  }
}

TEST_CASE("randsvd is deterministic in the seed") {
  const RandSvdSpec s{.n = 20, .kappa2 = 1e5, .mode = RandSvdMode::OneSmall, .seed = 9};
  CHECK(randsvd(s) == randsvd(s));
  RandSvdSpec t = s;
  t.seed = 10;
  CHECK_FALSE(randsvd(s) == randsvd(t));
  const LinearSystem a = randsvd_system(s), b = randsvd_system(s);
  CHECK(a.a == b.a);
  CHECK(a.b == b.b);
  CHECK(a.a == randsvd(s));
  CHECK(rhs_ones(3).to_doubles() == std::vector<double>{1, 1, 1});
}

TEST_CASE("Matrix Market coordinate and array input") {
  const DenseMatrix d = parse_matrix_market(
      "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 2.0\n");
  CHECK(d == DenseMatrix::from_rows({{1, 0}, {0, 2}}));

  const DenseMatrix s = parse_matrix_market(
      "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 4\n3 1 -1\n2 2 5\n");
  CHECK(s(0, 2).hi == -1.0);
  CHECK(s(2, 0).hi == -1.0);

  const DenseMatrix k = parse_matrix_market("%%MatrixMarket matrix coordinate integer skew-symmetric\n2 2 1\n2 1 3\n");
  CHECK(k(1, 0).hi == 3.0);
  CHECK(k(0, 1).hi == -3.0);

  const DenseMatrix dup = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 0.5\n1 1 0.25\n");
  CHECK(dup(0, 0).hi == 0.75);

  const DenseMatrix arr = parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  CHECK(arr == DenseMatrix::from_rows({{1, 3}, {2, 4}}));
}

TEST_CASE("Matrix Market errors name the line") {
  auto message = [](const char* text) -> std::string {
    try {
      parse_matrix_market(text);
    } catch (const MatrixMarketError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("hello\n").find("line 1") != std::string::npos);
  CHECK(message("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n").find("line 1") !=
        std::string::npos);
  CHECK(message("%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1\n").find("square") !=
        std::string::npos);
  CHECK(message("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n").find("line 3") !=
        std::string::npos);
  CHECK(message("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n").find("line") != std::string::npos);
  CHECK(message("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n").find("line 3") !=
        std::string::npos);
  CHECK(message("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 abc\n").find("line 3") !=
        std::string::npos);
  CHECK_THROWS_AS(read_matrix_market("/nonexistent/file.mtx"), MatrixMarketError);
}

TEST_CASE("reading from a file") {
  const auto path = std::filesystem::temp_directory_path() / "tsir_test_diag.mtx";
  {
    std::ofstream out(path);
    out << "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 2.0\n";
  }
  CHECK(read_matrix_market(path) == DenseMatrix::from_rows({{1, 0}, {0, 2}}));
  std::filesystem::remove(path);
}
