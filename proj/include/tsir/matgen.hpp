#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tsir/dense.hpp"

namespace tsir {

// mt19937_64 with hand-written uniform and normal transforms so that streams
// are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal by the Box-Muller transform; the second variate is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class RandSvdMode { OneSmall = 2, Geometric = 3 };

RandSvdMode parse_randsvd_mode(int mode);

struct RandSvdSpec {
  std::size_t n = 100;
  double kappa2 = 10.0;
  RandSvdMode mode = RandSvdMode::OneSmall;
  std::uint64_t seed = 1;
};

// Prescribed singular values, largest first: mode 2 is (1, ..., 1, 1/kappa),
// mode 3 is kappa^(-(i-1)/(n-1)).
std::vector<double> randsvd_sigma(std::size_t n, double kappa2, RandSvdMode mode);

// Q from the Householder QR of an n x n Gaussian matrix, with column k
// multiplied by sign(R_kk). Computed in Double.
DenseMatrix haar_orthogonal(std::size_t n, Rng& rng);

struct RandSvdFactors {
  DenseMatrix u;
  DenseMatrix v;
  std::vector<double> sigma;
  DenseMatrix a;  // U diag(sigma) V^T accumulated in QuadDD, rounded to Double
};

// Throws std::invalid_argument unless n >= 2 and kappa2 >= 1.
RandSvdFactors randsvd_factors(const RandSvdSpec& spec, Rng& rng);
DenseMatrix randsvd(const RandSvdSpec& spec, Rng& rng);
DenseMatrix randsvd(const RandSvdSpec& spec);

DenseVector rhs_randn(std::size_t n, Rng& rng);
DenseVector rhs_ones(std::size_t n);

// A from randsvd followed by b from rhs_randn, both drawn from one stream
// seeded with spec.seed.
struct LinearSystem {
  DenseMatrix a;
  DenseVector b;
};
LinearSystem randsvd_system(const RandSvdSpec& spec);

class MatrixMarketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Square real/integer matrices in coordinate or array layout; general,
// symmetric or skew-symmetric. Duplicates are summed. Errors name the line.
DenseMatrix parse_matrix_market(std::string_view text);
DenseMatrix read_matrix_market(const std::filesystem::path& path);

}  // namespace tsir
