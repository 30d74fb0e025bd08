#include "tsir/matgen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tsir/double_word.hpp"

namespace tsir {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

RandSvdMode parse_randsvd_mode(int mode) {
  if (mode == 2) return RandSvdMode::OneSmall;
  if (mode == 3) return RandSvdMode::Geometric;
  throw std::invalid_argument("randsvd mode must be 2 or 3, got " + std::to_string(mode));
}

std::vector<double> randsvd_sigma(std::size_t n, double kappa2, RandSvdMode mode) {
  if (n < 2) throw std::invalid_argument("randsvd needs n >= 2");
  if (!(kappa2 >= 1.0) || !std::isfinite(kappa2)) throw std::invalid_argument("randsvd needs finite kappa >= 1");
  std::vector<double> sigma(n, 1.0);
  if (mode == RandSvdMode::OneSmall) {
    sigma[n - 1] = 1.0 / kappa2;
  } else {
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = std::pow(kappa2, -static_cast<double>(i) / denom);
  }
  return sigma;
}

DenseMatrix haar_orthogonal(std::size_t n, Rng& rng) {
  std::vector<double> g(n * n);
  for (auto& x : g) x = rng.normal();
  auto at = [&](std::size_t i, std::size_t j) -> double& { return g[j * n + i]; };

  std::vector<std::vector<double>> reflectors;
  std::vector<double> r_diag(n);
  for (std::size_t k = 0; k < n; ++k) {
    double norm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) norm2 += at(i, k) * at(i, k);
    const double norm = std::sqrt(norm2);
    const double alpha = at(k, k) >= 0.0 ? -norm : norm;
    std::vector<double> v(n - k);
    for (std::size_t i = k; i < n; ++i) v[i - k] = at(i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    r_diag[k] = alpha;
    if (vnorm2 == 0.0) {
      reflectors.emplace_back();
      continue;
    }
    const double inv = 1.0 / std::sqrt(vnorm2);
    for (auto& x : v) x *= inv;
    for (std::size_t j = k + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += v[i - k] * at(i, j);
      for (std::size_t i = k; i < n; ++i) at(i, j) -= 2.0 * s * v[i - k];
    }
    reflectors.push_back(std::move(v));
  }

  // Q = H_0 H_1 ... H_{n-1}, accumulated backwards onto the identity.
  std::vector<double> q(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    const auto& v = reflectors[k];
    if (v.empty()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += v[i - k] * q[j * n + i];
      for (std::size_t i = k; i < n; ++i) q[j * n + i] -= 2.0 * s * v[i - k];
    }
  }
  std::vector<WideScalar> out(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double sign = r_diag[j] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out[j * n + i] = sign * q[j * n + i];
  }
  return DenseMatrix(rounded, n, n, std::move(out), Format::Double);
}

RandSvdFactors randsvd_factors(const RandSvdSpec& spec, Rng& rng) {
  const std::size_t n = spec.n;
  RandSvdFactors f;
  f.sigma = randsvd_sigma(n, spec.kappa2, spec.mode);
  f.u = haar_orthogonal(n, rng);
  f.v = haar_orthogonal(n, rng);
  std::vector<WideScalar> a(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      WideScalar acc;
      for (std::size_t k = 0; k < n; ++k) {
        acc = dw::add(acc, dw::mul(dw::two_prod(f.u(i, k).hi, f.sigma[k]), f.v(j, k).hi));
      }
      a[j * n + i] = WideScalar(acc.hi + acc.lo);
    }
  }
  f.a = DenseMatrix(rounded, n, n, std::move(a), Format::Double);
  return f;
}

DenseMatrix randsvd(const RandSvdSpec& spec, Rng& rng) { return randsvd_factors(spec, rng).a; }

DenseMatrix randsvd(const RandSvdSpec& spec) {
  Rng rng(spec.seed);
  return randsvd(spec, rng);
}

DenseVector rhs_randn(std::size_t n, Rng& rng) {
  std::vector<WideScalar> b(n);
  for (auto& x : b) x = rng.normal();
  return DenseVector(rounded, std::move(b), Format::Double);
}

DenseVector rhs_ones(std::size_t n) { return DenseVector(rounded, std::vector<WideScalar>(n, WideScalar(1.0)), Format::Double); }

LinearSystem randsvd_system(const RandSvdSpec& spec) {
  Rng rng(spec.seed);
  LinearSystem s;
  s.a = randsvd(spec, rng);
  s.b = rhs_randn(spec.n, rng);
  return s;
}

}  // namespace tsir
