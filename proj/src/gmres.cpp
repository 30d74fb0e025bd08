#include "tsir/gmres.hpp"

#include <cmath>
#include <limits>

#include "tsir/arith.hpp"

namespace tsir {

DenseVector apply_preconditioner(const LUFactors& f, const DenseVector& v, Format prod_fmt, Format u) {
  if (f.failed) return v.converted(u);
  return tri_solve(f, v.converted(prod_fmt), prod_fmt).converted(u);
}

DenseVector apply_precond_op(const LUFactors& f, const DenseMatrix& a, const DenseVector& v, Format prod_fmt,
                             Format u) {
  const DenseVector av = matvec(a, v, prod_fmt);
  if (f.failed) return av.converted(u);
  return tri_solve(f, av, prod_fmt).converted(u);
}

GmresOutcome pgmres(const LUFactors& f, const DenseMatrix& a, const DenseVector& r, double tau, int max_iters,
                    Format prod_fmt, Format u) {
  const std::size_t n = r.size();
  GmresOutcome out;
  detail::with_arith(u, [&](auto ar) {
    using Ar = decltype(ar);
    using T = typename Ar::value_type;
    using Vec = std::vector<T>;

    auto load = [](const DenseVector& v) {
      Vec x(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) x[i] = Ar::load(v[i]);
      return x;
    };
    auto store = [&](const Vec& x) {
      std::vector<WideScalar> w(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) w[i] = Ar::store(x[i]);
      return DenseVector(rounded, std::move(w), u);
    };
    auto dot = [](const Vec& x, const Vec& y) {
      T s = Ar::load(0.0);
      for (std::size_t i = 0; i < x.size(); ++i) s = Ar::add(s, Ar::mul(x[i], y[i]));
      return s;
    };
    auto nrm2 = [&](const Vec& x) { return Ar::sqrt(dot(x, x)); };
    const T zero = Ar::load(0.0);

    Vec s = load(apply_preconditioner(f, r, prod_fmt, u));
    const T beta = nrm2(s);
    if (!Ar::finite(beta)) {
      out.d = store(s);
      out.relres = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    if (Ar::is_zero(beta)) {
      out.d = store(Vec(n, zero));
      out.converged = true;
      return;
    }

    const std::size_t m = static_cast<std::size_t>(std::max(0, max_iters));
    std::vector<Vec> basis;
    basis.reserve(m + 1);
    Vec v0(n);
    for (std::size_t i = 0; i < n; ++i) v0[i] = Ar::div(s[i], beta);
    basis.push_back(std::move(v0));

    std::vector<Vec> h;  // h[j] holds column j of the (rotated) Hessenberg matrix
    Vec cs, sn;
    Vec g{beta};
    const double beta_d = Ar::to_double(beta);

    std::size_t k = 0;
    while (k < m) {
      const DenseVector vk = store(basis[k]);
      Vec w = load(apply_precond_op(f, a, vk, prod_fmt, u));
      Vec col(k + 2, zero);
      for (std::size_t i = 0; i <= k; ++i) {
        col[i] = dot(basis[i], w);
        for (std::size_t l = 0; l < n; ++l) w[l] = Ar::sub(w[l], Ar::mul(col[i], basis[i][l]));
      }
      col[k + 1] = nrm2(w);
      const T h_next = col[k + 1];

      for (std::size_t i = 0; i < k; ++i) {
        const T t = Ar::add(Ar::mul(cs[i], col[i]), Ar::mul(sn[i], col[i + 1]));
        col[i + 1] = Ar::sub(Ar::mul(cs[i], col[i + 1]), Ar::mul(sn[i], col[i]));
        col[i] = t;
      }
      const T rho = Ar::sqrt(Ar::add(Ar::mul(col[k], col[k]), Ar::mul(col[k + 1], col[k + 1])));
      T c = Ar::load(1.0);
      T sgn = zero;
      if (!Ar::is_zero(rho)) {
        c = Ar::div(col[k], rho);
        sgn = Ar::div(col[k + 1], rho);
      }
      cs.push_back(c);
      sn.push_back(sgn);
      col[k] = rho;
      col[k + 1] = zero;
      g.push_back(Ar::neg(Ar::mul(sgn, g[k])));
      g[k] = Ar::mul(c, g[k]);
      h.push_back(std::move(col));
      ++k;

      const double relres = std::fabs(Ar::to_double(g[k])) / beta_d;
      out.relres_history.push_back(relres);
      out.relres = relres;
      if (!(relres > tau) || Ar::is_zero(h_next) || !Ar::finite(h_next)) break;
      Vec next(n);
      for (std::size_t i = 0; i < n; ++i) next[i] = Ar::div(w[i], h_next);
      basis.push_back(std::move(next));
    }
    out.iters = static_cast<int>(k);

    Vec y(k, zero);
    for (std::size_t i = k; i-- > 0;) {
      T acc = g[i];
      for (std::size_t l = i + 1; l < k; ++l) acc = Ar::sub(acc, Ar::mul(h[l][i], y[l]));
      y[i] = Ar::div(acc, h[i][i]);
    }
    Vec d(n, zero);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < n; ++l) d[l] = Ar::add(d[l], Ar::mul(y[i], basis[i][l]));
    out.d = store(d);
    out.converged = out.relres <= tau;
  });
  return out;
}

}  // namespace tsir
