#include "tsir/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tsir/arith.hpp"
#include "tsir/gmres.hpp"
#include "tsir/trace.hpp"

namespace tsir {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

Stage stage_of(Variant v) {
  switch (v) {
    case Variant::SIR: return Stage::SIR;
    case Variant::SGMRES: return Stage::SGMRESIR;
    case Variant::GMRES: return Stage::GMRESIR;
    case Variant::TSIR: break;
  }
  throw std::invalid_argument("TSIR is not a single stage");
}

void enter_stage(RefineState& s, Stage next) {
  s.stage = next;
  s.iter_stage = 0;
  s.d_prev_norm = kInf;
}

struct WorkingSystem {
  DenseMatrix a;
  DenseVector b;
  std::optional<DenseVector> ref;
};

WorkingSystem prepare(const DenseMatrix& a, const DenseVector& b, const RefineParams& p, const DenseVector* x_ref) {
  p.validate();
  if (!a.square()) throw std::invalid_argument("matrix must be square");
  if (a.rows() != b.size()) throw std::invalid_argument("right-hand side length does not match the matrix");
  WorkingSystem w{a.converted(p.u), b.converted(p.u), std::nullopt};
  if (x_ref) {
    w.ref = *x_ref;
  } else if (p.conv_mode == ConvMode::Oracle) {
    w.ref = reference_solution(w.a, w.b);
  }
  return w;
}

}  // namespace

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::SIR: return "SIR";
    case Variant::SGMRES: return "SGMRES-IR";
    case Variant::GMRES: return "GMRES-IR";
    case Variant::TSIR: return "TSIR";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  const std::string t = lower(text);
  if (t == "sir") return Variant::SIR;
  if (t == "sgmres" || t == "sgmres-ir") return Variant::SGMRES;
  if (t == "gmres" || t == "gmres-ir") return Variant::GMRES;
  if (t == "tsir") return Variant::TSIR;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "' (expected sir, sgmres, gmres or tsir)");
}

std::string_view stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::SIR: return "SIR";
    case Stage::SGMRESIR: return "SGMRES-IR";
    case Stage::GMRESIR: return "GMRES-IR";
  }
  return "?";
}

std::string_view switch_event_name(SwitchEvent e) noexcept {
  switch (e) {
    case SwitchEvent::ToSGMRES: return "ToSGMRES";
    case SwitchEvent::ToGMRESIR: return "ToGMRESIR";
    case SwitchEvent::NanEscape: return "NanEscape";
    case SwitchEvent::KmaxEscape: return "KmaxEscape";
    case SwitchEvent::Reset: return "Reset";
  }
  return "?";
}

SwitchEvent parse_switch_event(std::string_view text) {
  for (auto e : {SwitchEvent::ToSGMRES, SwitchEvent::ToGMRESIR, SwitchEvent::NanEscape, SwitchEvent::KmaxEscape,
                 SwitchEvent::Reset}) {
    if (switch_event_name(e) == text) return e;
  }
  throw std::invalid_argument("unknown switch event '" + std::string(text) + "'");
}

ConvMode parse_conv_mode(std::string_view text) {
  const std::string t = lower(text);
  if (t == "estimate") return ConvMode::Estimate;
  if (t == "oracle") return ConvMode::Oracle;
  throw std::invalid_argument("unknown convergence mode '" + std::string(text) + "' (expected estimate or oracle)");
}

CorrectionNorm parse_correction_norm(std::string_view text) {
  const std::string t = lower(text);
  if (t == "scaled") return CorrectionNorm::Scaled;
  if (t == "unscaled") return CorrectionNorm::Unscaled;
  throw std::invalid_argument("unknown correction norm '" + std::string(text) + "' (expected scaled or unscaled)");
}

// ---------------------------------------------------------------- params

RefineParams RefineParams::for_precisions(Format uf, Format u, Format ur) {
  RefineParams p;
  p.uf = uf;
  p.u = u;
  p.ur = ur;
  p.tau = u == Format::Single ? 1e-6 : 1e-10;
  return p;
}

void RefineParams::validate() const {
  const double ru = unit_roundoff(u);
  if (!(unit_roundoff(ur) <= ru * ru)) {
    throw std::invalid_argument("residual precision " + std::string(format_name(ur)) +
                                " must satisfy u_r <= u^2 for working precision " + std::string(format_name(u)));
  }
  const double rf = unit_roundoff(uf);
  if (!(ru <= rf * rf)) {
    throw std::invalid_argument("working precision " + std::string(format_name(u)) +
                                " must satisfy u <= u_f^2 for factorization precision " +
                                std::string(format_name(uf)));
  }
  if (!(rho_thresh > 0.0 && rho_thresh < 1.0)) throw std::invalid_argument("rho_thresh must lie in (0, 1)");
  if (i_max < 1) throw std::invalid_argument("i_max must be at least 1");
  if (!(kmax_frac > 0.0 && kmax_frac <= 1.0)) throw std::invalid_argument("kmax_frac must lie in (0, 1]");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
}

CorrectionNorm RefineParams::effective_correction_norm() const noexcept {
  if (correction_norm) return *correction_norm;
  return conv_mode == ConvMode::Oracle ? CorrectionNorm::Scaled : CorrectionNorm::Unscaled;
}

// ---------------------------------------------------------------- building blocks

RefineState make_state(const DenseVector& x0, std::size_t n) {
  RefineState s;
  s.x = x0;
  s.x0 = x0;
  s.d_prev_norm = kInf;
  s.gamma = std::max(10.0, std::sqrt(static_cast<double>(n)));
  return s;
}

DenseVector initial_solve(const DenseMatrix& a, const DenseVector& b, const LUFactors& f, const RefineParams& p) {
  const DenseVector zero(a.rows(), p.u);
  if (f.failed) return zero;
  DenseVector x0 = tri_solve(f, b, p.uf).converted(p.u);
  if (has_nonfinite(x0)) return zero;
  return x0;
}

ScaledResidual scaled_residual(const DenseMatrix& a, const DenseVector& x, const DenseVector& b,
                               const RefineParams& p) {
  const std::size_t n = b.size();
  const DenseVector ax = matvec(a, x, p.ur);
  std::vector<WideScalar> r(n);
  double rnorm = 0.0;
  detail::with_arith(p.ur, [&](auto ar) {
    using Ar = decltype(ar);
    std::vector<typename Ar::value_type> rv(n);
    auto peak = Ar::load(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      rv[i] = Ar::sub(Ar::load(b[i]), Ar::load(ax[i]));
      const auto mag = Ar::abs(rv[i]);
      if (Ar::less(peak, mag) || !Ar::finite(mag)) peak = mag;
    }
    rnorm = Ar::to_double(peak);
    if (rnorm == 0.0 || !std::isfinite(rnorm)) {
      for (std::size_t i = 0; i < n; ++i) r[i] = Ar::store(rv[i]);
      return;
    }
    // Dividing by the unrounded peak makes the largest entry exactly +-1.
    for (std::size_t i = 0; i < n; ++i) r[i] = Ar::store(Ar::div(rv[i], peak));
  });
  ScaledResidual out;
  out.rnorm = rnorm;
  out.r_hat = rnorm == 0.0 ? DenseVector(n, p.u) : DenseVector(std::move(r), p.u);
  return out;
}

StepRecord refinement_step(RefineState& state, const DenseMatrix& a, const DenseVector& b, const LUFactors& f,
                           Stage stage, const RefineParams& p, const DenseVector* x_ref) {
  const std::size_t n = a.rows();
  StepRecord rec;
  rec.i_global = state.i_global++;
  rec.stage = stage;
  ++state.iter_stage;

  const ScaledResidual res = scaled_residual(a, state.x, b, p);
  DenseVector d(n, p.u);
  bool usable = std::isfinite(res.rnorm);
  if (usable && res.rnorm != 0.0) {
    switch (stage) {
      case Stage::SIR:
        if (f.failed) {
          usable = false;
        } else {
          d = tri_solve(f, res.r_hat, p.uf).converted(p.u);
        }
        break;
      case Stage::SGMRESIR:
      case Stage::GMRESIR: {
        const Format prod = stage == Stage::SGMRESIR ? p.u : square_format(p.u);
        GmresOutcome g = pgmres(f, a, res.r_hat, p.tau, static_cast<int>(n), prod, p.u);
        rec.gmres_iters = g.iters;
        d = std::move(g.d);
        break;
      }
    }
  }
  if (!usable || has_nonfinite(d)) {
    rec.applied = false;
    rec.z = rec.v = rec.phi = kNaN;
    rec.rho_max = state.rho_max;
    if (x_ref) rec.errors = compute_errors(a, state.x, b, *x_ref);
    return rec;
  }

  const double d_norm = p.effective_correction_norm() == CorrectionNorm::Unscaled ? res.rnorm * inf_norm(d)
                                                                                   : inf_norm(d);
  const double x_norm = inf_norm(state.x);
  rec.z = d_norm == 0.0 ? 0.0 : d_norm / x_norm;
  if (std::isinf(state.d_prev_norm) || d_norm == 0.0) {
    rec.v = 0.0;
  } else {
    rec.v = d_norm / state.d_prev_norm;
  }
  state.rho_max = std::max(state.rho_max, rec.v);
  rec.rho_max = state.rho_max;
  rec.phi = rec.z / (1.0 - state.rho_max);

  state.x = axpy_update(state.x, WideScalar(res.rnorm), d, p.u);
  state.d_prev_norm = d_norm;
  state.phi_i = rec.phi;
  if (!state.phi_0) state.phi_0 = rec.phi;
  ++state.applied_steps;
  if (x_ref) rec.errors = compute_errors(a, state.x, b, *x_ref);
  return rec;
}

std::optional<StopReason> should_stop_stage(const RefineState& state, const StepRecord& rec,
                                            const RefineParams& p, std::size_t n) {
  const double u = unit_roundoff(p.u);
  const double phi_tol = std::sqrt(static_cast<double>(n)) * u;
  if (rec.stage == Stage::GMRESIR) {
    if (state.iter_stage > p.i_max) return StopReason::StageLimit;
    if (rec.phi <= phi_tol) return StopReason::EstimateSmall;
    return std::nullopt;
  }
  if (rec.z <= u) return StopReason::SmallCorrection;
  if (rec.v >= p.rho_thresh) return StopReason::SlowConvergence;
  if (state.iter_stage > p.i_max) return StopReason::StageLimit;
  if (rec.stage == Stage::SGMRESIR && rec.gmres_iters > p.kmax_frac * static_cast<double>(n)) {
    return StopReason::KmaxExceeded;
  }
  if (rec.phi <= phi_tol) return StopReason::EstimateSmall;
  return std::nullopt;
}

bool detect_convergence(const RefineState& state, const StepRecord& rec, const RefineParams& p, std::size_t n) {
  const double u = unit_roundoff(p.u);
  if (p.conv_mode == ConvMode::Oracle) {
    if (!rec.errors) return false;
    const double tol = state.gamma * u;
    return rec.errors->ferr <= tol && rec.errors->nbe <= tol && rec.errors->cbe <= tol;
  }
  return rec.phi >= 0.0 && rec.phi <= std::sqrt(static_cast<double>(n)) * u;
}

// ---------------------------------------------------------------- drivers

RefineReport tsir_solve(const DenseMatrix& a, const DenseVector& b, const RefineParams& p,
                        const DenseVector* x_ref) {
  const WorkingSystem w = prepare(a, b, p, x_ref);
  const DenseVector* ref = w.ref ? &*w.ref : nullptr;
  const std::size_t n = w.a.rows();
  const LUFactors f = factor_with_retry(w.a, p.uf, p.factor);

  RefineReport report;
  report.variant = Variant::TSIR;
  report.factor_scaled = f.scaled;
  report.factor_failed = f.failed;
  RefineState state = make_state(initial_solve(w.a, w.b, f, p), n);

  const int cap = 3 * p.i_max;
  while (state.applied_steps < cap) {
    const Stage stage = state.stage;
    StepRecord rec = refinement_step(state, w.a, w.b, f, stage, p, ref);

    if (!rec.applied) {
      if (stage == Stage::GMRESIR) {
        report.steps.push_back(std::move(rec));
        break;
      }
      rec.events.push_back(SwitchEvent::NanEscape);
      enter_stage(state, stage == Stage::SIR ? Stage::SGMRESIR : Stage::GMRESIR);
      report.steps.push_back(std::move(rec));
      continue;
    }

    if (p.conv_mode == ConvMode::Oracle && detect_convergence(state, rec, p, n)) {
      report.converged = true;
      report.steps.push_back(std::move(rec));
      break;
    }
    const auto reason = should_stop_stage(state, rec, p, n);
    if (!reason) {
      report.steps.push_back(std::move(rec));
      continue;
    }
    if (p.conv_mode == ConvMode::Estimate && detect_convergence(state, rec, p, n)) {
      report.converged = true;
      report.steps.push_back(std::move(rec));
      break;
    }
    if (stage == Stage::GMRESIR) {
      const bool estimate_only = p.conv_mode == ConvMode::Oracle && reason == StopReason::EstimateSmall;
      report.steps.push_back(std::move(rec));
      // In Oracle mode the measured errors replace the estimate as the
      // termination test of the last stage.
      if (estimate_only) continue;
      break;
    }
    if (state.iter_stage >= 2 || reason == StopReason::KmaxExceeded) {
      if (reason == StopReason::KmaxExceeded) {
        rec.events.push_back(SwitchEvent::KmaxEscape);
      } else {
        rec.events.push_back(stage == Stage::SIR ? SwitchEvent::ToSGMRES : SwitchEvent::ToGMRESIR);
      }
      if (state.phi_0 && state.phi_i > *state.phi_0) {
        state.x = state.x0;
        rec.events.push_back(SwitchEvent::Reset);
      }
      enter_stage(state, stage == Stage::SIR ? Stage::SGMRESIR : Stage::GMRESIR);
    }
    report.steps.push_back(std::move(rec));
  }

  report.final_x = state.x;
  report.summary = format_summary(report);
  return report;
}

RefineReport single_stage_solve(const DenseMatrix& a, const DenseVector& b, Variant variant, const RefineParams& p,
                                const DenseVector* x_ref) {
  const Stage stage = stage_of(variant);
  const WorkingSystem w = prepare(a, b, p, x_ref);
  const DenseVector* ref = w.ref ? &*w.ref : nullptr;
  const std::size_t n = w.a.rows();
  const LUFactors f = factor_with_retry(w.a, p.uf, p.factor);

  RefineReport report;
  report.variant = variant;
  report.factor_scaled = f.scaled;
  report.factor_failed = f.failed;
  RefineState state = make_state(initial_solve(w.a, w.b, f, p), n);
  state.stage = stage;

  for (int k = 0; k < p.i_max; ++k) {
    StepRecord rec = refinement_step(state, w.a, w.b, f, stage, p, ref);
    if (!rec.applied) {
      report.steps.push_back(std::move(rec));
      break;
    }
    const bool conv = detect_convergence(state, rec, p, n);
    const auto reason = should_stop_stage(state, rec, p, n);
    report.steps.push_back(std::move(rec));
    if (conv) {
      report.converged = true;
      break;
    }
    // A negligible correction that does not certify convergence means stagnation.
    if (p.conv_mode == ConvMode::Estimate && reason == StopReason::SmallCorrection && state.iter_stage >= 2) break;
  }

  report.final_x = state.x;
  report.summary = format_summary(report);
  return report;
}

RefineReport solve(const DenseMatrix& a, const DenseVector& b, Variant variant, const RefineParams& p,
                   const DenseVector* x_ref) {
  if (variant == Variant::TSIR) return tsir_solve(a, b, p, x_ref);
  return single_stage_solve(a, b, variant, p, x_ref);
}

// ---------------------------------------------------------------- errors

ErrorTriple compute_errors(const DenseMatrix& a, const DenseVector& x, const DenseVector& b,
                           const DenseVector& x_ref) {
  const std::size_t n = b.size();
  if (a.rows() != n || a.cols() != n || x.size() != n || x_ref.size() != n) {
    throw std::invalid_argument("compute_errors: dimension mismatch");
  }
  WideScalar ref_norm, diff_norm, x_norm, b_norm, a_norm, r_norm;
  double cbe = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const WideScalar xi = x[i];
    ref_norm = dw::less(ref_norm, dw::abs(x_ref[i])) ? dw::abs(x_ref[i]) : ref_norm;
    const WideScalar di = dw::abs(xi - x_ref[i]);
    diff_norm = dw::less(diff_norm, di) ? di : diff_norm;
    x_norm = dw::less(x_norm, dw::abs(xi)) ? dw::abs(xi) : x_norm;
    b_norm = dw::less(b_norm, dw::abs(b[i])) ? dw::abs(b[i]) : b_norm;
  }
  for (std::size_t i = 0; i < n; ++i) {
    WideScalar ri = b[i];
    WideScalar denom = dw::abs(b[i]);
    WideScalar row;
    for (std::size_t j = 0; j < n; ++j) {
      const WideScalar aij = a(i, j);
      ri = ri - aij * x[j];
      denom = denom + dw::abs(aij) * dw::abs(x[j]);
      row = row + dw::abs(aij);
    }
    const WideScalar abs_ri = dw::abs(ri);
    r_norm = dw::less(r_norm, abs_ri) ? abs_ri : r_norm;
    a_norm = dw::less(a_norm, row) ? row : a_norm;
    if (abs_ri.hi != 0.0) {
      const double q = denom.hi == 0.0 ? kInf : (abs_ri / denom).hi;
      cbe = std::max(cbe, std::isnan(q) ? kInf : q);
    }
  }
  if (ref_norm.hi == 0.0 && b_norm.hi != 0.0) {
    throw std::invalid_argument("compute_errors: zero reference solution with nonzero right-hand side");
  }
  ErrorTriple e;
  e.ferr = ref_norm.hi == 0.0 ? diff_norm.hi : (diff_norm / ref_norm).hi;
  const WideScalar nbe_denom = a_norm * x_norm + b_norm;
  e.nbe = r_norm.hi == 0.0 ? 0.0 : (r_norm / nbe_denom).hi;
  e.cbe = cbe;
  return e;
}

DenseVector reference_solution(const DenseMatrix& a, const DenseVector& b) {
  if (!a.square() || a.rows() != b.size()) throw std::invalid_argument("reference_solution: dimension mismatch");
  const std::size_t n = a.rows();
  const LUFactors f = lu_factor(a, Format::QuadDD);
  for (std::size_t k = 0; k < n; ++k) {
    if (f.upper(k, k).hi == 0.0) {
      throw SingularMatrixError("zero pivot at step " + std::to_string(k) + " of the reference factorization");
    }
  }
  const DenseVector bq = b.converted(Format::QuadDD);
  DenseVector x = tri_solve(f, bq, Format::QuadDD);
  const DenseVector ax = matvec(a, x, Format::QuadDD);
  std::vector<WideScalar> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = bq[i] - ax[i];
  const DenseVector d = tri_solve(f, DenseVector(rounded, std::move(r), Format::QuadDD), Format::QuadDD);
  return axpy_update(x, WideScalar(1.0), d, Format::QuadDD);
}

}  // namespace tsir
