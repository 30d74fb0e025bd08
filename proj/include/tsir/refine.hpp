#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsir/dense.hpp"
#include "tsir/factor.hpp"
#include "tsir/precision.hpp"

namespace tsir {

enum class Variant { SIR, SGMRES, GMRES, TSIR };
enum class Stage { SIR, SGMRESIR, GMRESIR };
enum class ConvMode { Estimate, Oracle };

// Which correction enters z and v: the solution of A d = r/||r|| as stored
// (Scaled) or the actual update ||r|| * d (Unscaled).
enum class CorrectionNorm { Scaled, Unscaled };

enum class SwitchEvent { ToSGMRES, ToGMRESIR, NanEscape, KmaxEscape, Reset };

enum class StopReason {
  SmallCorrection = 1,  // z <= u
  SlowConvergence,      // v >= rho_thresh
  StageLimit,           // iter_stage > i_max
  KmaxExceeded,         // SGMRES-IR step used more than kmax_frac * n iterations
  EstimateSmall,        // phi <= sqrt(n) u
};

std::string_view variant_name(Variant v) noexcept;
Variant parse_variant(std::string_view text);
std::string_view stage_name(Stage s) noexcept;
std::string_view switch_event_name(SwitchEvent e) noexcept;
SwitchEvent parse_switch_event(std::string_view text);
ConvMode parse_conv_mode(std::string_view text);
CorrectionNorm parse_correction_norm(std::string_view text);

struct RefineParams {
  Format uf = Format::Single;
  Format u = Format::Double;
  Format ur = Format::QuadDD;
  double tau = 1e-10;
  int i_max = 10;
  double rho_thresh = 0.5;
  double kmax_frac = 0.1;
  ConvMode conv_mode = ConvMode::Estimate;
  std::optional<CorrectionNorm> correction_norm;  // unset: Scaled in Oracle mode, Unscaled in Estimate mode
  FactorOptions factor;

  // tau = 1e-6 for single working precision, 1e-10 otherwise.
  static RefineParams for_precisions(Format uf, Format u, Format ur);

  // Throws std::invalid_argument unless u_r <= u^2, u <= u_f^2,
  // 0 < rho_thresh < 1, i_max >= 1, kmax_frac in (0, 1] and tau > 0.
  void validate() const;

  CorrectionNorm effective_correction_norm() const noexcept;
};

struct ErrorTriple {
  double ferr = 0.0;
  double nbe = 0.0;
  double cbe = 0.0;
};

struct StepRecord {
  int i_global = 0;
  Stage stage = Stage::SIR;
  int gmres_iters = 0;
  double z = 0.0;
  double v = 0.0;
  double phi = 0.0;
  double rho_max = 0.0;  // running maximum of v after this step
  std::optional<ErrorTriple> errors;  // present when a reference solution is available
  std::vector<SwitchEvent> events;
  bool applied = true;  // false when the correction was nonfinite and x was left unchanged
};

struct RefineState {
  DenseVector x;
  DenseVector x0;
  double d_prev_norm;
  double rho_max = 0.0;
  std::optional<double> phi_0;
  double phi_i = 0.0;
  Stage stage = Stage::SIR;
  int iter_stage = 0;
  int i_global = 0;
  int applied_steps = 0;
  double gamma = 10.0;
};

struct RefineReport {
  Variant variant = Variant::TSIR;
  std::vector<StepRecord> steps;
  bool converged = false;
  DenseVector final_x;
  std::string summary;
  bool factor_scaled = false;
  bool factor_failed = false;
};

struct ScaledResidual {
  DenseVector r_hat;  // r / ||r||_inf stored in u
  double rnorm = 0.0;
};

// Fresh state around x0 with gamma = max(10, sqrt(n)).
RefineState make_state(const DenseVector& x0, std::size_t n);

// x0 = LU \ b in u_f, stored in u; the zero vector if that is nonfinite or
// the factorization failed.
DenseVector initial_solve(const DenseMatrix& a, const DenseVector& b, const LUFactors& f, const RefineParams& p);

// r = b - A x in u_r, rnorm = ||r||_inf, r_hat = r / rnorm rounded to u.
ScaledResidual scaled_residual(const DenseMatrix& a, const DenseVector& x, const DenseVector& b,
                               const RefineParams& p);

// One step of the given stage. Updates x, d_prev_norm, rho_max, phi and the
// counters in state. A nonfinite correction leaves x untouched and returns a
// record with applied = false. x_ref, when given, fills record.errors.
StepRecord refinement_step(RefineState& state, const DenseMatrix& a, const DenseVector& b, const LUFactors& f,
                           Stage stage, const RefineParams& p, const DenseVector* x_ref = nullptr);

// First applicable reason in the order of StopReason. In the GMRES-IR stage
// only StageLimit and EstimateSmall are considered.
std::optional<StopReason> should_stop_stage(const RefineState& state, const StepRecord& rec,
                                            const RefineParams& p, std::size_t n);

// Estimate mode: 0 <= phi <= sqrt(n) u. Oracle mode: ferr, nbe and cbe all
// at most gamma * u.
bool detect_convergence(const RefineState& state, const StepRecord& rec, const RefineParams& p, std::size_t n);

RefineReport tsir_solve(const DenseMatrix& a, const DenseVector& b, const RefineParams& p,
                        const DenseVector* x_ref = nullptr);

// Runs one of SIR, SGMRES-IR or GMRES-IR for at most i_max steps.
RefineReport single_stage_solve(const DenseMatrix& a, const DenseVector& b, Variant variant, const RefineParams& p,
                                const DenseVector* x_ref = nullptr);

// Dispatches to tsir_solve or single_stage_solve.
RefineReport solve(const DenseMatrix& a, const DenseVector& b, Variant variant, const RefineParams& p,
                   const DenseVector* x_ref = nullptr);

// ferr, nbe and cbe evaluated in QuadDD. Throws std::invalid_argument if
// x_ref is zero while b is not.
ErrorTriple compute_errors(const DenseMatrix& a, const DenseVector& x, const DenseVector& b,
                           const DenseVector& x_ref);

// QuadDD GEPP solve followed by one QuadDD refinement step.
// Throws SingularMatrixError on a zero pivot.
DenseVector reference_solution(const DenseMatrix& a, const DenseVector& b);

}  // namespace tsir
