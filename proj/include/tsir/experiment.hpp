#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsir/matgen.hpp"
#include "tsir/refine.hpp"

namespace tsir {

struct PrecisionTriple {
  Format uf = Format::Single;
  Format u = Format::Double;
  Format ur = Format::QuadDD;

  std::string code() const;  // e.g. "sdq"
  friend bool operator==(const PrecisionTriple&, const PrecisionTriple&) = default;
};

// Accepts hsd, sdq and hdq.
PrecisionTriple parse_precisions(std::string_view code);

inline const std::vector<double> kKappaLadder = {1e1, 1e2, 1e4, 1e5, 1e7, 1e9, 1e11, 1e14};
inline const std::vector<std::string> kSuiteSparseNames = {"cage6",  "tols90", "bfwa62",        "cage5", "d_dyn",
                                                           "d_ss",   "Hamrle1", "ww_36_pmec_36", "steam3"};

struct ExperimentConfig {
  std::string name = "custom";
  std::vector<RandSvdSpec> randsvd;                // seed field is overridden by `seed`
  std::vector<std::filesystem::path> matrix_files;  // right-hand side is all ones
  std::vector<PrecisionTriple> precisions = {PrecisionTriple{}};
  std::vector<Variant> variants = {Variant::SIR, Variant::SGMRES, Variant::GMRES, Variant::TSIR};
  std::uint64_t seed = 1;

  std::optional<double> tau;  // default 1e-6 for single working precision, 1e-10 otherwise
  int i_max = 10;
  double rho_thresh = 0.5;
  double kmax_frac = 0.1;
  ConvMode conv_mode = ConvMode::Oracle;
  std::optional<CorrectionNorm> correction_norm;
  bool allow_squeeze = true;

  bool properties_only = false;  // write matrix properties instead of solving
  std::filesystem::path output_dir = "out";
  int jobs = 1;
};

// Directory holding <name>.mtx files: $TSIR_DATA_DIR or the build default.
std::filesystem::path data_dir();

std::vector<std::string> preset_names();

// table1, table4 ... table12, plus descriptive aliases listed by
// preset_names(). Throws std::invalid_argument for unknown names.
ExperimentConfig preset(std::string_view name);

RefineParams params_for(const ExperimentConfig& config, const PrecisionTriple& prec);

// Throws std::invalid_argument with an actionable message.
void validate(const ExperimentConfig& config);

struct MatrixCase {
  std::string name;
  DenseMatrix a;
  DenseVector b;
  double kappa_inf = 0.0;
  std::optional<double> kappa_2;  // target value for generated matrices
};

// Loads or generates every matrix of the config, in config order.
std::vector<MatrixCase> load_cases(const ExperimentConfig& config);

struct CaseResult {
  std::string matrix;
  double kappa_inf = 0.0;
  std::optional<double> kappa_2;
  PrecisionTriple precisions;
  Variant variant = Variant::TSIR;
  RefineReport report;
  std::string trace_file;  // file name inside the output directory
};

struct ExperimentResult {
  std::vector<CaseResult> cases;  // ordered by matrix, precision triple, variant
};

ExperimentResult run_cases(const ExperimentConfig& config, const std::vector<MatrixCase>& matrices);

// Runs everything and writes <case>.trace.csv files plus summary.csv (or
// properties.csv) into output_dir.
ExperimentResult run(const ExperimentConfig& config);

std::string summary_csv(const ExperimentResult& result);
std::string properties_csv(const std::vector<MatrixCase>& matrices);

}  // namespace tsir
