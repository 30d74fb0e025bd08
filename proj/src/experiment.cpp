#include "tsir/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tsir/trace.hpp"

#ifndef TSIR_DEFAULT_DATA_DIR
#define TSIR_DEFAULT_DATA_DIR "tests/data/suitesparse"
#endif

namespace tsir {
namespace {

std::string sci(double x, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*e", digits, x);
  return buf;
}

std::string variant_code(Variant v) {
  switch (v) {
    case Variant::SIR: return "sir";
    case Variant::SGMRES: return "sgmres";
    case Variant::GMRES: return "gmres";
    case Variant::TSIR: return "tsir";
  }
  return "x";
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ExperimentConfig randsvd_preset(std::string name, RandSvdMode mode, const std::string& prec,
                                const std::vector<double>& kappas) {
  ExperimentConfig c;
  c.name = std::move(name);
  for (double k : kappas) c.randsvd.push_back(RandSvdSpec{100, k, mode, 1});
  c.precisions = {parse_precisions(prec)};
  return c;
}

ExperimentConfig suitesparse_preset(std::string name, const std::string& prec) {
  ExperimentConfig c;
  c.name = std::move(name);
  const auto dir = data_dir();
  for (const auto& m : kSuiteSparseNames) c.matrix_files.push_back(dir / (m + ".mtx"));
  c.precisions = {parse_precisions(prec)};
  return c;
}

const std::map<std::string, std::string>& preset_aliases() {
  static const std::map<std::string, std::string> aliases = {
      {"table1", "intro-sdq"},      {"table4", "mode2-sdq"},       {"table5", "mode2-hsd"},
      {"table6", "mode2-hdq"},      {"table7", "mode3-sdq"},       {"table8", "mode3-hdq"},
      {"table9", "suitesparse-props"}, {"table10", "suitesparse-sdq"}, {"table11", "suitesparse-hsd"},
      {"table12", "suitesparse-hdq"},
  };
  return aliases;
}

}  // namespace

std::string PrecisionTriple::code() const {
  return std::string{format_code(uf), format_code(u), format_code(ur)};
}

PrecisionTriple parse_precisions(std::string_view code) {
  if (code == "hsd") return {Format::Half, Format::Single, Format::Double};
  if (code == "sdq") return {Format::Single, Format::Double, Format::QuadDD};
  if (code == "hdq") return {Format::Half, Format::Double, Format::QuadDD};
  throw std::invalid_argument("unknown precision triple '" + std::string(code) + "' (expected hsd, sdq or hdq)");
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("TSIR_DATA_DIR"); env && *env) return env;
  return TSIR_DEFAULT_DATA_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : preset_aliases()) names.push_back(k);
  std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
    return std::stoi(a.substr(5)) < std::stoi(b.substr(5));
  });
  for (const char* extra : {"intro-sdq", "mode2-sdq", "mode2-hsd", "mode2-hdq", "mode3-sdq", "mode3-hsd",
                            "mode3-hdq", "suitesparse-props", "suitesparse-sdq", "suitesparse-hsd",
                            "suitesparse-hdq"}) {
    names.emplace_back(extra);
  }
  return names;
}

ExperimentConfig preset(std::string_view name) {
  std::string key(name);
  if (auto it = preset_aliases().find(key); it != preset_aliases().end()) key = it->second;

  ExperimentConfig c;
  if (key == "intro-sdq") {
    c = randsvd_preset(key, RandSvdMode::OneSmall, "sdq", {1e1, 1e5, 1e16});
  } else if (key.starts_with("mode2-") || key.starts_with("mode3-")) {
    const RandSvdMode mode = key[4] == '2' ? RandSvdMode::OneSmall : RandSvdMode::Geometric;
    c = randsvd_preset(key, mode, key.substr(6), kKappaLadder);
  } else if (key == "suitesparse-props") {
    c = suitesparse_preset(key, "sdq");
    c.properties_only = true;
  } else if (key.starts_with("suitesparse-")) {
    c = suitesparse_preset(key, key.substr(12));
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  c.name = std::string(name);
  return c;
}

RefineParams params_for(const ExperimentConfig& config, const PrecisionTriple& prec) {
  RefineParams p = RefineParams::for_precisions(prec.uf, prec.u, prec.ur);
  if (config.tau) p.tau = *config.tau;
  p.i_max = config.i_max;
  p.rho_thresh = config.rho_thresh;
  p.kmax_frac = config.kmax_frac;
  p.conv_mode = config.conv_mode;
  p.correction_norm = config.correction_norm;
  p.factor.allow_squeeze = config.allow_squeeze;
  return p;
}

void validate(const ExperimentConfig& config) {
  if (config.randsvd.empty() && config.matrix_files.empty()) {
    throw std::invalid_argument("no matrices: give --preset, --matrix or --randsvd");
  }
  if (config.precisions.empty()) throw std::invalid_argument("no precision triple selected");
  if (!config.properties_only && config.variants.empty()) throw std::invalid_argument("no variant selected");
  if (config.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
  for (const auto& s : config.randsvd) {
    if (s.n < 2) throw std::invalid_argument("randsvd size must be at least 2");
    if (!(s.kappa2 >= 1.0)) throw std::invalid_argument("randsvd kappa must be at least 1");
  }
  for (const auto& prec : config.precisions) params_for(config, prec).validate();
  for (const auto& f : config.matrix_files) {
    if (!std::filesystem::exists(f)) {
      throw std::invalid_argument("matrix file " + f.string() +
                                  " not found (set TSIR_DATA_DIR to the directory holding the .mtx files)");
    }
  }
}

std::vector<MatrixCase> load_cases(const ExperimentConfig& config) {
  std::vector<MatrixCase> out;
  for (RandSvdSpec spec : config.randsvd) {
    spec.seed = config.seed;
    LinearSystem sys = randsvd_system(spec);
    MatrixCase m;
    m.name = "randsvd_m" + std::to_string(static_cast<int>(spec.mode)) + "_n" + std::to_string(spec.n) + "_k" +
             sci(spec.kappa2, 0);
    m.kappa_inf = kappa_inf(sys.a);
    m.kappa_2 = spec.kappa2;
    m.a = std::move(sys.a);
    m.b = std::move(sys.b);
    out.push_back(std::move(m));
  }
  for (const auto& path : config.matrix_files) {
    MatrixCase m;
    m.name = path.stem().string();
    m.a = read_matrix_market(path);
    m.b = rhs_ones(m.a.rows());
    m.kappa_inf = kappa_inf(m.a);
    out.push_back(std::move(m));
  }
  return out;
}

ExperimentResult run_cases(const ExperimentConfig& config, const std::vector<MatrixCase>& matrices) {
  struct Job {
    std::size_t matrix;
    PrecisionTriple prec;
    Variant variant;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < matrices.size(); ++m)
    for (const auto& prec : config.precisions)
      for (Variant v : config.variants) jobs.push_back({m, prec, v});

  // One reference solution per (matrix, working precision), computed up front.
  std::map<std::pair<std::size_t, Format>, DenseVector> refs;
  if (config.conv_mode == ConvMode::Oracle) {
    for (const auto& j : jobs) {
      const auto key = std::make_pair(j.matrix, j.prec.u);
      if (refs.count(key)) continue;
      const auto& mc = matrices[j.matrix];
      refs.emplace(key, reference_solution(mc.a.converted(j.prec.u), mc.b.converted(j.prec.u)));
    }
  }

  ExperimentResult result;
  result.cases.resize(jobs.size());
  auto work = [&](std::size_t k) {
    const Job& j = jobs[k];
    const MatrixCase& mc = matrices[j.matrix];
    CaseResult& c = result.cases[k];
    c.matrix = mc.name;
    c.kappa_inf = mc.kappa_inf;
    c.kappa_2 = mc.kappa_2;
    c.precisions = j.prec;
    c.variant = j.variant;
    const auto it = refs.find({j.matrix, j.prec.u});
    const DenseVector* ref = it == refs.end() ? nullptr : &it->second;
    c.report = solve(mc.a, mc.b, j.variant, params_for(config, j.prec), ref);
    c.trace_file = mc.name + "_" + j.prec.code() + "_" + variant_code(j.variant) + ".trace.csv";
  };

  const std::size_t lanes = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), jobs.size());
  if (lanes <= 1) {
    for (std::size_t k = 0; k < jobs.size(); ++k) work(k);
    return result;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < lanes; ++t) {
    threads.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
        try {
          work(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return result;
}

std::string summary_csv(const ExperimentResult& result) {
  std::string out = "matrix,kappa_inf,kappa_2,uf,u,ur,variant,summary,converged\n";
  for (const auto& c : result.cases) {
    out += c.matrix + "," + sci(c.kappa_inf, 6) + "," + (c.kappa_2 ? sci(*c.kappa_2, 6) : std::string()) + ",";
    out += std::string(format_name(c.precisions.uf)) + "," + std::string(format_name(c.precisions.u)) + "," +
           std::string(format_name(c.precisions.ur)) + ",";
    out += std::string(variant_name(c.variant)) + "," + csv_quote(c.report.summary) + ",";
    out += c.report.converged ? "true\n" : "false\n";
  }
  return out;
}

std::string properties_csv(const std::vector<MatrixCase>& matrices) {
  std::string out = "matrix,n,nnz,kappa_inf\n";
  for (const auto& m : matrices) {
    out += m.name + "," + std::to_string(m.a.rows()) + "," + std::to_string(m.a.count_nonzeros()) + "," +
           sci(m.kappa_inf, 6) + "\n";
  }
  return out;
}

ExperimentResult run(const ExperimentConfig& config) {
  validate(config);
  const auto matrices = load_cases(config);
  std::filesystem::create_directories(config.output_dir);
  if (config.properties_only) {
    write_file_atomic(config.output_dir / "properties.csv", properties_csv(matrices));
    return {};
  }
  ExperimentResult result = run_cases(config, matrices);
  for (const auto& c : result.cases) emit_trace_csv(c.report, config.output_dir / c.trace_file);
  write_file_atomic(config.output_dir / "summary.csv", summary_csv(result));
  return result;
}

}  // namespace tsir
