#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tsir/experiment.hpp"
#include "tsir/trace.hpp"

using namespace tsir;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tsir_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_bench(const std::string& args) {
  const std::string cmd = std::string(TSIR_BENCH_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("precision triples") {
  CHECK(parse_precisions("hdq") == PrecisionTriple{Format::Half, Format::Double, Format::QuadDD});
  CHECK(parse_precisions("hsd").code() == "hsd");
  CHECK_THROWS_AS(parse_precisions("sss"), std::invalid_argument);
}

TEST_CASE("preset shapes") {
  const ExperimentConfig t4 = preset("table4");
  CHECK(t4.randsvd.size() == 8);
  CHECK(t4.randsvd.front().mode == RandSvdMode::OneSmall);
  CHECK(t4.precisions == std::vector<PrecisionTriple>{parse_precisions("sdq")});
  CHECK(t4.variants.size() * t4.randsvd.size() * t4.precisions.size() == 32);
  CHECK(t4.conv_mode == ConvMode::Oracle);

  const ExperimentConfig t8 = preset("table8");
  CHECK(t8.randsvd.front().mode == RandSvdMode::Geometric);
  CHECK(t8.precisions == std::vector<PrecisionTriple>{parse_precisions("hdq")});

  const ExperimentConfig t10 = preset("table10");
  CHECK(t10.matrix_files.size() == 9);
  CHECK(t10.randsvd.empty());
  CHECK(preset("table9").properties_only);
  CHECK(preset("table1").randsvd.size() == 3);
  CHECK(preset("table5").precisions.front() == parse_precisions("hsd"));
  CHECK_THROWS_AS(preset("table3"), std::invalid_argument);

  const auto names = preset_names();
  CHECK(std::find(names.begin(), names.end(), "mode3-hsd") != names.end());
  for (const auto& n : names) CHECK_NOTHROW(preset(n));
}

TEST_CASE("parameters follow the working precision") {
  ExperimentConfig c = preset("table5");
  CHECK(params_for(c, c.precisions.front()).tau == 1e-6);
  CHECK(params_for(preset("table4"), parse_precisions("sdq")).tau == 1e-10);
  c.tau = 1e-8;
  c.allow_squeeze = false;
  const RefineParams p = params_for(c, c.precisions.front());
  CHECK(p.tau == 1e-8);
  CHECK_FALSE(p.factor.allow_squeeze);
}

TEST_CASE("validation explains missing inputs") {
  ExperimentConfig c;
  c.matrix_files = {"/definitely/not/here.mtx"};
  try {
    validate(c);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("here.mtx") != std::string::npos);
  }
  ExperimentConfig empty;
  CHECK_THROWS_AS(validate(empty), std::invalid_argument);
  ExperimentConfig bad;
  bad.randsvd = {RandSvdSpec{}};
  bad.i_max = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("a 4x4 identity file runs every variant") {
  const auto dir = scratch("identity");
  const auto mtx = dir / "eye4.mtx";
  {
    std::ofstream out(mtx);
    out << "%%MatrixMarket matrix coordinate real general\n4 4 4\n1 1 1\n2 2 1\n3 3 1\n4 4 1\n";
  }
  ExperimentConfig c;
  c.matrix_files = {mtx};
  c.output_dir = dir / "out";
  const ExperimentResult r = run(c);
  REQUIRE(r.cases.size() == 4);
  for (const auto& cs : r.cases) {
    CHECK(cs.report.converged);
    CHECK(std::filesystem::exists(c.output_dir / cs.trace_file));
  }
  const std::string summary = slurp(c.output_dir / "summary.csv");
  CHECK(summary.rfind("matrix,kappa_inf,kappa_2,uf,u,ur,variant,summary,converged\n", 0) == 0);
  CHECK(summary.find("eye4") != std::string::npos);
}

TEST_CASE("identical configurations give identical summaries") {
  ExperimentConfig c;
  c.randsvd = {RandSvdSpec{.n = 30, .kappa2 = 1e5, .mode = RandSvdMode::OneSmall},
               RandSvdSpec{.n = 30, .kappa2 = 1e9, .mode = RandSvdMode::Geometric}};
  c.output_dir = scratch("det1");
  const std::string a = summary_csv(run(c));
  c.output_dir = scratch("det2");
  c.jobs = 3;
  const std::string b = summary_csv(run(c));
  CHECK(a == b);
  CHECK(slurp(c.output_dir / "summary.csv") == b);
}

TEST_CASE("command line") {
  const auto dir = scratch("bench");
  CHECK(run_bench("--help") == 0);
  CHECK(run_bench("--list-presets") == 0);
  CHECK(run_bench("--frobnicate") != 0);
  CHECK(run_bench("--preset table4 --randsvd 10,10,2") != 0);
  CHECK(run_bench("--preset nosuch") != 0);
  CHECK(run_bench("--randsvd 10,10,7") != 0);
  CHECK(run_bench("--randsvd 20,1e16,2 --variants sir --out " + dir.string()) == 0);
  const std::string s = slurp(dir / "summary.csv");
  CHECK(s.find(",SIR,-,false") != std::string::npos);
  CHECK(run_bench("--randsvd 20,1e3,3 --precisions hsd,sdq --variants tsir,gmres --conv-mode estimate --out " +
                  dir.string()) == 0);
  std::size_t rows = 0;
  for (char ch : slurp(dir / "summary.csv")) rows += ch == '\n';
  CHECK(rows == 5);
}
