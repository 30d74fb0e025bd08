#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "tsir/double_word.hpp"
#include "tsir/matgen.hpp"

namespace tsir {
namespace {

enum class Symmetry { General, Symmetric, Skew };

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw MatrixMarketError("Matrix Market line " + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

class Lines {
 public:
  explicit Lines(std::string_view text) : text_(text) {}

  // Next line that is neither blank nor a comment; false at end of input.
  bool next_data(std::string_view& out) {
    while (next(out)) {
      const auto first = out.find_first_not_of(" \t");
      if (first == std::string_view::npos || out[first] == '%') continue;
      return true;
    }
    return false;
  }

  bool next(std::string_view& out) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    out = text_.substr(pos_, end - pos_);
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    pos_ = end + 1;
    ++number_;
    return true;
  }

  std::size_t number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

std::vector<std::string> tokens(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

long parse_index(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) fail(line, "bad integer '" + s + "'");
  return v;
}

double parse_value(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) fail(line, "bad real '" + s + "'");
  return v;
}

}  // namespace

DenseMatrix parse_matrix_market(std::string_view text) {
  Lines lines(text);
  std::string_view header;
  if (!lines.next(header)) fail(1, "empty input");
  const auto h = tokens(header);
  if (h.size() != 5 || lower(h[0]) != "%%matrixmarket") fail(1, "missing %%MatrixMarket banner");
  if (lower(h[1]) != "matrix") fail(1, "object must be 'matrix'");
  const std::string layout = lower(h[2]);
  const std::string field = lower(h[3]);
  const std::string sym = lower(h[4]);
  if (layout != "coordinate" && layout != "array") fail(1, "layout must be coordinate or array");
  if (field != "real" && field != "integer" && field != "double") fail(1, "field '" + h[3] + "' is not real");
  Symmetry symmetry;
  if (sym == "general") {
    symmetry = Symmetry::General;
  } else if (sym == "symmetric") {
    symmetry = Symmetry::Symmetric;
  } else if (sym == "skew-symmetric") {
    symmetry = Symmetry::Skew;
  } else {
    fail(1, "unsupported symmetry '" + h[4] + "'");
  }

  std::string_view line;
  if (!lines.next_data(line)) fail(lines.number() + 1, "missing size line");
  const auto size = tokens(line);
  const bool coord = layout == "coordinate";
  if (size.size() != (coord ? 3u : 2u)) fail(lines.number(), "malformed size line");
  const long rows = parse_index(size[0], lines.number());
  const long cols = parse_index(size[1], lines.number());
  if (rows < 1 || cols < 1) fail(lines.number(), "dimensions must be positive");
  if (rows != cols) fail(lines.number(), "matrix is not square");
  const std::size_t n = static_cast<std::size_t>(rows);

  std::vector<WideScalar> acc(n * n);
  auto add = [&](std::size_t i, std::size_t j, double v) { acc[j * n + i] = acc[j * n + i] + WideScalar(v); };
  auto place = [&](std::size_t i, std::size_t j, double v, std::size_t ln) {
    if (symmetry != Symmetry::General && i < j) fail(ln, "entry above the diagonal in symmetric storage");
    if (symmetry == Symmetry::Skew && i == j) fail(ln, "diagonal entry in skew-symmetric storage");
    add(i, j, v);
    if (i != j && symmetry == Symmetry::Symmetric) add(j, i, v);
    if (i != j && symmetry == Symmetry::Skew) add(j, i, -v);
  };

  if (coord) {
    const long nnz = parse_index(size[2], lines.number());
    if (nnz < 0) fail(lines.number(), "negative entry count");
    for (long k = 0; k < nnz; ++k) {
      if (!lines.next_data(line)) fail(lines.number() + 1, "expected " + std::to_string(nnz) + " entries, got " + std::to_string(k));
      const auto t = tokens(line);
      if (t.size() != 3) fail(lines.number(), "expected 'row col value'");
      const long i = parse_index(t[0], lines.number());
      const long j = parse_index(t[1], lines.number());
      if (i < 1 || i > rows || j < 1 || j > cols) fail(lines.number(), "index out of range");
      place(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), parse_value(t[2], lines.number()),
            lines.number());
    }
  } else {
    // Column-major; symmetric variants list only the lower triangle.
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t first = symmetry == Symmetry::General ? 0 : (symmetry == Symmetry::Skew ? j + 1 : j);
      for (std::size_t i = first; i < n; ++i) {
        if (!lines.next_data(line)) fail(lines.number() + 1, "too few array entries");
        const auto t = tokens(line);
        if (t.size() != 1) fail(lines.number(), "expected one value per line");
        place(i, j, parse_value(t[0], lines.number()), lines.number());
      }
    }
  }
  if (lines.next_data(line)) fail(lines.number(), "unexpected trailing data");

  for (auto& w : acc) w = WideScalar(w.hi + w.lo);
  return DenseMatrix(rounded, n, n, std::move(acc), Format::Double);
}

DenseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatrixMarketError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_matrix_market(buf.str());
  } catch (const MatrixMarketError& e) {
    throw MatrixMarketError(path.string() + ": " + e.what());
  }
}

}  // namespace tsir
