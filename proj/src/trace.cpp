#include "tsir/trace.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tsir {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void append_real(std::string& out, double x) {
  if (std::isnan(x)) {
    out += "nan";
  } else if (std::isinf(x)) {
    out += x > 0 ? "inf" : "-inf";
  } else {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    out += buf;
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
  throw std::runtime_error("trace line " + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view field, std::size_t line) {
  const std::string s(field);
  if (s == "nan") return kNaN;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_line(line, "bad real '" + s + "'");
  return v;
}

int parse_int(std::string_view field, std::size_t line) {
  const std::string s(field);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) bad_line(line, "bad integer '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

std::vector<TraceRow> trace_rows(const RefineReport& report) {
  std::vector<TraceRow> rows;
  rows.reserve(report.steps.size());
  for (const auto& s : report.steps) {
    TraceRow r;
    r.step = s.i_global + 1;
    r.stage = std::string(stage_name(s.stage));
    r.gmres_iters = s.gmres_iters;
    r.ferr = s.errors ? s.errors->ferr : kNaN;
    r.nbe = s.errors ? s.errors->nbe : kNaN;
    r.cbe = s.errors ? s.errors->cbe : kNaN;
    r.phi = s.phi;
    r.z = s.z;
    r.v = s.v;
    for (std::size_t k = 0; k < s.events.size(); ++k) {
      if (k) r.switch_event += ';';
      r.switch_event += switch_event_name(s.events[k]);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_trace_csv(const std::vector<TraceRow>& rows) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.step);
    out += ',';
    out += r.stage;
    out += ',';
    out += std::to_string(r.gmres_iters);
    for (double x : {r.ferr, r.nbe, r.cbe, r.phi, r.z, r.v}) {
      out += ',';
      append_real(out, x);
    }
    out += ',';
    out += r.switch_event;
    out += '\n';
  }
  return out;
}

std::string format_trace_csv(const RefineReport& report) { return format_trace_csv(trace_rows(report)); }

std::vector<TraceRow> parse_trace_csv(std::string_view text) {
  std::vector<TraceRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kTraceHeader) bad_line(1, "unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) bad_line(line_no, "expected 10 fields, got " + std::to_string(f.size()));
    TraceRow r;
    r.step = parse_int(f[0], line_no);
    r.stage = std::string(f[1]);
    if (r.stage != "SIR" && r.stage != "SGMRES-IR" && r.stage != "GMRES-IR") bad_line(line_no, "unknown stage");
    r.gmres_iters = parse_int(f[2], line_no);
    r.ferr = parse_real(f[3], line_no);
    r.nbe = parse_real(f[4], line_no);
    r.cbe = parse_real(f[5], line_no);
    r.phi = parse_real(f[6], line_no);
    r.z = parse_real(f[7], line_no);
    r.v = parse_real(f[8], line_no);
    r.switch_event = std::string(f[9]);
    if (!rows.empty() && r.step <= rows.back().step) bad_line(line_no, "step numbers must increase");
    rows.push_back(std::move(r));
  }
  if (line_no == 0) throw std::runtime_error("trace: missing header");
  return rows;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void emit_trace_csv(const RefineReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, format_trace_csv(report));
}

// ---------------------------------------------------------------- summaries

std::string format_summary(const RefineReport& report) {
  SummaryParts parts;
  if (!report.converged) {
    parts.dash = true;
    return format_summary(parts);
  }
  int sir = 0;
  std::vector<int> sg, g;
  for (const auto& s : report.steps) {
    if (!s.applied) continue;
    switch (s.stage) {
      case Stage::SIR: ++sir; break;
      case Stage::SGMRESIR: sg.push_back(s.gmres_iters); break;
      case Stage::GMRESIR: g.push_back(s.gmres_iters); break;
    }
  }
  if (report.variant == Variant::SIR || report.variant == Variant::TSIR) parts.sir_steps = sir;
  if (!sg.empty()) parts.gmres_stages.push_back(std::move(sg));
  if (!g.empty()) parts.gmres_stages.push_back(std::move(g));
  return format_summary(parts);
}

std::string format_summary(const SummaryParts& parts) {
  if (parts.dash) return "-";
  std::string out;
  if (parts.sir_steps) out = std::to_string(*parts.sir_steps);
  for (const auto& stage : parts.gmres_stages) {
    if (!out.empty()) out += ", ";
    out += '(';
    for (std::size_t k = 0; k < stage.size(); ++k) {
      if (k) out += ',';
      out += std::to_string(stage[k]);
    }
    out += ')';
  }
  return out;
}

SummaryParts parse_summary(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("malformed summary '" + std::string(text) + "'"); };
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  auto number = [&](std::string_view s) {
    s = trim(s);
    if (s.empty()) fail();
    int v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') fail();
      v = v * 10 + (c - '0');
    }
    return v;
  };

  SummaryParts parts;
  text = trim(text);
  if (text == "-") {
    parts.dash = true;
    return parts;
  }
  if (text.empty()) fail();
  std::size_t pos = 0;
  if (text[0] != '(') {
    const std::size_t comma = text.find(',');
    parts.sir_steps = number(text.substr(0, comma));
    pos = comma == std::string_view::npos ? text.size() : comma + 1;
  }
  while (pos < text.size()) {
    std::string_view rest = trim(text.substr(pos));
    if (rest.empty() || rest[0] != '(') fail();
    const std::size_t close = rest.find(')');
    if (close == std::string_view::npos) fail();
    std::vector<int> stage;
    for (auto item : split(rest.substr(1, close - 1), ',')) stage.push_back(number(item));
    parts.gmres_stages.push_back(std::move(stage));
    rest = trim(rest.substr(close + 1));
    if (rest.empty()) break;
    if (rest[0] != ',') fail();
    pos = text.size() - rest.size() + 1;
  }
  return parts;
}

}  // namespace tsir
