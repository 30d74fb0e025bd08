#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsir/refine.hpp"

namespace tsir {

inline constexpr std::string_view kTraceHeader = "step,stage,gmres_iters,ferr,nbe,cbe,phi,z,v,switch_event";

struct TraceRow {
  int step = 0;
  std::string stage;
  int gmres_iters = 0;
  double ferr = 0.0;
  double nbe = 0.0;
  double cbe = 0.0;
  double phi = 0.0;
  double z = 0.0;
  double v = 0.0;
  std::string switch_event;  // events joined by ';', empty if none

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

// Steps are numbered from 1. Missing errors are written as nan.
std::vector<TraceRow> trace_rows(const RefineReport& report);

// %.16e reals, nan/inf spelled out, '\n' line endings.
std::string format_trace_csv(const std::vector<TraceRow>& rows);
std::string format_trace_csv(const RefineReport& report);

// Throws std::runtime_error naming the line on malformed input.
std::vector<TraceRow> parse_trace_csv(std::string_view text);

// Writes to a temporary sibling then renames. Throws std::runtime_error
// with the path on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
void emit_trace_csv(const RefineReport& report, const std::filesystem::path& path);

// "-" if not converged; otherwise a SIR count (always present for SIR and
// TSIR) followed by "(k1,k2,...)" for every GMRES stage with applied steps.
std::string format_summary(const RefineReport& report);

struct SummaryParts {
  bool dash = false;
  std::optional<int> sir_steps;
  std::vector<std::vector<int>> gmres_stages;

  friend bool operator==(const SummaryParts&, const SummaryParts&) = default;
};

SummaryParts parse_summary(std::string_view text);
std::string format_summary(const SummaryParts& parts);

}  // namespace tsir
