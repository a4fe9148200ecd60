#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sbilint/capture/messages.hpp"
#include "sbilint/correlate/exchange.hpp"
#include "sbilint/openapi/spec_index.hpp"
#include "sbilint/validate/finding.hpp"

namespace sbilint::report {

struct ExchangeSummary {
  std::size_t id = 0;
  std::uint64_t first_frame = 0;
  std::uint64_t last_frame = 0;
  std::string method;
  std::string path;
  std::string operation_id;
  std::optional<int> status;
  std::string version_status;  // "ok" or "unsupported (found vX, expected vY)"
  std::vector<std::size_t> links;
};

struct ReportFinding {
  validate::Finding finding;
  std::optional<std::size_t> exchange;  // absent for capture-level findings
};

struct Counters {
  std::map<std::string, std::size_t> by_rule;      // only rules that occurred
  std::map<std::string, std::size_t> by_severity;  // always all three severities
  std::size_t total = 0;
};

struct Report {
  std::string tool_version;
  std::string corpus_digest;
  std::string capture_file;  // file name only, so reports do not depend on the working directory
  std::vector<ExchangeSummary> exchanges;
  std::vector<ReportFinding> findings;  // ordered by (frame, pointer, rule)
  Counters counters;
  std::vector<std::string> notes;
};

struct AnalyzeOptions {
  std::size_t max_body = 4u << 20;
  unsigned jobs = 1;  // validation workers; 0 = hardware concurrency
  std::set<validate::Rule> disabled_rules;
  correlate::CorrelatorOptions correlator;
  capture::DecodeOptions decode;
};

Counters count_findings(const std::vector<ReportFinding>& findings);

/// Validates correlated exchanges and assembles the report. The result does
/// not depend on `options.jobs`.
Report build_report(const std::vector<correlate::HttpExchange>& exchanges, const openapi::SpecIndex& index,
                    const std::string& capture_file, std::vector<std::string> capture_notes,
                    const AnalyzeOptions& options);

/// decode -> correlate -> validate for one capture. Throws CaptureError when
/// the file cannot be read.
Report analyze_capture(const openapi::SpecIndex& index, const std::filesystem::path& capture,
                       const AnalyzeOptions& options = {});

std::string render_text(const Report& report);
/// Canonical single-line JSON with sorted keys, newline-terminated.
std::string render_json(const Report& report);

/// 1 when any finding is at or above `threshold`, else 0.
int exit_code(const std::vector<Report>& reports, validate::Severity threshold);

/// CLI entry point. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbilint::report
