#include "sbilint/report/report.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sbilint/openapi/compiler.hpp"
#include "sbilint/validate/content.hpp"
#include "sbilint/version.hpp"

namespace sbilint::report {

using nlohmann::json;
using validate::Finding;
using validate::Severity;

namespace {

ExchangeSummary summarize(const correlate::HttpExchange& ex) {
  ExchangeSummary s;
  s.id = ex.id;
  s.first_frame = ex.first_frame();
  s.last_frame = ex.last_frame();
  s.method = ex.method();
  s.path = ex.path();
  if (ex.bound_operation) s.operation_id = ex.bound_operation->operation->operation_id;
  s.status = ex.status();
  s.version_status = ex.version_status ? "unsupported (found " + ex.version_status->found + ", expected " +
                                             ex.version_status->expected + ")"
                                       : "ok";
  s.links = ex.links;
  return s;
}

json finding_json(const Finding& f) {
  json j{{"rule", std::string(validate::to_string(f.rule))},
         {"severity", std::string(validate::to_string(f.severity))},
         {"pointer", f.json_pointer},
         {"message", f.message},
         {"frame", f.frame_number}};
  if (!f.detail.empty()) {
    json detail = json::array();
    for (const auto& d : f.detail) detail.push_back(finding_json(d));
    j["detail"] = std::move(detail);
  }
  return j;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Counters count_findings(const std::vector<ReportFinding>& findings) {
  Counters c;
  for (auto s : {Severity::Info, Severity::Warning, Severity::Error}) c.by_severity[std::string(validate::to_string(s))] = 0;
  for (const auto& rf : findings) {
    ++c.by_rule[std::string(validate::to_string(rf.finding.rule))];
    ++c.by_severity[std::string(validate::to_string(rf.finding.severity))];
    ++c.total;
  }
  return c;
}

Report build_report(const std::vector<correlate::HttpExchange>& exchanges, const openapi::SpecIndex& index,
                    const std::string& capture_file, std::vector<std::string> capture_notes,
                    const AnalyzeOptions& options) {
  Report report;
  report.tool_version = std::string(kVersion);
  report.corpus_digest = index.digest();
  report.capture_file = capture_file;
  report.notes = std::move(capture_notes);

  // Each worker writes only its own slots, so scheduling cannot affect the result.
  std::vector<validate::ExchangeValidation> results(exchanges.size());
  const validate::ExchangeValidationOptions vopts{options.max_body};
  unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.jobs;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, exchanges.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < exchanges.size(); i = next++) results[i] = validate::validate_exchange(exchanges[i], vopts);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < exchanges.size(); ++i) {
    const auto& ex = exchanges[i];
    report.exchanges.push_back(summarize(ex));
    for (const auto& n : ex.notes) report.notes.push_back("exchange " + std::to_string(ex.id) + ": " + n);
    for (const auto& n : results[i].notes) report.notes.push_back(n);
    for (const std::vector<Finding>* list : std::array<const std::vector<Finding>*, 2>{&ex.findings, &results[i].findings}) {
      for (const auto& f : *list) {
        if (options.disabled_rules.count(f.rule)) continue;
        report.findings.push_back(ReportFinding{f, ex.id});
      }
    }
  }
  std::stable_sort(report.findings.begin(), report.findings.end(), [](const ReportFinding& a, const ReportFinding& b) {
    return std::tie(a.finding.frame_number, a.finding.json_pointer, a.finding.rule, a.finding.message, a.exchange) <
           std::tie(b.finding.frame_number, b.finding.json_pointer, b.finding.rule, b.finding.message, b.exchange);
  });
  report.counters = count_findings(report.findings);
  return report;
}

Report analyze_capture(const openapi::SpecIndex& index, const std::filesystem::path& capture,
                       const AnalyzeOptions& options) {
  auto decoded = capture::decode_capture_file(capture, options.decode);
  auto exchanges = correlate::correlate(std::move(decoded.messages), index, options.correlator);
  return build_report(exchanges, index, capture.filename().string(), std::move(decoded.notes), options);
}

std::string render_text(const Report& report) {
  std::ostringstream os;
  for (const auto& rf : report.findings) {
    const auto& f = rf.finding;
    std::string method = "-";
    std::string path = "-";
    if (rf.exchange && *rf.exchange < report.exchanges.size()) {
      const auto& ex = report.exchanges[*rf.exchange];
      if (!ex.method.empty()) method = ex.method;
      if (!ex.path.empty()) path = ex.path;
    }
    os << "frame " << f.frame_number << "  " << upper(validate::to_string(f.severity)) << "  "
       << validate::to_string(f.rule) << "  " << method << ' ' << path << "  "
       << (f.json_pointer.empty() ? "(root)" : f.json_pointer) << ": " << f.message << '\n';
  }
  if (!report.findings.empty()) os << '\n';
  os << "capture " << report.capture_file << ": " << report.exchanges.size() << " exchange(s)\n";
  os << report.counters.total << " findings";
  if (report.counters.total > 0) {
    os << " (" << report.counters.by_severity.at("error") << " error, " << report.counters.by_severity.at("warning")
       << " warning, " << report.counters.by_severity.at("info") << " info)";
  }
  os << '\n';
  for (const auto& [rule, n] : report.counters.by_rule) os << "  " << rule << ": " << n << '\n';
  return os.str();
}

std::string render_json(const Report& report) {
  json j;
  j["tool_version"] = report.tool_version;
  j["corpus_digest"] = report.corpus_digest;
  j["capture"] = report.capture_file;
  json exchanges = json::array();
  for (const auto& ex : report.exchanges) {
    exchanges.push_back({{"id", ex.id},
                         {"first_frame", ex.first_frame},
                         {"last_frame", ex.last_frame},
                         {"method", ex.method},
                         {"path", ex.path},
                         {"operation_id", ex.operation_id},
                         {"status", ex.status ? json(*ex.status) : json(nullptr)},
                         {"version_status", ex.version_status},
                         {"links", ex.links}});
  }
  j["exchanges"] = std::move(exchanges);
  json findings = json::array();
  for (const auto& rf : report.findings) {
    json f = finding_json(rf.finding);
    f["exchange"] = rf.exchange ? json(*rf.exchange) : json(nullptr);
    findings.push_back(std::move(f));
  }
  j["findings"] = std::move(findings);
  j["counters"] = {{"by_rule", report.counters.by_rule},
                   {"by_severity", report.counters.by_severity},
                   {"total", report.counters.total}};
  j["notes"] = report.notes;
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

int exit_code(const std::vector<Report>& reports, Severity threshold) {
  for (const auto& r : reports) {
    for (const auto& rf : r.findings) {
      if (rf.finding.severity >= threshold) return 1;
    }
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Checks HTTP/2 5G SBI traffic in packet captures against an OpenAPI corpus", "sbilint"};
  std::string specs;
  std::vector<std::string> pcaps;
  std::string format = "text";
  std::string fail_on = "error";
  std::vector<std::string> disabled;
  std::size_t max_body = 4u << 20;
  unsigned jobs = 1;
  app.add_option("--specs", specs, "Directory of OpenAPI YAML documents")->required();
  app.add_option("--pcap", pcaps, "Capture file (pcap or pcapng); repeatable")->required();
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--fail-on", fail_on, "Lowest severity that fails the run")
      ->check(CLI::IsMember({"error", "warning", "info"}));
  app.add_option("--rule-disable", disabled, "Rule id to suppress; repeatable");
  app.add_option("--max-body", max_body, "Largest body validated, in bytes");
  app.add_option("--jobs", jobs, "Validation workers (0 = one per core)");
  app.set_version_flag("--version", std::string(kVersion));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  AnalyzeOptions options;
  options.max_body = max_body;
  options.jobs = jobs;
  for (const auto& id : disabled) {
    auto rule = validate::parse_rule(id);
    if (!rule) {
      err << "error: unknown rule id " << id << "\n\n" << app.help();
      return 2;
    }
    options.disabled_rules.insert(*rule);
  }
  const Severity threshold = *validate::parse_severity(fail_on);

  std::optional<openapi::SpecIndex> index;
  try {
    index = openapi::load_spec_dir(specs);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  for (const auto& n : index->notes()) err << "spec: " << n << '\n';

  std::vector<Report> reports;
  for (const auto& pcap : pcaps) {
    try {
      reports.push_back(analyze_capture(*index, pcap, options));
    } catch (const std::exception& e) {
      err << "error: " << pcap << ": " << e.what() << '\n';
      return 2;
    }
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (format == "json") {
      out << render_json(reports[i]);
    } else {
      if (i > 0) out << '\n';
      out << render_text(reports[i]);
    }
  }
  return exit_code(reports, threshold);
}

}  // namespace sbilint::report
