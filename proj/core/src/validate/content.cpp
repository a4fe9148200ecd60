#include "sbilint/validate/content.hpp"

#include <algorithm>

#include "sbilint/validate/validator.hpp"

namespace sbilint::validate {

using capture::MessageDirection;
using correlate::HttpExchange;

namespace {

Finding make_finding(Rule rule, Severity severity, std::uint64_t frame, std::string message) {
  Finding f;
  f.rule = rule;
  f.severity = severity;
  f.frame_number = frame;
  f.message = std::move(message);
  return f;
}

const char* side_name(MessageDirection side) { return side == MessageDirection::Request ? "request" : "response"; }

}  // namespace

ContentSelection select_content_schema(const HttpExchange& ex, MessageDirection side) {
  ContentSelection sel;
  const auto& msg = side == MessageDirection::Request ? ex.request : ex.response;
  if (!msg || !ex.bound_operation) return sel;
  const auto& op = *ex.bound_operation->operation;
  const auto frame = msg->first_frame;

  const openapi::ContentMap* content = &op.request_body;
  if (side == MessageDirection::Response) {
    const auto status = ex.status();
    if (!status) return sel;
    const auto* rs = op.response_for(*status);
    if (rs == nullptr) {
      sel.findings.push_back(make_finding(Rule::STATUS_NOT_DEFINED, Severity::Error, frame,
                                          "status " + std::to_string(*status) + " not declared for " +
                                              (op.operation_id.empty() ? op.path_template : op.operation_id)));
      return sel;
    }
    content = &rs->content;
  }
  if (msg->body.empty() || content->empty()) return sel;

  const std::string declared = correlate::media_type(msg->headers.get("content-type").value_or(""));
  if (auto it = content->find(declared); it != content->end()) {
    sel.schema = it->second;
    sel.content_type = it->first;
    return sel;
  }
  const std::string shown = declared.empty() ? "(none)" : declared;
  if (content->size() == 1) {
    sel.schema = content->begin()->second;
    sel.content_type = content->begin()->first;
    sel.findings.push_back(make_finding(Rule::CONTENT_TYPE_MISMATCH, Severity::Warning, frame,
                                        std::string(side_name(side)) + " content-type " + shown +
                                            " not declared; validated as " + sel.content_type));
    return sel;
  }
  std::string offered;
  for (const auto& [type, schema] : *content) offered += (offered.empty() ? "" : ", ") + type;
  sel.findings.push_back(make_finding(Rule::CONTENT_TYPE_MISMATCH, Severity::Error, frame,
                                      std::string(side_name(side)) + " content-type " + shown +
                                          " not among declared types (" + offered + "); body not validated"));
  return sel;
}

ExchangeValidation validate_exchange(const HttpExchange& ex, const ExchangeValidationOptions& options) {
  ExchangeValidation out;
  if (ex.version_status || !ex.bound_operation || !ex.request) return out;
  const auto& op = *ex.bound_operation->operation;

  for (auto side : {MessageDirection::Request, MessageDirection::Response}) {
    const auto& msg = side == MessageDirection::Request ? ex.request : ex.response;
    if (!msg) continue;
    const auto frame = msg->first_frame;

    if (msg->body.size() > options.max_body) {
      out.notes.push_back("frame " + std::to_string(frame) + ": " + side_name(side) + " body of " +
                          std::to_string(msg->body.size()) + " bytes exceeds --max-body; not validated");
      if (side == MessageDirection::Request) continue;
    }

    auto sel = select_content_schema(ex, side);
    out.findings.insert(out.findings.end(), sel.findings.begin(), sel.findings.end());

    if (side == MessageDirection::Response) {
      const auto status = ex.status();
      const auto* rs = status ? op.response_for(*status) : nullptr;
      if (status == 201 && rs != nullptr &&
          std::find(rs->required_headers.begin(), rs->required_headers.end(), "location") !=
              rs->required_headers.end() &&
          !msg->headers.has("location")) {
        out.findings.push_back(make_finding(Rule::LOCATION_HEADER_MISSING, Severity::Error, frame,
                                            "201 response lacks the Location header of the created resource"));
      }
      if (msg->body.size() > options.max_body) continue;
    }

    if (sel.schema == nullptr) continue;
    const std::string declared = correlate::media_type(msg->headers.get("content-type").value_or(""));
    if (!correlate::is_json_media_type(sel.content_type) && !correlate::is_json_media_type(declared)) continue;

    std::string error;
    auto value = parse_json(msg->body, &error);
    if (!value) {
      out.findings.push_back(make_finding(Rule::BODY_NOT_JSON, Severity::Error, frame,
                                          std::string(side_name(side)) + " body is not valid JSON: " + error));
      continue;
    }
    for (auto& f : validate(*value, *sel.schema)) {
      f.frame_number = frame;
      out.findings.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace sbilint::validate
