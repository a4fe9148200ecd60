#include "sbilint/correlate/exchange.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <tuple>

#include "sbilint/validate/validator.hpp"

namespace sbilint::correlate {

using capture::HttpMessage;
using capture::MessageDirection;
using validate::Finding;
using validate::Rule;
using validate::Severity;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string strip_query(std::string_view path) {
  const auto cut = path.find_first_of("?#");
  return std::string(path.substr(0, cut));
}

Finding make_finding(Rule rule, Severity severity, std::uint64_t frame, std::string message) {
  Finding f;
  f.rule = rule;
  f.severity = severity;
  f.frame_number = frame;
  f.message = std::move(message);
  return f;
}

bool has_finding(const HttpExchange& ex, Rule rule, const std::string& message) {
  return std::any_of(ex.findings.begin(), ex.findings.end(),
                     [&](const Finding& f) { return f.rule == rule && f.message == message; });
}

void add_once(HttpExchange& ex, Finding f) {
  if (!has_finding(ex, f.rule, f.message)) ex.findings.push_back(std::move(f));
}

const openapi::ContentMap* declared_content(const HttpExchange& ex, MessageDirection side) {
  if (!ex.bound_operation) return nullptr;
  const auto& op = *ex.bound_operation->operation;
  if (side == MessageDirection::Request) return &op.request_body;
  auto status = ex.status();
  if (!status) return nullptr;
  const auto* rs = op.response_for(*status);
  return rs ? &rs->content : nullptr;
}

}  // namespace

std::string_view to_string(AugmentSource source) {
  switch (source) {
    case AugmentSource::ContentSniff: return "content-sniff";
    case AugmentSource::SpecDefault: return "spec-default";
    case AugmentSource::Unrecoverable: return "unrecoverable";
  }
  return "unrecoverable";
}

std::string media_type(std::string_view content_type) {
  const auto semi = content_type.find(';');
  return lower(trim(content_type.substr(0, semi)));
}

bool is_json_media_type(std::string_view media) {
  return media == "application/json" || (media.size() > 5 && media.substr(media.size() - 5) == "+json");
}

std::uint64_t HttpExchange::first_frame() const {
  if (request && response) return std::min(request->first_frame, response->first_frame);
  return request ? request->first_frame : response ? response->first_frame : 0;
}

std::uint64_t HttpExchange::last_frame() const {
  if (request && response) return std::max(request->last_frame, response->last_frame);
  return request ? request->last_frame : response ? response->last_frame : 0;
}

std::string HttpExchange::method() const {
  if (!request) return {};
  return request->headers.get(":method").value_or("");
}

std::string HttpExchange::path() const {
  if (!request) return {};
  return request->headers.get(":path").value_or("");
}

std::optional<int> HttpExchange::status() const {
  if (!response) return std::nullopt;
  auto s = response->headers.get(":status");
  if (!s || s->size() != 3 || !std::all_of(s->begin(), s->end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  return std::stoi(*s);
}

std::vector<HttpExchange> pair_exchanges(std::vector<HttpMessage> messages) {
  std::stable_sort(messages.begin(), messages.end(), [](const HttpMessage& a, const HttpMessage& b) {
    return a.first_frame < b.first_frame;
  });

  std::vector<HttpExchange> out;
  // Exchanges still waiting for a response, per (tcp stream, h2 stream).
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::deque<std::size_t>> waiting;

  for (auto& m : messages) {
    const auto key = std::make_pair(m.tcp_stream_id, m.h2_stream_id);
    if (m.direction == MessageDirection::Request) {
      HttpExchange ex;
      ex.request = std::move(m);
      waiting[key].push_back(out.size());
      out.push_back(std::move(ex));
      continue;
    }
    auto it = waiting.find(key);
    if (it != waiting.end() && !it->second.empty()) {
      out[it->second.front()].response = std::move(m);
      it->second.pop_front();
      continue;
    }
    HttpExchange ex;
    const auto frame = m.first_frame;
    ex.response = std::move(m);
    ex.findings.push_back(make_finding(Rule::HEADERS_INCOMPLETE, Severity::Warning, frame,
                                       "response without a captured request; not validated"));
    out.push_back(std::move(ex));
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const HttpExchange& a, const HttpExchange& b) { return a.first_frame() < b.first_frame(); });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = i;
    if (out[i].request && !out[i].response) out[i].notes.push_back("no response captured");
  }
  return out;
}

void match_operation(HttpExchange& ex, const openapi::SpecIndex& index) {
  if (!ex.request) return;
  const auto frame = ex.request->first_frame;
  const auto method = ex.request->headers.get(":method");
  const auto path = ex.request->headers.get(":path");
  if (!method || !path) {
    add_once(ex, make_finding(Rule::HEADERS_INCOMPLETE, Severity::Warning, frame,
                              std::string("request lacks ") + (!method ? ":method" : ":path") + "; operation unknown"));
    return;
  }
  const auto result = openapi::lookup_operation(*method, *path, index);
  if (const auto* match = std::get_if<openapi::OperationMatch>(&result)) {
    ex.bound_operation = BoundOperation{match->operation, match->path_parameters, false};
    return;
  }
  const auto& miss = std::get<openapi::NoMatch>(result);
  switch (miss.reason) {
    case openapi::NoMatchReason::UnknownBasePath:
    case openapi::NoMatchReason::UnknownPath:
      add_once(ex, make_finding(Rule::UNKNOWN_PATH, Severity::Error, frame,
                                "no operation declares path " + strip_query(*path)));
      break;
    case openapi::NoMatchReason::MethodNotAllowed:
      add_once(ex, make_finding(Rule::METHOD_NOT_ALLOWED, Severity::Error, frame,
                                "method " + *method + " not declared for " + strip_query(*path)));
      break;
    case openapi::NoMatchReason::UnsupportedVersion:
      ex.version_status = UnsupportedVersion{miss.found_version, miss.expected_version};
      add_once(ex, make_finding(Rule::UNSUPPORTED_API_VERSION, Severity::Error, frame,
                                "API version " + miss.found_version + " used, corpus provides " +
                                    miss.expected_version + "; payloads not validated"));
      break;
  }
}

std::string normalize_authority(std::string_view authority, std::string_view scheme) {
  std::string a = lower(trim(authority));
  const auto at = a.rfind('@');
  if (at != std::string::npos) a.erase(0, at + 1);
  const auto bracket = a.rfind(']');
  const auto colon = a.rfind(':');
  const bool has_port = colon != std::string::npos && (bracket == std::string::npos || colon > bracket);
  if (!has_port) {
    const std::string s = lower(scheme);
    a += s == "https" ? ":443" : ":80";
  }
  return a;
}

std::optional<std::string> normalize_callback_uri(std::string_view uri) {
  uri = trim(uri);
  const auto sep = uri.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  const std::string scheme = lower(uri.substr(0, sep));
  if (scheme != "http" && scheme != "https") return std::nullopt;
  auto rest = uri.substr(sep + 3);
  const auto slash = rest.find_first_of("/?#");
  const auto authority = rest.substr(0, slash);
  if (authority.empty()) return std::nullopt;
  std::string path = slash == std::string_view::npos ? "/" : strip_query(rest.substr(slash));
  if (path.empty()) path = "/";
  return normalize_authority(authority, scheme) + path;
}

std::vector<SubscriptionRecord> link_subscriptions(std::vector<HttpExchange>& exchanges,
                                                   const CorrelatorOptions& options) {
  std::vector<SubscriptionRecord> records;
  for (auto& ex : exchanges) {
    if (!ex.request) continue;
    const auto& headers = ex.request->headers;

    // A request addressed to an earlier callback URI is its notification.
    if (auto authority = headers.get(":authority"); authority && headers.has(":path")) {
      const std::string target = normalize_authority(*authority, headers.get(":scheme").value_or("http")) +
                                 strip_query(*headers.get(":path"));
      for (const auto& record : records) {
        if (record.callback_uri != target || record.subscription == ex.id) continue;
        auto& sub = exchanges[record.subscription];
        if (std::find(ex.links.begin(), ex.links.end(), sub.id) == ex.links.end()) {
          ex.links.push_back(sub.id);
          sub.links.push_back(ex.id);
        }
        if (!ex.bound_operation && !ex.version_status && sub.bound_operation) {
          const auto& callbacks = sub.bound_operation->operation->callbacks;
          const std::string method = ex.method();
          auto cb = std::find_if(callbacks.begin(), callbacks.end(),
                                 [&](const auto& op) { return op->method == method; });
          if (cb != callbacks.end()) {
            ex.bound_operation = BoundOperation{cb->get(), {}, true};
            std::erase_if(ex.findings, [](const Finding& f) {
              return f.rule == Rule::UNKNOWN_PATH || f.rule == Rule::METHOD_NOT_ALLOWED;
            });
          }
        }
      }
    }

    if (ex.request->body.empty()) continue;
    const auto body = validate::parse_json(ex.request->body);
    if (!body || !body->is_object()) continue;
    for (const auto& [name, value] : body->items()) {
      if (!options.callback_properties.count(name) || !value.is_string()) continue;
      auto uri = normalize_callback_uri(value.get<std::string>());
      if (!uri) continue;
      SubscriptionRecord record;
      record.subscription = ex.id;
      record.callback_uri = *uri;
      if (ex.response) record.resource_location = ex.response->headers.get("location");
      records.push_back(std::move(record));
    }
  }
  for (auto& ex : exchanges) std::sort(ex.links.begin(), ex.links.end());
  return records;
}

void augment_headers(HttpExchange& ex, const openapi::SpecIndex& index) {
  (void)index;
  for (auto side : {MessageDirection::Request, MessageDirection::Response}) {
    auto& msg = side == MessageDirection::Request ? ex.request : ex.response;
    if (!msg) continue;
    const auto frame = msg->first_frame;

    if (side == MessageDirection::Response && !msg->headers.has(":status")) {
      const bool noted = std::any_of(ex.augmentations.begin(), ex.augmentations.end(), [&](const AugmentationNote& n) {
        return n.header == ":status" && n.message == side;
      });
      if (!noted) {
        ex.augmentations.push_back({":status", AugmentSource::Unrecoverable, side, std::nullopt, ""});
        add_once(ex, make_finding(Rule::HEADERS_INCOMPLETE, Severity::Warning, frame,
                                  "response :status not recoverable; response not validated"));
      }
    }

    if (msg->body.empty() || msg->headers.has("content-type")) continue;
    const bool noted = std::any_of(ex.augmentations.begin(), ex.augmentations.end(), [&](const AugmentationNote& n) {
      return n.header == "content-type" && n.message == side;
    });
    if (noted) continue;

    const bool body_is_json = validate::parse_json(msg->body).has_value();
    std::optional<std::string> value;
    AugmentSource source = AugmentSource::Unrecoverable;
    // The sniffed type wins unless the operation's single declared type is a
    // more specific type for the same body, e.g. application/3gppHal+json.
    if (const auto* content = declared_content(ex, side); content && content->size() == 1) {
      const std::string& declared = content->begin()->first;
      if (body_is_json == is_json_media_type(declared) && declared != "application/json") {
        value = declared;
        source = AugmentSource::SpecDefault;
      }
    }
    if (!value && body_is_json) {
      value = "application/json";
      source = AugmentSource::ContentSniff;
    }

    ex.augmentations.push_back({"content-type", source, side, std::nullopt, value.value_or("")});
    if (value) {
      msg->headers.fields.push_back({"content-type", *value});
      add_once(ex, make_finding(Rule::HEADERS_INCOMPLETE, Severity::Info, frame,
                                std::string(side == MessageDirection::Request ? "request" : "response") +
                                    " content-type missing; assumed " + *value + " (" +
                                    std::string(to_string(source)) + ")"));
    } else {
      add_once(ex, make_finding(Rule::HEADERS_INCOMPLETE, Severity::Warning, frame,
                                std::string(side == MessageDirection::Request ? "request" : "response") +
                                    " content-type missing and not inferable; body not validated"));
    }
  }
}

std::vector<HttpExchange> correlate(std::vector<HttpMessage> messages, const openapi::SpecIndex& index,
                                    const CorrelatorOptions& options) {
  auto exchanges = pair_exchanges(std::move(messages));
  for (auto& ex : exchanges) match_operation(ex, index);
  link_subscriptions(exchanges, options);
  for (auto& ex : exchanges) augment_headers(ex, index);
  return exchanges;
}

}  // namespace sbilint::correlate
