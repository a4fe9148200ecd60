#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capture_builder.hpp"
#include "checks.hpp"
#include "fixture_capture.hpp"
#include "sbilint/capture/messages.hpp"
#include "sbilint/capture/pcap.hpp"
#include "sbilint/openapi/compiler.hpp"

namespace sbilint::testing {

/// A schema compiled from #/components/schemas/Root of a one-file corpus.
/// Extra named schemas go in `components`.
struct CompiledSchema {
  explicit CompiledSchema(const nlohmann::json& root, const nlohmann::json& components = nlohmann::json::object()) {
    nlohmann::json doc{
        {"openapi", "3.0.0"}, {"info", {{"title", "t"}, {"version", "1"}}}, {"paths", nlohmann::json::object()}};
    doc["components"]["schemas"] = components;
    doc["components"]["schemas"]["Root"] = root;
    compiler = std::make_unique<openapi::CorpusCompiler>(std::vector<openapi::SourceFile>{{"T.yaml", doc.dump()}});
    schema = &compiler->resolve_ref("#/components/schemas/Root", "T.yaml");
  }
  std::unique_ptr<openapi::CorpusCompiler> compiler;
  const openapi::Schema* schema = nullptr;
};

inline capture::DecodedCapture decode_description(const nlohmann::json& description) {
  const auto bytes = build_fixture_capture(description);
  return capture::decode_packets(capture::read_capture(bytes));
}

inline const openapi::SpecIndex& fixture_index() {
  static const auto index = openapi::load_spec_dir(fixture_dir() / "specs");
  return index;
}

}  // namespace sbilint::testing

namespace sbilint::testing {

/// A decoded message as the capture layer would hand it over.
inline capture::HttpMessage make_message(capture::MessageDirection direction,
                                         std::vector<capture::HeaderField> headers, std::string body = {},
                                         std::uint64_t frame = 1, std::uint32_t tcp_stream = 0,
                                         std::uint32_t h2_stream = 1) {
  capture::HttpMessage m;
  m.direction = direction;
  m.headers.fields = std::move(headers);
  m.body = std::move(body);
  m.first_frame = m.last_frame = frame;
  m.tcp_stream_id = tcp_stream;
  m.h2_stream_id = h2_stream;
  m.side = direction == capture::MessageDirection::Request ? capture::Side::ClientToServer
                                                             : capture::Side::ServerToClient;
  m.end_stream_seen = true;
  return m;
}

inline capture::HttpMessage request(const std::string& method, const std::string& path, std::string body = {},
                                    std::vector<capture::HeaderField> extra = {}, std::uint64_t frame = 1,
                                    std::uint32_t tcp_stream = 0, std::uint32_t h2_stream = 1,
                                    const std::string& authority = "10.0.0.10:8080") {
  std::vector<capture::HeaderField> h{{":method", method}, {":scheme", "http"}, {":authority", authority}, {":path", path}};
  h.insert(h.end(), extra.begin(), extra.end());
  return make_message(capture::MessageDirection::Request, std::move(h), std::move(body), frame, tcp_stream, h2_stream);
}

inline capture::HttpMessage response(int status, std::string body = {}, std::vector<capture::HeaderField> extra = {},
                                     std::uint64_t frame = 2, std::uint32_t tcp_stream = 0,
                                     std::uint32_t h2_stream = 1) {
  std::vector<capture::HeaderField> h{{":status", std::to_string(status)}};
  h.insert(h.end(), extra.begin(), extra.end());
  return make_message(capture::MessageDirection::Response, std::move(h), std::move(body), frame, tcp_stream,
                      h2_stream);
}

}  // namespace sbilint::testing
