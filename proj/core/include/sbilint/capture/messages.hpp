#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbilint/capture/hpack.hpp"
#include "sbilint/capture/http2.hpp"
#include "sbilint/capture/pcap.hpp"
#include "sbilint/capture/tcp.hpp"

namespace sbilint::capture {

enum class MessageDirection { Request, Response };

struct HttpMessage {
  MessageDirection direction = MessageDirection::Request;
  HeaderList headers;
  std::string body;  // concatenated DATA payloads, padding removed
  std::optional<HeaderList> trailers;
  bool end_stream_seen = false;
  std::uint32_t h2_stream_id = 0;
  std::uint32_t tcp_stream_id = 0;
  Side side = Side::ClientToServer;
  Endpoint src;
  Endpoint dst;
  std::uint64_t first_frame = 0;
  std::uint64_t last_frame = 0;
  std::vector<std::string> notes;
};

/// HPACK and SETTINGS state for one connection.
struct ConnectionState {
  DynamicTable tables[2];      // decoder table per sending side
  bool degraded[2] = {false, false};  // mid-stream start or a gap was seen
};

/// Builds messages from the frames of one TCP connection, given in capture
/// order across both directions. Header blocks are decoded in that order, so
/// each side's dynamic table evolves exactly as the sender's encoder did.
std::vector<HttpMessage> assemble_messages(std::span<const Http2Frame> frames, const TcpStream& stream,
                                           ConnectionState& state);

struct DecodeOptions {
  int detection_chain = kDefaultDetectionChain;
};

struct DecodedCapture {
  std::vector<HttpMessage> messages;  // ordered by first frame
  std::vector<std::string> notes;
  std::size_t tcp_streams = 0;
  std::size_t http2_streams = 0;
  bool truncated = false;
};

/// Runs TCP reassembly, HTTP/2 detection, framing and HPACK over a capture.
DecodedCapture decode_packets(const CaptureReadResult& capture, const DecodeOptions& options = {});

/// read_capture followed by decode_packets.
DecodedCapture decode_capture_file(const std::filesystem::path& file, const DecodeOptions& options = {});

}  // namespace sbilint::capture
