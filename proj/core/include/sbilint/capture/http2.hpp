#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbilint/capture/hpack.hpp"
#include "sbilint/capture/tcp.hpp"

namespace sbilint::capture {

inline constexpr std::string_view kClientPreface = "PRI * HTTP/2.0\r\n\r\nSM\r\n\r\n";
inline constexpr std::size_t kFrameHeaderSize = 9;
inline constexpr int kDefaultDetectionChain = 3;

enum class FrameType : std::uint8_t {
  Data = 0x0,
  Headers = 0x1,
  Priority = 0x2,
  RstStream = 0x3,
  Settings = 0x4,
  PushPromise = 0x5,
  Ping = 0x6,
  Goaway = 0x7,
  WindowUpdate = 0x8,
  Continuation = 0x9,
  Unknown = 0xff,
};

std::string_view to_string(FrameType type);

namespace frame_flags {
inline constexpr std::uint8_t kEndStream = 0x1;
inline constexpr std::uint8_t kAck = 0x1;
inline constexpr std::uint8_t kEndHeaders = 0x4;
inline constexpr std::uint8_t kPadded = 0x8;
inline constexpr std::uint8_t kPriority = 0x20;
}  // namespace frame_flags

struct Http2Frame {
  FrameType type = FrameType::Unknown;
  std::uint8_t type_code = 0;
  std::uint8_t flags = 0;
  std::uint32_t stream_id = 0;
  std::vector<std::uint8_t> payload;
  std::uint64_t origin_frame_number = 0;  // capture frame holding the frame's last byte
  Side direction = Side::ClientToServer;
  std::size_t offset = 0;  // offset of the frame header in the directional bytes
  bool resync = false;     // first frame after a capture gap or a mid-stream start
};

struct H2Start {
  std::size_t offset = 0;
  bool preface = false;  // the client connection preface was found at offset 0
};

/// Locates the first HTTP/2 frame boundary. A client preface at offset 0 wins;
/// otherwise the first offset from which at least `min_chain` plausible frames
/// chain back to back (or a shorter chain that starts at 0 and ends exactly at
/// the end of `bytes`).
std::optional<H2Start> detect_h2(std::span<const std::uint8_t> bytes, int min_chain = kDefaultDetectionChain);

struct FrameParseResult {
  std::vector<Http2Frame> frames;
  std::vector<std::string> notes;
  bool desync = false;
};

/// Parses frames from `start` to the end of `bytes`. Stops with a
/// FramingDesync note when a frame header overruns the remaining bytes.
/// `base_offset` shifts offsets when `bytes` is a chunk of a larger stream;
/// `provenance` (optional) maps offsets to capture frame numbers.
FrameParseResult parse_frames(std::span<const std::uint8_t> bytes, std::size_t start, Side direction,
                              const DirectionalBytes* provenance = nullptr, std::size_t base_offset = 0);

}  // namespace sbilint::capture
