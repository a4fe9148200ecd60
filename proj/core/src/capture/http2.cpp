#include "sbilint/capture/http2.hpp"

#include <algorithm>

namespace sbilint::capture {

namespace {

struct FrameHeader {
  std::uint32_t length;
  std::uint8_t type;
  std::uint8_t flags;
  std::uint32_t stream_id;
  bool reserved_bit;
};

FrameHeader read_header(const std::uint8_t* p) {
  FrameHeader h;
  h.length = (std::uint32_t{p[0]} << 16) | (std::uint32_t{p[1]} << 8) | p[2];
  h.type = p[3];
  h.flags = p[4];
  h.reserved_bit = (p[5] & 0x80) != 0;
  h.stream_id = ((std::uint32_t{p[5]} & 0x7f) << 24) | (std::uint32_t{p[6]} << 16) | (std::uint32_t{p[7]} << 8) | p[8];
  return h;
}

/// Structural plausibility used only by the alignment heuristic.
bool plausible(const FrameHeader& h) {
  if (h.reserved_bit || h.type > 0x9) return false;
  switch (static_cast<FrameType>(h.type)) {
    case FrameType::Data:
    case FrameType::Headers:
    case FrameType::Continuation:
    case FrameType::RstStream:
    case FrameType::PushPromise:
    case FrameType::Priority:
      if (h.stream_id == 0) return false;
      break;
    case FrameType::Settings:
    case FrameType::Ping:
    case FrameType::Goaway:
      if (h.stream_id != 0) return false;
      break;
    default:
      break;
  }
  switch (static_cast<FrameType>(h.type)) {
    case FrameType::Settings: return h.length % 6 == 0;
    case FrameType::Ping: return h.length == 8;
    case FrameType::Priority: return h.length == 5;
    case FrameType::RstStream: return h.length == 4;
    case FrameType::WindowUpdate: return h.length == 4;
    case FrameType::Goaway: return h.length >= 8;
    default: return true;
  }
}

FrameType classify(std::uint8_t code) {
  return code <= 0x9 ? static_cast<FrameType>(code) : FrameType::Unknown;
}

}  // namespace

std::string_view to_string(FrameType type) {
  switch (type) {
    case FrameType::Data: return "DATA";
    case FrameType::Headers: return "HEADERS";
    case FrameType::Priority: return "PRIORITY";
    case FrameType::RstStream: return "RST_STREAM";
    case FrameType::Settings: return "SETTINGS";
    case FrameType::PushPromise: return "PUSH_PROMISE";
    case FrameType::Ping: return "PING";
    case FrameType::Goaway: return "GOAWAY";
    case FrameType::WindowUpdate: return "WINDOW_UPDATE";
    case FrameType::Continuation: return "CONTINUATION";
    case FrameType::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<H2Start> detect_h2(std::span<const std::uint8_t> bytes, int min_chain) {
  if (bytes.size() >= kClientPreface.size() &&
      std::equal(kClientPreface.begin(), kClientPreface.end(), bytes.begin())) {
    return H2Start{kClientPreface.size(), true};
  }
  for (std::size_t start = 0; start + kFrameHeaderSize <= bytes.size(); ++start) {
    std::size_t pos = start;
    int chained = 0;
    while (pos + kFrameHeaderSize <= bytes.size() && chained < min_chain) {
      auto h = read_header(bytes.data() + pos);
      if (!plausible(h) || h.length > bytes.size() - pos - kFrameHeaderSize) break;
      pos += kFrameHeaderSize + h.length;
      ++chained;
    }
    if (chained >= min_chain) return H2Start{start, false};
    if (start == 0 && chained > 0 && pos == bytes.size()) return H2Start{0, false};
  }
  return std::nullopt;
}

FrameParseResult parse_frames(std::span<const std::uint8_t> bytes, std::size_t start, Side direction,
                              const DirectionalBytes* provenance, std::size_t base_offset) {
  FrameParseResult result;
  std::size_t pos = start;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < kFrameHeaderSize) {
      result.desync = true;
      result.notes.push_back("FramingDesync: " + std::to_string(bytes.size() - pos) +
                             " trailing byte(s) do not form a frame header at offset " +
                             std::to_string(base_offset + pos));
      break;
    }
    auto h = read_header(bytes.data() + pos);
    if (h.length > bytes.size() - pos - kFrameHeaderSize) {
      result.desync = true;
      result.notes.push_back("FramingDesync: frame at offset " + std::to_string(base_offset + pos) + " declares " +
                             std::to_string(h.length) + " bytes but only " +
                             std::to_string(bytes.size() - pos - kFrameHeaderSize) + " remain");
      break;
    }
    Http2Frame frame;
    frame.type_code = h.type;
    frame.type = classify(h.type);
    frame.flags = h.flags;
    frame.stream_id = h.stream_id;
    frame.direction = direction;
    frame.offset = base_offset + pos;
    auto payload_begin = bytes.begin() + static_cast<std::ptrdiff_t>(pos + kFrameHeaderSize);
    frame.payload.assign(payload_begin, payload_begin + h.length);
    const std::size_t last_byte = base_offset + pos + kFrameHeaderSize + h.length - 1;
    frame.origin_frame_number = provenance ? provenance->frame_at(last_byte) : 0;
    result.frames.push_back(std::move(frame));
    pos += kFrameHeaderSize + h.length;
  }
  return result;
}

}  // namespace sbilint::capture
