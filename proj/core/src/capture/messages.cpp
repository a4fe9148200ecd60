#include "sbilint/capture/messages.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace sbilint::capture {

namespace {

constexpr std::uint16_t kSettingsHeaderTableSize = 0x1;

struct PendingBlock {
  std::vector<std::uint8_t> bytes;
  bool end_stream = false;
  bool push_promise = false;
  std::uint64_t first_frame = 0;
};

struct OpenMessage {
  HttpMessage message;
  bool has_data = false;
};

/// Strips padding (and the priority block for HEADERS). Returns false when
/// the declared padding does not fit.
bool fragment_of(const Http2Frame& frame, std::span<const std::uint8_t>& out, std::size_t extra_prefix) {
  std::span<const std::uint8_t> p(frame.payload);
  std::size_t pad = 0;
  if (frame.flags & frame_flags::kPadded) {
    if (p.empty()) return false;
    pad = p[0];
    p = p.subspan(1);
  }
  if (extra_prefix > p.size() || pad > p.size() - extra_prefix) return false;
  out = p.subspan(extra_prefix, p.size() - extra_prefix - pad);
  return true;
}

std::string stream_label(const TcpStream& stream) {
  return "tcp stream " + std::to_string(stream.stream_id) + " (" + stream.client.to_string() + " -> " +
         stream.server.to_string() + ")";
}

}  // namespace

std::vector<HttpMessage> assemble_messages(std::span<const Http2Frame> frames, const TcpStream& stream,
                                           ConnectionState& state) {
  std::vector<HttpMessage> out;
  std::map<std::pair<int, std::uint32_t>, PendingBlock> pending;
  std::map<std::pair<int, std::uint32_t>, OpenMessage> open;

  auto finish = [&](std::pair<int, std::uint32_t> key) {
    auto it = open.find(key);
    if (it == open.end()) return;
    out.push_back(std::move(it->second.message));
    open.erase(it);
  };

  auto new_message = [&](const Http2Frame& frame, std::uint64_t first_frame) {
    HttpMessage m;
    m.h2_stream_id = frame.stream_id;
    m.tcp_stream_id = stream.stream_id;
    m.side = frame.direction;
    m.src = frame.direction == Side::ClientToServer ? stream.client : stream.server;
    m.dst = frame.direction == Side::ClientToServer ? stream.server : stream.client;
    m.first_frame = first_frame;
    m.last_frame = frame.origin_frame_number;
    m.direction = frame.direction == Side::ClientToServer ? MessageDirection::Request : MessageDirection::Response;
    return m;
  };

  auto complete_block = [&](const Http2Frame& frame, PendingBlock block) {
    const int side = static_cast<int>(frame.direction);
    HeaderList headers = decode_hpack(block.bytes, state.tables[side], state.degraded[side]);
    if (block.push_promise) return;
    const auto key = std::make_pair(side, frame.stream_id);

    auto existing = open.find(key);
    if (existing != open.end()) {
      // A second header block on an open message carries trailers.
      auto& msg = existing->second.message;
      msg.trailers = std::move(headers);
      msg.last_frame = frame.origin_frame_number;
      if (block.end_stream) {
        msg.end_stream_seen = true;
        finish(key);
      }
      return;
    }

    if (auto status = headers.get(":status"); status && !status->empty() && status->front() == '1') {
      return;  // informational response; the final response follows
    }
    OpenMessage om{new_message(frame, block.first_frame), false};
    if (headers.has(":method")) {
      om.message.direction = MessageDirection::Request;
    } else if (headers.has(":status")) {
      om.message.direction = MessageDirection::Response;
    }
    om.message.headers = std::move(headers);
    open.emplace(key, std::move(om));
    if (block.end_stream) {
      open[key].message.end_stream_seen = true;
      finish(key);
    }
  };

  for (const auto& frame : frames) {
    const int side = static_cast<int>(frame.direction);
    const auto key = std::make_pair(side, frame.stream_id);
    if (frame.resync) state.degraded[side] = true;

    switch (frame.type) {
      case FrameType::Settings: {
        if (frame.flags & frame_flags::kAck) break;
        auto& peer_table = state.tables[1 - side];
        for (std::size_t i = 0; i + 6 <= frame.payload.size(); i += 6) {
          const std::uint16_t id = static_cast<std::uint16_t>((frame.payload[i] << 8) | frame.payload[i + 1]);
          const std::uint32_t value = (std::uint32_t{frame.payload[i + 2]} << 24) |
                                      (std::uint32_t{frame.payload[i + 3]} << 16) |
                                      (std::uint32_t{frame.payload[i + 4]} << 8) | frame.payload[i + 5];
          if (id == kSettingsHeaderTableSize) {
            peer_table.set_protocol_max(value);
            if (value < peer_table.max_size()) peer_table.resize(value);
          }
        }
        break;
      }
      case FrameType::Headers:
      case FrameType::PushPromise: {
        std::span<const std::uint8_t> fragment;
        std::size_t prefix = 0;
        if (frame.type == FrameType::Headers && (frame.flags & frame_flags::kPriority)) prefix = 5;
        if (frame.type == FrameType::PushPromise) prefix = 4;
        if (!fragment_of(frame, fragment, prefix)) break;
        PendingBlock block;
        block.bytes.assign(fragment.begin(), fragment.end());
        block.end_stream = frame.type == FrameType::Headers && (frame.flags & frame_flags::kEndStream);
        block.push_promise = frame.type == FrameType::PushPromise;
        block.first_frame = frame.origin_frame_number;
        if (frame.flags & frame_flags::kEndHeaders) {
          complete_block(frame, std::move(block));
        } else {
          pending[key] = std::move(block);
        }
        break;
      }
      case FrameType::Continuation: {
        auto it = pending.find(key);
        if (it == pending.end()) break;  // fragment of a block that started before the capture
        it->second.bytes.insert(it->second.bytes.end(), frame.payload.begin(), frame.payload.end());
        if (frame.flags & frame_flags::kEndHeaders) {
          PendingBlock block = std::move(it->second);
          pending.erase(it);
          complete_block(frame, std::move(block));
        }
        break;
      }
      case FrameType::Data: {
        std::span<const std::uint8_t> fragment;
        if (!fragment_of(frame, fragment, 0)) break;
        auto it = open.find(key);
        if (it == open.end()) {
          OpenMessage om{new_message(frame, frame.origin_frame_number), false};
          om.message.headers.completeness = Completeness::Degraded;
          om.message.headers.notes.push_back("header block not captured");
          om.message.notes.push_back("DATA without captured HEADERS");
          it = open.emplace(key, std::move(om)).first;
        }
        auto& msg = it->second.message;
        msg.body.append(fragment.begin(), fragment.end());
        msg.last_frame = frame.origin_frame_number;
        it->second.has_data = true;
        if (frame.flags & frame_flags::kEndStream) {
          msg.end_stream_seen = true;
          finish(key);
        }
        break;
      }
      case FrameType::RstStream: {
        for (int s = 0; s < 2; ++s) {
          auto k = std::make_pair(s, frame.stream_id);
          if (auto it = open.find(k); it != open.end()) {
            it->second.message.notes.push_back("stream reset by RST_STREAM");
            finish(k);
          }
        }
        break;
      }
      default:
        break;
    }
  }

  for (auto& [key, om] : open) {
    om.message.notes.push_back("END_STREAM not seen before end of capture");
    out.push_back(std::move(om.message));
  }
  return out;
}

DecodedCapture decode_packets(const CaptureReadResult& capture, const DecodeOptions& options) {
  DecodedCapture result;
  result.truncated = capture.truncated;
  result.notes = capture.warnings;

  auto streams = reassemble_tcp(capture.packets);
  result.tcp_streams = streams.size();

  for (const auto& stream : streams) {
    const std::string label = stream_label(stream);
    for (Side side : {Side::ClientToServer, Side::ServerToClient}) {
      const auto& dir = stream.dir(side);
      for (const auto& a : dir.anomalies) result.notes.push_back(label + ": " + a);
      for (const auto& g : dir.gaps) {
        result.notes.push_back(label + ": " + std::to_string(g.length) + " byte(s) missing " +
                               (side == Side::ClientToServer ? "client->server" : "server->client") +
                               " at offset " + std::to_string(g.offset));
      }
    }

    auto starts_tls = [&](Side side) {
      const auto& b = stream.dir(side).bytes;
      return b.size() >= 2 && b[0] == 0x16 && b[1] == 0x03;
    };
    if (starts_tls(Side::ClientToServer) || starts_tls(Side::ServerToClient)) {
      result.notes.push_back(label + ": TLS traffic skipped");
      continue;
    }

    std::vector<Http2Frame> frames;
    bool preface = false;
    bool any_h2 = false;
    for (Side side : {Side::ClientToServer, Side::ServerToClient}) {
      const auto& dir = stream.dir(side);
      const auto chunks = dir.chunks();
      for (std::size_t c = 0; c < chunks.size(); ++c) {
        auto [begin, end] = chunks[c];
        std::span<const std::uint8_t> bytes(dir.bytes.data() + begin, end - begin);
        auto start = detect_h2(bytes, options.detection_chain);
        if (!start) {
          if (c == 0 && !bytes.empty()) {
            result.notes.push_back(label + ": " + (side == Side::ClientToServer ? "client" : "server") +
                                   " bytes are not HTTP/2");
          }
          continue;
        }
        any_h2 = true;
        if (c == 0 && side == Side::ClientToServer && start->preface && begin == 0 &&
            (dir.gaps.empty() || dir.gaps.front().offset > 0)) {
          preface = true;
        }
        auto parsed = parse_frames(bytes, start->offset, side, &dir, begin);
        for (const auto& n : parsed.notes) result.notes.push_back(label + ": " + n);
        const bool leading_gap = !dir.gaps.empty() && dir.gaps.front().offset == begin;
        if (!parsed.frames.empty() && (c > 0 || leading_gap || (start->offset > 0 && !start->preface))) {
          parsed.frames.front().resync = true;
        }
        frames.insert(frames.end(), std::make_move_iterator(parsed.frames.begin()),
                      std::make_move_iterator(parsed.frames.end()));
      }
    }
    if (!any_h2) continue;
    ++result.http2_streams;

    std::stable_sort(frames.begin(), frames.end(), [](const Http2Frame& a, const Http2Frame& b) {
      return std::tie(a.origin_frame_number, a.direction, a.offset) <
             std::tie(b.origin_frame_number, b.direction, b.offset);
    });

    ConnectionState state;
    state.degraded[0] = state.degraded[1] = !preface;
    if (!preface) result.notes.push_back(label + ": connection start not captured; HPACK decoding is best effort");
    auto messages = assemble_messages(frames, stream, state);
    result.messages.insert(result.messages.end(), std::make_move_iterator(messages.begin()),
                           std::make_move_iterator(messages.end()));
  }

  std::stable_sort(result.messages.begin(), result.messages.end(), [](const HttpMessage& a, const HttpMessage& b) {
    return std::tie(a.first_frame, a.tcp_stream_id, a.h2_stream_id, a.side) <
           std::tie(b.first_frame, b.tcp_stream_id, b.h2_stream_id, b.side);
  });
  return result;
}

DecodedCapture decode_capture_file(const std::filesystem::path& file, const DecodeOptions& options) {
  return decode_packets(read_capture(file), options);
}

}  // namespace sbilint::capture
