#include "sbilint/capture/tcp.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace sbilint::capture {

namespace {

constexpr std::int64_t kMaxDirectionBytes = std::int64_t{1} << 31;

struct Segment {
  std::uint32_t seq;
  std::span<const std::uint8_t> payload;
  std::uint64_t frame;
};

struct DirectionBuild {
  std::optional<std::uint32_t> syn_seq;
  std::vector<Segment> segments;
  bool fin = false;
  bool rst = false;
};

struct ConnectionBuild {
  TcpStream stream;
  DirectionBuild dirs[2];
};

/// Whether a SYN with `syn_seq` can open the byte stream already collected
/// for this direction: the connection is still open and every known segment
/// lies at or after its first byte.
bool continues(const ConnectionBuild& conn, const DirectionBuild& dir, std::uint32_t syn_seq) {
  if (dir.syn_seq) return *dir.syn_seq == syn_seq;
  if (conn.dirs[0].fin || conn.dirs[1].fin || conn.dirs[0].rst || conn.dirs[1].rst) return false;
  const std::uint32_t first = syn_seq + 1;
  return std::all_of(dir.segments.begin(), dir.segments.end(), [&](const Segment& seg) {
    const auto ahead = static_cast<std::uint32_t>(seg.seq - first);
    return ahead < static_cast<std::uint32_t>(kMaxDirectionBytes);
  });
}

struct Piece {
  std::int64_t start;
  std::int64_t end;
  std::uint64_t frame;
};

void assemble_direction(const DirectionBuild& in, DirectionalBytes& out) {
  out.syn_seen = in.syn_seq.has_value();
  out.fin_seen = in.fin;
  if (in.segments.empty()) return;

  const std::uint32_t ref = in.syn_seq ? *in.syn_seq + 1 : in.segments.front().seq;
  auto rel = [ref](std::uint32_t seq) { return static_cast<std::int64_t>(static_cast<std::int32_t>(seq - ref)); };
  std::int64_t base = 0;
  if (!in.syn_seq) {
    base = rel(in.segments.front().seq);
    for (const auto& s : in.segments) base = std::min(base, rel(s.seq));
  }

  std::vector<std::uint8_t> data;
  std::map<std::int64_t, std::int64_t> filled;  // start -> end, disjoint
  std::vector<Piece> pieces;
  std::uint64_t conflicts = 0;
  std::uint64_t first_conflict_frame = 0;

  for (const auto& seg : in.segments) {
    std::int64_t start = rel(seg.seq) - base;
    std::int64_t end = start + static_cast<std::int64_t>(seg.payload.size());
    std::size_t skip = 0;
    if (start < 0) {
      skip = static_cast<std::size_t>(-start);
      start = 0;
    }
    if (end <= start) continue;
    if (end > kMaxDirectionBytes) {
      out.anomalies.push_back("segment in frame " + std::to_string(seg.frame) + " beyond supported stream size; dropped");
      continue;
    }
    if (static_cast<std::int64_t>(data.size()) < end) data.resize(static_cast<std::size_t>(end));
    auto byte_at = [&](std::int64_t pos) { return seg.payload[skip + static_cast<std::size_t>(pos - start)]; };

    // Walk [start, end) and split into already-filled and fresh ranges.
    std::int64_t cursor = start;
    auto it = filled.upper_bound(start);
    if (it != filled.begin()) --it;
    while (cursor < end) {
      while (it != filled.end() && it->second <= cursor) ++it;
      std::int64_t next_filled = (it == filled.end()) ? end : std::max(cursor, it->first);
      if (next_filled > cursor) {
        std::int64_t fresh_end = std::min(end, next_filled);
        for (std::int64_t p = cursor; p < fresh_end; ++p) data[static_cast<std::size_t>(p)] = byte_at(p);
        pieces.push_back({cursor, fresh_end, seg.frame});
        cursor = fresh_end;
        continue;
      }
      std::int64_t covered_end = std::min(end, it->second);
      for (std::int64_t p = cursor; p < covered_end; ++p) {
        if (data[static_cast<std::size_t>(p)] != byte_at(p)) {
          if (conflicts++ == 0) first_conflict_frame = seg.frame;
          break;
        }
      }
      cursor = covered_end;
    }

    // Record the new coverage and merge touching intervals.
    auto [pos, inserted] = filled.emplace(start, end);
    if (!inserted) pos->second = std::max(pos->second, end);
    if (pos != filled.begin()) {
      auto prev = std::prev(pos);
      if (prev->second >= pos->first) {
        prev->second = std::max(prev->second, pos->second);
        filled.erase(pos);
        pos = prev;
      }
    }
    auto next = std::next(pos);
    while (next != filled.end() && next->first <= pos->second) {
      pos->second = std::max(pos->second, next->second);
      next = filled.erase(next);
    }
  }

  if (conflicts > 0) {
    out.anomalies.push_back(std::to_string(conflicts) +
                            " retransmitted segment(s) with altered bytes (first in frame " +
                            std::to_string(first_conflict_frame) + "); first-arrived bytes kept");
  }

  // Deliver intervals in order; holes between them become gaps.
  std::map<std::int64_t, std::size_t> delivered_start;  // interval start -> delivered offset
  std::int64_t prev_end = 0;
  for (const auto& [start, end] : filled) {
    if (start > prev_end) {
      out.gaps.push_back({out.bytes.size(), static_cast<std::uint64_t>(start - prev_end)});
    }
    delivered_start[start] = out.bytes.size();
    out.bytes.insert(out.bytes.end(), data.begin() + start, data.begin() + end);
    prev_end = end;
  }

  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.start < b.start; });
  for (const auto& piece : pieces) {
    auto interval = std::prev(delivered_start.upper_bound(piece.start));
    std::size_t offset = interval->second + static_cast<std::size_t>(piece.start - interval->first);
    if (!out.frames.empty() && out.frames.back().frame == piece.frame) continue;
    out.frames.push_back({offset, piece.frame});
  }
}

}  // namespace

std::uint64_t DirectionalBytes::frame_at(std::size_t offset) const {
  auto it = std::upper_bound(frames.begin(), frames.end(), offset,
                             [](std::size_t value, const FrameRun& run) { return value < run.offset; });
  if (it == frames.begin()) return frames.empty() ? 0 : frames.front().frame;
  return std::prev(it)->frame;
}

std::vector<std::pair<std::size_t, std::size_t>> DirectionalBytes::chunks() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 0;
  for (const auto& gap : gaps) {
    if (gap.offset > begin) out.emplace_back(begin, gap.offset);
    begin = gap.offset;
  }
  if (bytes.size() > begin) out.emplace_back(begin, bytes.size());
  return out;
}

std::vector<TcpStream> reassemble_tcp(std::span<const CapturePacket> packets) {
  std::vector<ConnectionBuild> connections;
  std::map<std::pair<Endpoint, Endpoint>, std::size_t> active;

  for (const auto& packet : packets) {
    auto key = std::minmax(packet.src, packet.dst);
    const bool syn = (packet.flags & tcp_flags::kSyn) != 0;
    const bool ack = (packet.flags & tcp_flags::kAck) != 0;

    auto found = active.find(key);
    if (found != active.end() && syn) {
      auto& conn = connections[found->second];
      // SYN comes from the initiator, SYN-ACK from the responder.
      const Endpoint& initiator = ack ? packet.dst : packet.src;
      if (!conn.stream.initiator_known && conn.stream.client != initiator) {
        std::swap(conn.stream.client, conn.stream.server);
        std::swap(conn.dirs[0], conn.dirs[1]);
      }
      conn.stream.initiator_known = true;
      const auto& dir = conn.dirs[packet.src == conn.stream.client ? 0 : 1];
      if (!ack && !continues(conn, dir, packet.seq)) {
        // A fresh SYN on a used 4-tuple opens a new connection.
        active.erase(found);
        found = active.end();
      }
    }
    if (found == active.end()) {
      ConnectionBuild conn;
      conn.stream.stream_id = static_cast<std::uint32_t>(connections.size());
      if (syn && ack) {
        conn.stream.client = packet.dst;
        conn.stream.server = packet.src;
        conn.stream.initiator_known = true;
      } else {
        conn.stream.client = packet.src;
        conn.stream.server = packet.dst;
        conn.stream.initiator_known = syn;
      }
      connections.push_back(std::move(conn));
      found = active.emplace(key, connections.size() - 1).first;
    }

    auto& conn = connections[found->second];
    auto& dir = conn.dirs[packet.src == conn.stream.client ? 0 : 1];
    std::uint32_t data_seq = packet.seq;
    if (syn) {
      if (!dir.syn_seq) dir.syn_seq = packet.seq;
      data_seq = packet.seq + 1;
    }
    if (packet.flags & tcp_flags::kFin) dir.fin = true;
    if (packet.flags & tcp_flags::kRst) dir.rst = true;
    if (!packet.payload.empty()) dir.segments.push_back({data_seq, packet.payload, packet.frame_number});
  }

  std::vector<TcpStream> out;
  out.reserve(connections.size());
  for (auto& conn : connections) {
    assemble_direction(conn.dirs[0], conn.stream.directions[0]);
    assemble_direction(conn.dirs[1], conn.stream.directions[1]);
    out.push_back(std::move(conn.stream));
  }
  return out;
}

}  // namespace sbilint::capture
