#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbilint/capture/pcap.hpp"

namespace sbilint::capture {

/// Bytes delivered in one direction of a TCP connection, in sequence order.
struct DirectionalBytes {
  struct FrameRun {
    std::size_t offset;  // first delivered byte of the run
    std::uint64_t frame;
  };
  /// A hole in the sequence space. `offset` is the delivered-byte offset at
  /// which the missing range would have been.
  struct Gap {
    std::size_t offset;
    std::uint64_t length;
  };

  std::vector<std::uint8_t> bytes;
  std::vector<FrameRun> frames;
  std::vector<Gap> gaps;
  std::vector<std::string> anomalies;
  bool syn_seen = false;
  bool fin_seen = false;

  /// Capture frame number that delivered the byte at `offset`.
  std::uint64_t frame_at(std::size_t offset) const;

  /// Contiguous delivered ranges [begin, end) split at gaps.
  std::vector<std::pair<std::size_t, std::size_t>> chunks() const;
};

enum class Side : std::uint8_t { ClientToServer = 0, ServerToClient = 1 };

struct TcpStream {
  std::uint32_t stream_id = 0;  // order of first appearance, from 0
  Endpoint client;
  Endpoint server;
  /// True when the client was identified by its SYN; otherwise the sender of
  /// the first captured packet is assumed to be the client.
  bool initiator_known = false;
  DirectionalBytes directions[2];

  DirectionalBytes& dir(Side s) { return directions[static_cast<int>(s)]; }
  const DirectionalBytes& dir(Side s) const { return directions[static_cast<int>(s)]; }
};

/// Reassembles every TCP connection. Retransmitted bytes are deduplicated and
/// the first-arrived copy wins; conflicting retransmissions are noted as
/// anomalies. Holes are recorded as gaps once the capture ends.
std::vector<TcpStream> reassemble_tcp(std::span<const CapturePacket> packets);

}  // namespace sbilint::capture
