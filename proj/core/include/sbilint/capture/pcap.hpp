#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbilint::capture {

class CaptureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// IPv4 addresses are stored as IPv4-mapped IPv6 (::ffff:a.b.c.d).
struct Endpoint {
  std::array<std::uint8_t, 16> address{};
  std::uint16_t port = 0;

  bool is_v4() const noexcept;
  std::string to_string() const;

  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

namespace tcp_flags {
inline constexpr std::uint8_t kFin = 0x01;
inline constexpr std::uint8_t kSyn = 0x02;
inline constexpr std::uint8_t kRst = 0x04;
inline constexpr std::uint8_t kAck = 0x10;
}  // namespace tcp_flags

struct CapturePacket {
  std::uint64_t frame_number = 0;  // 1-based record index in the file
  std::int64_t ts_seconds = 0;
  std::uint32_t ts_nanos = 0;
  Endpoint src;
  Endpoint dst;
  std::uint32_t seq = 0;
  std::uint8_t flags = 0;
  std::vector<std::uint8_t> payload;
};

struct CaptureReadResult {
  std::vector<CapturePacket> packets;
  std::vector<std::string> warnings;
  bool truncated = false;
};

/// Reads classic PCAP (either byte order, usec or nsec) or PCAPNG. Only
/// IP/TCP packets are returned. Throws CaptureError for unreadable or
/// unrecognized files; a file cut short yields the packets read so far and
/// `truncated` set.
CaptureReadResult read_capture(const std::filesystem::path& file);
CaptureReadResult read_capture(std::span<const std::uint8_t> bytes);

enum class FrameDecode { Tcp, NotTcp, IpFragment, UnsupportedLink };

/// Decodes one link-layer frame into `packet` (addresses, TCP fields,
/// payload).
FrameDecode decode_link_frame(std::uint32_t link_type, std::span<const std::uint8_t> frame, CapturePacket& packet);

}  // namespace sbilint::capture
