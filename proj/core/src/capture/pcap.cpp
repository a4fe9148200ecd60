#include "sbilint/capture/pcap.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

namespace sbilint::capture {

namespace {

constexpr std::uint32_t kPcapMagicMicros = 0xa1b2c3d4;
constexpr std::uint32_t kPcapMagicNanos = 0xa1b23c4d;
constexpr std::uint32_t kPcapngSectionHeader = 0x0a0d0d0a;
constexpr std::uint32_t kPcapngByteOrderMagic = 0x1a2b3c4d;

std::uint16_t be16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }
std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}
std::uint32_t le32(const std::uint8_t* p) {
  return (std::uint32_t{p[3]} << 24) | (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[1]} << 8) | p[0];
}

class ByteOrder {
 public:
  explicit ByteOrder(bool swapped) : big_(swapped) {}
  std::uint16_t u16(const std::uint8_t* p) const {
    return big_ ? be16(p) : static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t u32(const std::uint8_t* p) const { return big_ ? be32(p) : le32(p); }

 private:
  bool big_;
};

constexpr std::uint16_t kEtherIpv4 = 0x0800;
constexpr std::uint16_t kEtherIpv6 = 0x86dd;
constexpr std::uint16_t kEtherVlan = 0x8100;
constexpr std::uint16_t kEtherQinQ = 0x88a8;

FrameDecode decode_tcp(std::span<const std::uint8_t> seg, CapturePacket& packet) {
  if (seg.size() < 20) return FrameDecode::NotTcp;
  const std::size_t header_len = static_cast<std::size_t>(seg[12] >> 4) * 4;
  if (header_len < 20 || header_len > seg.size()) return FrameDecode::NotTcp;
  packet.src.port = be16(&seg[0]);
  packet.dst.port = be16(&seg[2]);
  packet.seq = be32(&seg[4]);
  packet.flags = seg[13];
  packet.payload.assign(seg.begin() + static_cast<std::ptrdiff_t>(header_len), seg.end());
  return FrameDecode::Tcp;
}

FrameDecode decode_ipv4(std::span<const std::uint8_t> ip, CapturePacket& packet) {
  if (ip.size() < 20 || (ip[0] >> 4) != 4) return FrameDecode::NotTcp;
  const std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
  const std::size_t total = be16(&ip[2]);
  if (ihl < 20 || ihl > ip.size()) return FrameDecode::NotTcp;
  // Ethernet padding may extend the frame past the IP total length.
  const std::size_t end = (total >= ihl && total <= ip.size()) ? total : ip.size();
  const std::uint16_t frag = be16(&ip[6]);
  if (ip[9] != 6) return FrameDecode::NotTcp;
  if ((frag & 0x2000) != 0 || (frag & 0x1fff) != 0) return FrameDecode::IpFragment;
  packet.src.address = {};
  packet.dst.address = {};
  packet.src.address[10] = packet.src.address[11] = 0xff;
  packet.dst.address[10] = packet.dst.address[11] = 0xff;
  std::copy(&ip[12], &ip[16], packet.src.address.begin() + 12);
  std::copy(&ip[16], &ip[20], packet.dst.address.begin() + 12);
  return decode_tcp(ip.subspan(ihl, end - ihl), packet);
}

FrameDecode decode_ipv6(std::span<const std::uint8_t> ip, CapturePacket& packet) {
  if (ip.size() < 40 || (ip[0] >> 4) != 6) return FrameDecode::NotTcp;
  std::copy(&ip[8], &ip[24], packet.src.address.begin());
  std::copy(&ip[24], &ip[40], packet.dst.address.begin());
  std::size_t payload_len = be16(&ip[4]);
  std::size_t offset = 40;
  std::uint8_t next = ip[6];
  const std::size_t end = std::min(ip.size(), 40 + payload_len);
  while (true) {
    if (next == 6) return decode_tcp(ip.subspan(offset, end - std::min(end, offset)), packet);
    if (next == 44) return FrameDecode::IpFragment;
    if (next == 0 || next == 43 || next == 60) {
      if (offset + 8 > end) return FrameDecode::NotTcp;
      std::uint8_t following = ip[offset];
      offset += (static_cast<std::size_t>(ip[offset + 1]) + 1) * 8;
      next = following;
      continue;
    }
    return FrameDecode::NotTcp;
  }
}

FrameDecode decode_ip(std::span<const std::uint8_t> ip, CapturePacket& packet) {
  if (ip.empty()) return FrameDecode::NotTcp;
  switch (ip[0] >> 4) {
    case 4: return decode_ipv4(ip, packet);
    case 6: return decode_ipv6(ip, packet);
    default: return FrameDecode::NotTcp;
  }
}

FrameDecode decode_ethertype(std::uint16_t type, std::span<const std::uint8_t> rest, CapturePacket& packet) {
  while (type == kEtherVlan || type == kEtherQinQ) {
    if (rest.size() < 4) return FrameDecode::NotTcp;
    type = be16(&rest[2]);
    rest = rest.subspan(4);
  }
  if (type == kEtherIpv4 || type == kEtherIpv6) return decode_ip(rest, packet);
  return FrameDecode::NotTcp;
}

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  std::size_t remaining() const { return bytes.size() - pos; }
  const std::uint8_t* at() const { return bytes.data() + pos; }
};

class PacketSink {
 public:
  explicit PacketSink(CaptureReadResult& out) : out_(out) {}

  void record(std::uint32_t link_type, std::int64_t seconds, std::uint32_t nanos,
              std::span<const std::uint8_t> frame) {
    CapturePacket packet;
    packet.frame_number = ++frame_count_;
    packet.ts_seconds = seconds;
    packet.ts_nanos = nanos;
    switch (decode_link_frame(link_type, frame, packet)) {
      case FrameDecode::Tcp:
        out_.packets.push_back(std::move(packet));
        break;
      case FrameDecode::IpFragment:
        ++fragments_;
        break;
      case FrameDecode::UnsupportedLink:
        unsupported_links_[link_type]++;
        break;
      case FrameDecode::NotTcp:
        break;
    }
  }

  void finish() {
    if (fragments_ > 0) {
      out_.warnings.push_back(std::to_string(fragments_) + " fragmented IP packet(s) skipped (no reassembly)");
    }
    for (const auto& [link, count] : unsupported_links_) {
      out_.warnings.push_back(std::to_string(count) + " packet(s) with unsupported link type " +
                              std::to_string(link) + " skipped");
    }
  }

 private:
  CaptureReadResult& out_;
  std::uint64_t frame_count_ = 0;
  std::uint64_t fragments_ = 0;
  std::map<std::uint32_t, std::uint64_t> unsupported_links_;
};

void read_classic(std::span<const std::uint8_t> bytes, CaptureReadResult& out) {
  const std::uint32_t magic_le = le32(bytes.data());
  const bool swapped = magic_le != kPcapMagicMicros && magic_le != kPcapMagicNanos;
  const ByteOrder order(swapped);
  const std::uint32_t magic = order.u32(bytes.data());
  const bool nanos = magic == kPcapMagicNanos;
  if (bytes.size() < 24) {
    out.truncated = true;
    out.warnings.push_back("truncated file: incomplete PCAP global header");
    return;
  }
  const std::uint32_t link_type = order.u32(bytes.data() + 20) & 0x0fffffff;

  PacketSink sink(out);
  Reader in{bytes, 24};
  while (in.remaining() > 0) {
    if (in.remaining() < 16) {
      out.truncated = true;
      break;
    }
    const std::uint32_t sec = order.u32(in.at());
    const std::uint32_t frac = order.u32(in.at() + 4);
    const std::uint32_t caplen = order.u32(in.at() + 8);
    if (caplen > in.remaining() - 16) {
      out.truncated = true;
      break;
    }
    sink.record(link_type, sec, nanos ? frac : frac * 1000, bytes.subspan(in.pos + 16, caplen));
    in.pos += 16 + caplen;
  }
  sink.finish();
  if (out.truncated) out.warnings.push_back("truncated file: last packet record incomplete");
}

struct Interface {
  std::uint32_t link_type = 0;
  std::uint64_t ticks_per_second = 1'000'000;
};

void read_pcapng(std::span<const std::uint8_t> bytes, CaptureReadResult& out) {
  PacketSink sink(out);
  Reader in{bytes, 0};
  std::optional<ByteOrder> order;
  std::vector<Interface> interfaces;

  while (in.remaining() > 0) {
    if (in.remaining() < 12) {
      out.truncated = true;
      break;
    }
    const std::uint32_t raw_type = le32(in.at());
    if (raw_type == kPcapngSectionHeader) {
      const std::uint32_t bom = le32(in.at() + 8);
      if (bom == kPcapngByteOrderMagic) {
        order.emplace(false);
      } else if (be32(in.at() + 8) == kPcapngByteOrderMagic) {
        order.emplace(true);
      } else {
        throw CaptureError("pcapng section header with invalid byte-order magic");
      }
      interfaces.clear();
    }
    if (!order) throw CaptureError("pcapng block before section header");
    const std::uint32_t type = order->u32(in.at());
    const std::uint32_t length = order->u32(in.at() + 4);
    if (length < 12 || length % 4 != 0) throw CaptureError("pcapng block with invalid length");
    if (length > in.remaining()) {
      out.truncated = true;
      break;
    }
    const std::uint8_t* body = in.at() + 8;
    const std::size_t body_len = length - 12;

    if (type == 1 && body_len >= 8) {
      Interface iface;
      iface.link_type = order->u16(body);
      // Options: look for if_tsresol (code 9).
      std::size_t opt = 8;
      while (opt + 4 <= body_len) {
        std::uint16_t code = order->u16(body + opt);
        std::uint16_t olen = order->u16(body + opt + 2);
        if (code == 0) break;
        if (code == 9 && olen >= 1 && opt + 4 < body_len) {
          std::uint8_t res = body[opt + 4];
          std::uint64_t ticks = 1;
          if (res & 0x80) {
            for (int i = 0; i < (res & 0x7f) && i < 63; ++i) ticks *= 2;
          } else {
            for (int i = 0; i < res && i < 19; ++i) ticks *= 10;
          }
          iface.ticks_per_second = ticks;
        }
        opt += 4 + ((olen + 3u) & ~3u);
      }
      interfaces.push_back(iface);
    } else if (type == 6 && body_len >= 20) {
      const std::uint32_t if_id = order->u32(body);
      const std::uint64_t ts = (std::uint64_t{order->u32(body + 4)} << 32) | order->u32(body + 8);
      const std::uint32_t caplen = order->u32(body + 12);
      if (if_id >= interfaces.size()) throw CaptureError("pcapng packet references unknown interface");
      if (caplen > body_len - 20) throw CaptureError("pcapng packet length exceeds its block");
      const auto& iface = interfaces[if_id];
      const auto seconds = static_cast<std::int64_t>(ts / iface.ticks_per_second);
      const auto rem = ts % iface.ticks_per_second;
      const auto nanos = static_cast<std::uint32_t>(
          static_cast<unsigned __int128>(rem) * 1'000'000'000u / iface.ticks_per_second);
      sink.record(iface.link_type, seconds, nanos, std::span<const std::uint8_t>(body + 20, caplen));
    } else if (type == 3 && body_len >= 4) {
      if (interfaces.empty()) throw CaptureError("pcapng simple packet without interface");
      const std::uint32_t orig = order->u32(body);
      const std::size_t caplen = std::min<std::size_t>(orig, body_len - 4);
      sink.record(interfaces[0].link_type, 0, 0, std::span<const std::uint8_t>(body + 4, caplen));
    }
    in.pos += length;
  }
  sink.finish();
  if (out.truncated) out.warnings.push_back("truncated file: last pcapng block incomplete");
}

}  // namespace

bool Endpoint::is_v4() const noexcept {
  for (int i = 0; i < 10; ++i) {
    if (address[i] != 0) return false;
  }
  return address[10] == 0xff && address[11] == 0xff;
}

std::string Endpoint::to_string() const {
  std::ostringstream out;
  if (is_v4()) {
    out << int(address[12]) << '.' << int(address[13]) << '.' << int(address[14]) << '.' << int(address[15]);
  } else {
    out << '[' << std::hex;
    for (int i = 0; i < 16; i += 2) {
      if (i) out << ':';
      out << ((address[i] << 8) | address[i + 1]);
    }
    out << std::dec << ']';
  }
  out << ':' << port;
  return out.str();
}

FrameDecode decode_link_frame(std::uint32_t link_type, std::span<const std::uint8_t> frame, CapturePacket& packet) {
  switch (link_type) {
    case 1:  // Ethernet
      if (frame.size() < 14) return FrameDecode::NotTcp;
      return decode_ethertype(be16(&frame[12]), frame.subspan(14), packet);
    case 113:  // Linux cooked v1
      if (frame.size() < 16) return FrameDecode::NotTcp;
      return decode_ethertype(be16(&frame[14]), frame.subspan(16), packet);
    case 276:  // Linux cooked v2
      if (frame.size() < 20) return FrameDecode::NotTcp;
      return decode_ethertype(be16(&frame[0]), frame.subspan(20), packet);
    case 0:  // BSD loopback: 4-byte address family in host order
      if (frame.size() < 4) return FrameDecode::NotTcp;
      return decode_ip(frame.subspan(4), packet);
    case 12:
    case 14:
    case 101:  // raw IP
      return decode_ip(frame, packet);
    case 228:
      return decode_ipv4(frame, packet);
    case 229:
      return decode_ipv6(frame, packet);
    default:
      return FrameDecode::UnsupportedLink;
  }
}

CaptureReadResult read_capture(std::span<const std::uint8_t> bytes) {
  CaptureReadResult out;
  if (bytes.size() < 4) throw CaptureError("unrecognized capture format: file too short");
  const std::uint32_t le = le32(bytes.data());
  const std::uint32_t be = be32(bytes.data());
  if (le == kPcapMagicMicros || le == kPcapMagicNanos || be == kPcapMagicMicros || be == kPcapMagicNanos) {
    read_classic(bytes, out);
  } else if (le == kPcapngSectionHeader) {
    read_pcapng(bytes, out);
  } else {
    throw CaptureError("unrecognized capture format");
  }
  return out;
}

CaptureReadResult read_capture(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CaptureError("cannot open capture file '" + file.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_capture(std::span<const std::uint8_t>(bytes));
}

}  // namespace sbilint::capture
