#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "sbilint/capture/tcp.hpp"

using namespace sbilint;
using testing::Address;
using testing::PcapRecord;

namespace {

struct Conversation {
  std::vector<PcapRecord> records;
  std::string client_bytes;
  std::string server_bytes;
};

Conversation conversation(std::mt19937_64& rng, std::uint32_t client_isn = 1000) {
  Conversation c;
  testing::TcpConversation tcp(c.records, Address::parse("10.0.0.1:40000"), Address::parse("10.0.0.2:80"),
                               client_isn, 4294967000u);  // the server's sequence numbers wrap
  tcp.handshake();
  for (int i = 0; i < 12; ++i) {
    const bool client = (rng() % 2) == 0;
    std::string chunk;
    for (auto n = 1 + rng() % 50; n > 0; --n) chunk += static_cast<char>('a' + rng() % 26);
    tcp.send(client, testing::to_bytes(chunk));
    (client ? c.client_bytes : c.server_bytes) += chunk;
  }
  tcp.fin();
  return c;
}

constexpr std::ptrdiff_t kClosingPackets = 2;

std::vector<capture::TcpStream> reassemble(const std::vector<PcapRecord>& records) {
  const auto read = capture::read_capture(testing::write_pcap(records));
  return capture::reassemble_tcp(read.packets);
}

std::string bytes_of(const capture::DirectionalBytes& d) { return {d.bytes.begin(), d.bytes.end()}; }

}  // namespace

TEST_CASE("in-order delivery") {
  std::mt19937_64 rng(1);
  const auto c = conversation(rng);
  const auto streams = reassemble(c.records);
  REQUIRE(streams.size() == 1);
  const auto& s = streams[0];
  CHECK(s.initiator_known);
  CHECK(s.client.to_string() == "10.0.0.1:40000");
  CHECK(bytes_of(s.dir(capture::Side::ClientToServer)) == c.client_bytes);
  CHECK(bytes_of(s.dir(capture::Side::ServerToClient)) == c.server_bytes);
  CHECK(s.dir(capture::Side::ClientToServer).syn_seen);
  CHECK(s.dir(capture::Side::ClientToServer).fin_seen);
  CHECK(s.dir(capture::Side::ClientToServer).gaps.empty());
}

TEST_CASE("property: reassembly is invariant under packet permutation") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = conversation(rng, static_cast<std::uint32_t>(rng()));
    // The closing packets stay last: a SYN after a FIN reopens the 4-tuple.
    auto shuffled = c.records;
    std::shuffle(shuffled.begin(), shuffled.end() - kClosingPackets, rng);
    const auto streams = reassemble(shuffled);
    REQUIRE(streams.size() == 1);
    CHECK(streams[0].client.to_string() == "10.0.0.1:40000");
    CHECK(bytes_of(streams[0].dir(capture::Side::ClientToServer)) == c.client_bytes);
    CHECK(bytes_of(streams[0].dir(capture::Side::ServerToClient)) == c.server_bytes);
  }
}

TEST_CASE("property: retransmissions are delivered once") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = conversation(rng);
    auto doubled = c.records;
    for (std::size_t i = 3; i < c.records.size(); i += 2) doubled.push_back(c.records[i]);
    const auto streams = reassemble(doubled);
    REQUIRE(streams.size() == 1);
    CHECK(bytes_of(streams[0].dir(capture::Side::ClientToServer)) == c.client_bytes);
    CHECK(bytes_of(streams[0].dir(capture::Side::ServerToClient)) == c.server_bytes);
    CHECK(streams[0].dir(capture::Side::ClientToServer).anomalies.empty());
  }
}

TEST_CASE("a lost segment becomes a gap") {
  std::vector<PcapRecord> records;
  testing::TcpConversation tcp(records, Address::parse("10.0.0.1:40000"), Address::parse("10.0.0.2:80"));
  tcp.handshake();
  tcp.send(true, testing::to_bytes("aaaa"));
  tcp.send(true, testing::to_bytes("bbbbbb"));
  tcp.send(true, testing::to_bytes("cc"));
  records.erase(records.begin() + 4);  // the "bbbbbb" segment
  const auto streams = reassemble(records);
  const auto& d = streams.at(0).dir(capture::Side::ClientToServer);
  CHECK(bytes_of(d) == "aaaacc");
  REQUIRE(d.gaps.size() == 1);
  CHECK(d.gaps[0].offset == 4);
  CHECK(d.gaps[0].length == 6);
  const auto chunks = d.chunks();
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0] == std::pair<std::size_t, std::size_t>{0, 4});
  CHECK(chunks[1] == std::pair<std::size_t, std::size_t>{4, 6});
  CHECK(d.frame_at(0) == 4);
  CHECK(d.frame_at(5) == 5);
}

TEST_CASE("conflicting retransmission keeps the first copy") {
  std::vector<PcapRecord> records;
  testing::TcpConversation tcp(records, Address::parse("10.0.0.1:40000"), Address::parse("10.0.0.2:80"));
  tcp.handshake();
  tcp.send(true, testing::to_bytes("first"));
  auto copy = records.back();
  copy.frame[copy.frame.size() - 1] = 'X';
  records.push_back(copy);
  const auto streams = reassemble(records);
  const auto& d = streams.at(0).dir(capture::Side::ClientToServer);
  CHECK(bytes_of(d) == "first");
  CHECK(d.anomalies.size() == 1);
}

TEST_CASE("without a SYN the first sender is the client") {
  std::vector<PcapRecord> records;
  testing::TcpConversation tcp(records, Address::parse("10.0.0.1:40000"), Address::parse("10.0.0.2:80"));
  tcp.handshake();
  tcp.send(false, testing::to_bytes("server speaks first"));
  tcp.send(true, testing::to_bytes("client"));
  records.erase(records.begin(), records.begin() + 3);
  const auto streams = reassemble(records);
  REQUIRE(streams.size() == 1);
  CHECK_FALSE(streams[0].initiator_known);
  CHECK(streams[0].client.to_string() == "10.0.0.2:80");
}

TEST_CASE("separate connections get separate streams in order of appearance") {
  std::vector<PcapRecord> records;
  testing::TcpConversation a(records, Address::parse("10.0.0.1:1"), Address::parse("10.0.0.2:80"));
  testing::TcpConversation b(records, Address::parse("10.0.0.3:1"), Address::parse("10.0.0.2:80"));
  b.handshake();
  a.handshake();
  a.send(true, testing::to_bytes("A"));
  b.send(true, testing::to_bytes("B"));
  const auto streams = reassemble(records);
  REQUIRE(streams.size() == 2);
  CHECK(streams[0].stream_id == 0);
  CHECK(streams[0].client.to_string() == "10.0.0.3:1");
  CHECK(bytes_of(streams[1].dir(capture::Side::ClientToServer)) == "A");
}

TEST_CASE("a new SYN on a reused 4-tuple opens a new stream") {
  for (bool first_handshake : {true, false}) {
    CAPTURE(first_handshake);
    std::vector<PcapRecord> records;
    testing::TcpConversation first(records, Address::parse("10.0.0.1:40000"), Address::parse("10.0.0.2:80"), 5000);
    first.handshake();
    first.send(true, testing::to_bytes("one"));
    first.fin();
    if (!first_handshake) records.erase(records.begin(), records.begin() + 3);
    // The reused ISN sits below the earlier bytes, so it cannot continue them.
    testing::TcpConversation second(records, Address::parse("10.0.0.1:40000"), Address::parse("10.0.0.2:80"), 1000);
    second.handshake();
    second.send(true, testing::to_bytes("two"));
    const auto streams = reassemble(records);
    REQUIRE(streams.size() == 2);
    CHECK(bytes_of(streams[0].dir(capture::Side::ClientToServer)) == "one");
    CHECK(bytes_of(streams[1].dir(capture::Side::ClientToServer)) == "two");
    CHECK(streams[1].initiator_known);
  }
}
