#include <doctest.h>

#include "helpers.hpp"
#include "hpack_encoder.hpp"

using namespace sbilint;
using nlohmann::json;
using testing::Address;
using testing::Bytes;
using testing::h2_frame;
using testing::PcapRecord;

namespace {

json one_exchange(const json& request, const json& response) {
  return json{{"connections", json::array({json{{"client", "10.0.0.1:40000"},
                                                {"server", "10.0.0.2:80"},
                                                {"exchanges", json::array({json{{"request", request},
                                                                                {"response", response}}})}}})}};
}

capture::DecodedCapture decode(const std::vector<PcapRecord>& records) {
  return capture::decode_packets(capture::read_capture(testing::write_pcap(records)));
}

// Raw frames over an opened connection, for framing cases the fixture
// builder does not produce.
struct RawConnection {
  std::vector<PcapRecord> records;
  testing::TcpConversation tcp{records, Address::parse("10.0.0.1:40000"), Address::parse("10.0.0.2:80")};
  testing::HpackEncoder client_enc;
  testing::HpackEncoder server_enc;

  RawConnection() {
    tcp.handshake();
    auto preface = testing::h2_preface();
    auto settings = h2_frame(0x4, 0, 0, {});
    preface.insert(preface.end(), settings.begin(), settings.end());
    tcp.send(true, preface);
    tcp.send(false, h2_frame(0x4, 0, 0, {}));
  }
  void send(bool client, const Bytes& frame) { tcp.send(client, frame); }
  Bytes request_block(const std::string& path) {
    return client_enc.encode({{":method", "POST"}, {":scheme", "http"}, {":authority", "x"}, {":path", path}});
  }
};

}  // namespace

TEST_CASE("request and response become two messages") {
  const auto decoded = testing::decode_description(one_exchange(
      json{{"method", "POST"}, {"path", "/a"}, {"headers", {{"content-type", "application/json"}}}, {"body", {{"k", 1}}}},
      json{{"status", 201}, {"headers", {{"location", "http://x/a/1"}}}, {"body", {{"id", "1"}}}}));
  CHECK(decoded.tcp_streams == 1);
  CHECK(decoded.http2_streams == 1);
  CHECK(decoded.notes.empty());
  REQUIRE(decoded.messages.size() == 2);
  const auto& req = decoded.messages[0];
  CHECK(req.direction == capture::MessageDirection::Request);
  CHECK(req.headers.get(":method") == "POST");
  CHECK(req.headers.get(":path") == "/a");
  CHECK(req.body == R"({"k":1})");
  CHECK(req.end_stream_seen);
  CHECK(req.h2_stream_id == 1);
  CHECK(req.src.to_string() == "10.0.0.1:40000");
  CHECK_FALSE(req.headers.degraded());
  const auto& resp = decoded.messages[1];
  CHECK(resp.direction == capture::MessageDirection::Response);
  CHECK(resp.headers.get(":status") == "201");
  CHECK(resp.headers.get("location") == "http://x/a/1");
  CHECK(resp.body == R"({"id":"1"})");
  CHECK(resp.first_frame > req.last_frame);
}

TEST_CASE("large bodies span several DATA frames") {
  const std::string big(40000, 'z');
  const auto decoded = testing::decode_description(one_exchange(
      json{{"method", "POST"}, {"path", "/a"}, {"body_raw", big}}, json{{"status", 204}}));
  REQUIRE(decoded.messages.size() == 2);
  CHECK(decoded.messages[0].body == big);
  CHECK(decoded.messages[0].last_frame - decoded.messages[0].first_frame == 3);
  CHECK(decoded.messages[1].body.empty());
}

TEST_CASE("mid-stream capture is decoded in degraded mode") {
  auto description = one_exchange(json{{"method", "GET"}, {"path", "/first"}}, json{{"status", 200}});
  description["connections"][0]["exchanges"].push_back(
      json{{"request", {{"method", "GET"}, {"path", "/second"}}}, {"response", {{"status", 200}}}});
  description["drop_first_packets"] = 9;
  const auto decoded = testing::decode_description(description);
  REQUIRE_FALSE(decoded.messages.empty());
  CHECK(std::any_of(decoded.notes.begin(), decoded.notes.end(), [](const std::string& n) {
    return n.find("connection start not captured") != std::string::npos;
  }));
  const auto req = std::find_if(decoded.messages.rbegin(), decoded.messages.rend(), [](const auto& m) {
    return m.direction == capture::MessageDirection::Request;
  });
  REQUIRE(req != decoded.messages.rend());
  CHECK(req->headers.get(":path") == "/second");
  CHECK(req->headers.degraded());
}

TEST_CASE("CONTINUATION, padding, priority and trailers") {
  RawConnection c;
  const auto block = c.request_block("/cont");
  const Bytes first(block.begin(), block.begin() + 3);
  const Bytes rest(block.begin() + 3, block.end());
  Bytes prioritized{0, 0, 0, 0, 16};
  prioritized.insert(prioritized.end(), first.begin(), first.end());
  c.send(true, h2_frame(0x1, capture::frame_flags::kPriority, 1, prioritized));
  c.send(true, h2_frame(0x9, capture::frame_flags::kEndHeaders, 1, rest));
  Bytes padded{3, 'a', 'b', 0, 0, 0};
  c.send(true, h2_frame(0x0, capture::frame_flags::kPadded, 1, padded));
  c.send(true, h2_frame(0x1, capture::frame_flags::kEndHeaders | capture::frame_flags::kEndStream, 1,
                        c.client_enc.encode({{"x-trailer", "t"}})));
  const auto decoded = decode(c.records);
  REQUIRE(decoded.messages.size() == 1);
  const auto& m = decoded.messages[0];
  CHECK(m.headers.get(":path") == "/cont");
  CHECK(m.body == "ab");
  REQUIRE(m.trailers);
  CHECK(m.trailers->get("x-trailer") == "t");
  CHECK(m.end_stream_seen);
}

TEST_CASE("informational responses are skipped") {
  RawConnection c;
  c.send(true, h2_frame(0x1, capture::frame_flags::kEndHeaders | capture::frame_flags::kEndStream, 1,
                        c.request_block("/x")));
  c.send(false, h2_frame(0x1, capture::frame_flags::kEndHeaders, 1, c.server_enc.encode({{":status", "100"}})));
  c.send(false, h2_frame(0x1, capture::frame_flags::kEndHeaders | capture::frame_flags::kEndStream, 1,
                         c.server_enc.encode({{":status", "200"}})));
  const auto decoded = decode(c.records);
  REQUIRE(decoded.messages.size() == 2);
  CHECK(decoded.messages[1].headers.get(":status") == "200");
}

TEST_CASE("reset and unfinished streams are kept with notes") {
  RawConnection c;
  c.send(true, h2_frame(0x1, capture::frame_flags::kEndHeaders, 1, c.request_block("/reset")));
  c.send(true, h2_frame(0x3, 0, 1, {0, 0, 0, 8}));
  c.send(true, h2_frame(0x1, capture::frame_flags::kEndHeaders, 3, c.request_block("/open")));
  const auto decoded = decode(c.records);
  REQUIRE(decoded.messages.size() == 2);
  CHECK(decoded.messages[0].notes.at(0) == "stream reset by RST_STREAM");
  CHECK(decoded.messages[1].notes.at(0) == "END_STREAM not seen before end of capture");
  CHECK_FALSE(decoded.messages[1].end_stream_seen);
}

TEST_CASE("SETTINGS_HEADER_TABLE_SIZE bounds the peer's table") {
  RawConnection c;
  c.send(false, h2_frame(0x4, 0, 0, {0, 1, 0, 0, 0, 0}));  // header table size 0
  testing::HpackEncoder small(0);
  c.send(true, h2_frame(0x1, capture::frame_flags::kEndHeaders | capture::frame_flags::kEndStream, 1,
                        small.encode({{":method", "GET"}, {":path", "/s"}, {"x-a", "b"}})));
  const auto decoded = decode(c.records);
  REQUIRE(decoded.messages.size() == 1);
  CHECK_FALSE(decoded.messages[0].headers.degraded());
  CHECK(decoded.messages[0].headers.get("x-a") == "b");
}

TEST_CASE("non-HTTP/2 traffic is skipped with a note") {
  std::vector<PcapRecord> records;
  testing::TcpConversation tls(records, Address::parse("10.0.0.1:1"), Address::parse("10.0.0.2:443"));
  tls.handshake();
  tls.send(true, Bytes{0x16, 0x03, 0x01, 0x00, 0x05, 1, 2, 3, 4, 5});
  testing::TcpConversation h1(records, Address::parse("10.0.0.1:2"), Address::parse("10.0.0.2:80"));
  h1.handshake();
  h1.send(true, testing::to_bytes("GET / HTTP/1.1\r\nHost: a\r\n\r\n"));
  const auto decoded = decode(records);
  CHECK(decoded.messages.empty());
  CHECK(decoded.http2_streams == 0);
  REQUIRE(decoded.notes.size() == 2);
  CHECK(decoded.notes[0].find("TLS traffic skipped") != std::string::npos);
  CHECK(decoded.notes[1].find("not HTTP/2") != std::string::npos);
}

TEST_CASE("messages are ordered by first frame across connections") {
  json description{{"connections", json::array()}};
  for (int i = 0; i < 3; ++i) {
    description["connections"].push_back(
        json{{"client", "10.0.0." + std::to_string(i + 1) + ":4000"},
             {"server", "10.0.0.9:80"},
             {"exchanges", json::array({json{{"request", {{"method", "GET"}, {"path", "/c" + std::to_string(i)}}},
                                             {"response", {{"status", 200}}}}})}});
  }
  const auto decoded = testing::decode_description(description);
  REQUIRE(decoded.messages.size() == 6);
  for (std::size_t i = 1; i < decoded.messages.size(); ++i) {
    CHECK(decoded.messages[i - 1].first_frame < decoded.messages[i].first_frame);
  }
  CHECK(decoded.messages[4].tcp_stream_id == 2);
}
