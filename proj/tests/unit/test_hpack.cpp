#include <doctest.h>

#include "helpers.hpp"
#include "hpack_encoder.hpp"
#include "sbilint/capture/hpack.hpp"

using namespace sbilint;
using capture::DynamicTable;
using capture::HpackError;
using testing::Bytes;
using testing::from_hex;

TEST_CASE("RFC 7541 Appendix C examples") {
  const auto r = testing::check_rfc7541_examples();
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("property: random header lists round-trip") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = testing::check_hpack_round_trips(300, seed);
    INFO(r.detail);
    CHECK(r.ok);
  }
}

TEST_CASE("Huffman decoding") {
  const auto www = from_hex("f1e3c2e5f23a6ba0ab90f4ff");
  CHECK(capture::huffman_decode(www) == "www.example.com");
  CHECK(capture::huffman_decode(testing::huffman_encode("")) == "");
  std::string all;
  for (int c = 0; c < 256; ++c) all += static_cast<char>(c);
  CHECK(capture::huffman_decode(testing::huffman_encode(all)) == all);
}

TEST_CASE("Huffman padding errors") {
  // Padding longer than 7 bits.
  CHECK_THROWS_AS(capture::huffman_decode(Bytes{0xff, 0xff}), HpackError);
  // Padding that is not the EOS prefix: 'a' is 00011, then zeros.
  CHECK_THROWS_AS(capture::huffman_decode(Bytes{0x18}), HpackError);
  // An explicit EOS symbol.
  CHECK_THROWS_AS(capture::huffman_decode(Bytes{0xff, 0xff, 0xff, 0xfc}), HpackError);
}

TEST_CASE("static table") {
  REQUIRE(capture::static_table_entry(2));
  CHECK(capture::static_table_entry(2)->name == ":method");
  CHECK(capture::static_table_entry(2)->value == "GET");
  CHECK(capture::static_table_entry(61)->name == "www-authenticate");
  CHECK(capture::static_table_entry(0) == nullptr);
  CHECK(capture::static_table_entry(62) == nullptr);
}

TEST_CASE("dynamic table eviction") {
  DynamicTable t(100);
  t.insert({{"aaaa", "bbbb"}, true});  // 40 octets
  t.insert({{"cccc", "dddd"}, true});
  CHECK(t.size() == 80);
  t.insert({{"eeee", "ffff"}, true});
  CHECK(t.entry_count() == 2);
  CHECK(t.at(0)->field.name == "eeee");
  CHECK(t.at(1)->field.name == "cccc");
  t.resize(40);
  CHECK(t.entry_count() == 1);
  t.insert({{std::string(100, 'x'), ""}, true});
  CHECK(t.entry_count() == 0);
  CHECK(t.size() == 0);
}

TEST_CASE("malformed blocks degrade instead of throwing") {
  DynamicTable t;
  // Index 70 with an empty dynamic table.
  auto bad_index = capture::decode_hpack(Bytes{0xc6}, t, false);
  CHECK(bad_index.degraded());
  CHECK_FALSE(bad_index.notes.empty());

  // A literal whose length runs past the block.
  auto truncated = capture::decode_hpack(Bytes{0x40, 0x05, 'a'}, t, false);
  CHECK(truncated.degraded());

  // An integer continuation that never ends.
  auto overflow = capture::decode_hpack(Bytes{0x7f, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff}, t, false);
  CHECK(overflow.degraded());

  // A size update above the protocol maximum.
  DynamicTable small(4096);
  small.set_protocol_max(100);
  Bytes update;
  testing::encode_integer(update, 200, 5, 0x20);
  CHECK(capture::decode_hpack(update, small, false).degraded());
}

TEST_CASE("mid-stream: unknown dynamic references are skipped and counted") {
  DynamicTable t;
  // 0xbe indexes dynamic entry 62, which a mid-stream decoder never saw.
  auto block = from_hex("82be84");
  auto list = capture::decode_hpack(block, t, true);
  CHECK(list.degraded());
  CHECK(list.undecodable == 1);
  REQUIRE(list.fields.size() == 2);
  CHECK(list.fields[0].name == ":method");
  CHECK(list.fields[1].name == ":path");

  // Literal with incremental indexing whose name references an unknown slot:
  // the entry still occupies the table so later indices stay aligned.
  DynamicTable u;
  Bytes lit;
  testing::encode_integer(lit, 62, 6, 0x40);
  testing::encode_string(lit, "value", false);
  auto l2 = capture::decode_hpack(lit, u, true);
  CHECK(l2.undecodable == 1);
  CHECK(u.entry_count() == 1);
  CHECK_FALSE(u.at(0)->known);
}

TEST_CASE("decoded lists keep pseudo-headers first") {
  testing::HpackEncoder enc;
  DynamicTable t;
  const auto block = enc.encode({{"content-type", "application/json"}, {":status", "200"}});
  const auto list = capture::decode_hpack(block, t, false);
  REQUIRE(list.fields.size() == 2);
  CHECK(list.fields[0].name == ":status");
  CHECK(list.get("content-type") == "application/json");
  CHECK_FALSE(list.has("location"));
}
