#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sbilint::capture {

struct HeaderField {
  std::string name;
  std::string value;

  friend bool operator==(const HeaderField&, const HeaderField&) = default;
};

enum class Completeness { Complete, Degraded };

/// Ordered header list. Pseudo-headers precede regular headers.
struct HeaderList {
  std::vector<HeaderField> fields;
  Completeness completeness = Completeness::Complete;
  int undecodable = 0;  // references that could not be resolved
  std::vector<std::string> notes;

  std::optional<std::string> get(std::string_view name) const;
  bool has(std::string_view name) const { return get(name).has_value(); }
  bool degraded() const noexcept { return completeness == Completeness::Degraded; }
};

/// HPACK dynamic table for one decoding direction.
class DynamicTable {
 public:
  explicit DynamicTable(std::size_t max_size = 4096) : max_size_(max_size), protocol_max_(max_size) {}

  struct Entry {
    HeaderField field;
    bool known = true;  // false for entries inserted with an unrecoverable name
  };

  void insert(Entry entry);
  void resize(std::size_t max_size);
  /// Upper bound announced by the peer's SETTINGS_HEADER_TABLE_SIZE.
  void set_protocol_max(std::size_t max_size) noexcept { protocol_max_ = max_size; }

  /// 0-based index into the dynamic part (0 = most recent).
  const Entry* at(std::size_t index) const;
  std::size_t size() const noexcept { return size_; }
  std::size_t max_size() const noexcept { return max_size_; }
  std::size_t protocol_max() const noexcept { return protocol_max_; }
  std::size_t entry_count() const noexcept { return entries_.size(); }

 private:
  void evict();

  std::deque<Entry> entries_;
  std::size_t size_ = 0;
  std::size_t max_size_;
  std::size_t protocol_max_;
};

/// The 61-entry HPACK static table; index is 1-based.
const HeaderField* static_table_entry(std::size_t index);
constexpr std::size_t kStaticTableSize = 61;

class HpackError : public std::runtime_error {
 public:
  enum class Kind { IntegerOverflow, HuffmanPaddingError, HuffmanEos, Truncated, BadIndex };
  HpackError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Decodes a Huffman-coded string literal.
std::string huffman_decode(std::span<const std::uint8_t> bytes);

/// Decodes one complete header block, updating `table`.
///
/// With `degraded_start` set (the connection was captured mid-stream), an
/// index into an unpopulated dynamic-table slot is skipped and counted instead
/// of aborting the block. Malformed blocks never throw: decoding stops, the
/// list is marked degraded and the cause is recorded in its notes.
HeaderList decode_hpack(std::span<const std::uint8_t> header_block, DynamicTable& table, bool degraded_start);

}  // namespace sbilint::capture
