#include "sbilint/capture/hpack.hpp"

#include <array>
#include <stdexcept>

namespace sbilint::capture {

namespace {

struct HuffmanCode {
  std::uint32_t code;
  std::uint8_t bits;
};

constexpr HuffmanCode kHuffmanCodes[257] = {
#include "huffman_table.inc"
};

constexpr int kEos = 256;

/// Binary trie over the Huffman code. Leaves carry the symbol.
class HuffmanTrie {
 public:
  HuffmanTrie() {
    nodes_.push_back(Node{});
    for (int symbol = 0; symbol <= kEos; ++symbol) {
      const auto& c = kHuffmanCodes[symbol];
      int node = 0;
      for (int bit = c.bits - 1; bit >= 0; --bit) {
        int b = (c.code >> bit) & 1;
        if (nodes_[node].child[b] < 0) {
          nodes_[node].child[b] = static_cast<int>(nodes_.size());
          nodes_.push_back(Node{});
        }
        node = nodes_[node].child[b];
      }
      nodes_[node].symbol = symbol;
    }
  }

  std::string decode(std::span<const std::uint8_t> bytes) const {
    std::string out;
    int node = 0;
    int pending_bits = 0;
    bool pending_all_ones = true;
    for (std::uint8_t byte : bytes) {
      for (int bit = 7; bit >= 0; --bit) {
        int b = (byte >> bit) & 1;
        node = nodes_[node].child[b];
        if (node < 0) {
          throw HpackError(HpackError::Kind::HuffmanPaddingError, "invalid Huffman code");
        }
        ++pending_bits;
        pending_all_ones = pending_all_ones && b == 1;
        if (int symbol = nodes_[node].symbol; symbol >= 0) {
          if (symbol == kEos) {
            throw HpackError(HpackError::Kind::HuffmanEos, "EOS symbol inside Huffman string");
          }
          out.push_back(static_cast<char>(symbol));
          node = 0;
          pending_bits = 0;
          pending_all_ones = true;
        }
      }
    }
    if (pending_bits > 7 || !pending_all_ones) {
      throw HpackError(HpackError::Kind::HuffmanPaddingError, "invalid Huffman padding");
    }
    return out;
  }

 private:
  struct Node {
    int child[2] = {-1, -1};
    int symbol = -1;
  };
  std::vector<Node> nodes_;
};

const HuffmanTrie& trie() {
  static const HuffmanTrie instance;
  return instance;
}

const std::array<HeaderField, kStaticTableSize> kStaticTable{{
    {":authority", ""},
    {":method", "GET"},
    {":method", "POST"},
    {":path", "/"},
    {":path", "/index.html"},
    {":scheme", "http"},
    {":scheme", "https"},
    {":status", "200"},
    {":status", "204"},
    {":status", "206"},
    {":status", "304"},
    {":status", "400"},
    {":status", "404"},
    {":status", "500"},
    {"accept-charset", ""},
    {"accept-encoding", "gzip, deflate"},
    {"accept-language", ""},
    {"accept-ranges", ""},
    {"accept", ""},
    {"access-control-allow-origin", ""},
    {"age", ""},
    {"allow", ""},
    {"authorization", ""},
    {"cache-control", ""},
    {"content-disposition", ""},
    {"content-encoding", ""},
    {"content-language", ""},
    {"content-length", ""},
    {"content-location", ""},
    {"content-range", ""},
    {"content-type", ""},
    {"cookie", ""},
    {"date", ""},
    {"etag", ""},
    {"expect", ""},
    {"expires", ""},
    {"from", ""},
    {"host", ""},
    {"if-match", ""},
    {"if-modified-since", ""},
    {"if-none-match", ""},
    {"if-range", ""},
    {"if-unmodified-since", ""},
    {"last-modified", ""},
    {"link", ""},
    {"location", ""},
    {"max-forwards", ""},
    {"proxy-authenticate", ""},
    {"proxy-authorization", ""},
    {"range", ""},
    {"referer", ""},
    {"refresh", ""},
    {"retry-after", ""},
    {"server", ""},
    {"set-cookie", ""},
    {"strict-transport-security", ""},
    {"transfer-encoding", ""},
    {"user-agent", ""},
    {"vary", ""},
    {"via", ""},
    {"www-authenticate", ""},
}};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const noexcept { return pos_ >= bytes_.size(); }
  std::uint8_t peek() const { return bytes_[pos_]; }

  std::uint64_t integer(int prefix_bits) {
    if (done()) throw HpackError(HpackError::Kind::Truncated, "header block truncated in integer");
    const std::uint8_t mask = static_cast<std::uint8_t>((1u << prefix_bits) - 1);
    std::uint64_t value = bytes_[pos_++] & mask;
    if (value < mask) return value;
    int shift = 0;
    while (true) {
      if (done()) throw HpackError(HpackError::Kind::Truncated, "header block truncated in integer");
      std::uint8_t b = bytes_[pos_++];
      if (shift > 28) throw HpackError(HpackError::Kind::IntegerOverflow, "HPACK integer overflow");
      value += static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (value > 0xffffffffull) throw HpackError(HpackError::Kind::IntegerOverflow, "HPACK integer overflow");
      shift += 7;
      if ((b & 0x80) == 0) return value;
    }
  }

  std::string string() {
    if (done()) throw HpackError(HpackError::Kind::Truncated, "header block truncated in string");
    const bool huffman = (bytes_[pos_] & 0x80) != 0;
    const std::uint64_t length = integer(7);
    if (length > bytes_.size() - pos_) {
      throw HpackError(HpackError::Kind::Truncated, "string literal overruns header block");
    }
    auto raw = bytes_.subspan(pos_, static_cast<std::size_t>(length));
    pos_ += static_cast<std::size_t>(length);
    if (huffman) return trie().decode(raw);
    return std::string(raw.begin(), raw.end());
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

constexpr std::size_t kEntryOverhead = 32;

}  // namespace

std::optional<std::string> HeaderList::get(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return f.value;
  }
  return std::nullopt;
}

void DynamicTable::insert(Entry entry) {
  const std::size_t entry_size = entry.field.name.size() + entry.field.value.size() + kEntryOverhead;
  if (entry_size > max_size_) {
    // An oversized entry empties the table and is not stored.
    entries_.clear();
    size_ = 0;
    return;
  }
  size_ += entry_size;
  entries_.push_front(std::move(entry));
  evict();
}

void DynamicTable::resize(std::size_t max_size) {
  max_size_ = max_size;
  evict();
}

const DynamicTable::Entry* DynamicTable::at(std::size_t index) const {
  return index < entries_.size() ? &entries_[index] : nullptr;
}

void DynamicTable::evict() {
  while (size_ > max_size_ && !entries_.empty()) {
    const auto& last = entries_.back();
    size_ -= last.field.name.size() + last.field.value.size() + kEntryOverhead;
    entries_.pop_back();
  }
}

const HeaderField* static_table_entry(std::size_t index) {
  if (index == 0 || index > kStaticTableSize) return nullptr;
  return &kStaticTable[index - 1];
}

std::string huffman_decode(std::span<const std::uint8_t> bytes) { return trie().decode(bytes); }

HeaderList decode_hpack(std::span<const std::uint8_t> header_block, DynamicTable& table, bool degraded_start) {
  HeaderList list;
  std::vector<HeaderField> pseudo;
  std::vector<HeaderField> regular;

  auto mark_degraded = [&](std::string note) {
    list.completeness = Completeness::Degraded;
    ++list.undecodable;
    list.notes.push_back(std::move(note));
  };
  auto emit = [&](HeaderField field) {
    if (!field.name.empty() && field.name.front() == ':') {
      pseudo.push_back(std::move(field));
    } else {
      regular.push_back(std::move(field));
    }
  };
  // Returns the entry or nullptr when the index points at an unrecoverable slot.
  auto lookup = [&](std::uint64_t index) -> std::optional<HeaderField> {
    if (index == 0) throw HpackError(HpackError::Kind::BadIndex, "HPACK index 0");
    if (index <= kStaticTableSize) return *static_table_entry(index);
    const auto* entry = table.at(index - kStaticTableSize - 1);
    if (entry != nullptr && entry->known) return entry->field;
    if (entry == nullptr && !degraded_start) {
      throw HpackError(HpackError::Kind::BadIndex, "HPACK index " + std::to_string(index) + " beyond dynamic table");
    }
    return std::nullopt;
  };

  Reader in(header_block);
  try {
    while (!in.done()) {
      const std::uint8_t first = in.peek();
      if (first & 0x80) {
        // Indexed header field.
        auto index = in.integer(7);
        if (auto field = lookup(index)) {
          emit(std::move(*field));
        } else {
          mark_degraded("unrecoverable dynamic table reference " + std::to_string(index));
        }
      } else if ((first & 0xe0) == 0x20) {
        auto new_size = in.integer(5);
        if (new_size > table.protocol_max()) {
          // The encoder still evicts to the announced size, so tracking it keeps later blocks aligned.
          mark_degraded("table size update " + std::to_string(new_size) + " exceeds the SETTINGS limit " +
                        std::to_string(table.protocol_max()));
        }
        table.resize(static_cast<std::size_t>(new_size));
      } else {
        // Literal: 01 = incremental indexing, 0000 = without, 0001 = never.
        const bool incremental = (first & 0xc0) == 0x40;
        const auto name_index = in.integer(incremental ? 6 : 4);
        std::optional<std::string> name;
        if (name_index == 0) {
          name = in.string();
        } else if (auto field = lookup(name_index)) {
          name = std::move(field->name);
        }
        std::string value = in.string();
        if (incremental) {
          table.insert({HeaderField{name.value_or(""), value}, name.has_value()});
        }
        if (name) {
          emit(HeaderField{std::move(*name), std::move(value)});
        } else {
          mark_degraded("unrecoverable dynamic table name reference " + std::to_string(name_index));
        }
      }
    }
  } catch (const HpackError& e) {
    mark_degraded(std::string("header block abandoned: ") + e.what());
  }

  list.fields = std::move(pseudo);
  list.fields.insert(list.fields.end(), std::make_move_iterator(regular.begin()),
                     std::make_move_iterator(regular.end()));
  return list;
}

}  // namespace sbilint::capture
