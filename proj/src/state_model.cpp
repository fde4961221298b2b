#include "geost/state_model.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include <fmt/format.h>

#include "geost/sha512.hpp"

namespace geost {
namespace {

void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

  Bytes take(std::uint64_t n) {
    need(n);
    Bytes out(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
              in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }

  std::uint64_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > remaining()) {
      throw Error(Errc::kMalformedState,
                  fmt::format("state framing truncated at offset {} (need {} bytes, have {})",
                              pos_, n, remaining()));
    }
  }

  std::span<const std::uint8_t> in_;
  std::uint64_t pos_ = 0;
};

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t serialized_size(const StateImage& state) {
  std::uint64_t n = 16 + state.checkpoint.size();
  for (const auto& e : state.log) n += 16 + e.payload.size();
  return n;
}

Bytes serialize_state(const StateImage& state) {
  Bytes out;
  out.reserve(serialized_size(state));
  put_u64(out, state.log.size());
  put_u64(out, state.checkpoint.size());
  out.insert(out.end(), state.checkpoint.begin(), state.checkpoint.end());
  for (const auto& e : state.log) {
    put_u64(out, e.sequence_number);
    put_u64(out, e.payload.size());
    out.insert(out.end(), e.payload.begin(), e.payload.end());
  }
  return out;
}

StateImage deserialize_state(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const std::uint64_t count = r.u64();
  // Each entry needs at least 16 bytes of framing.
  if (count > bytes.size() / 16) {
    throw Error(Errc::kMalformedState, fmt::format("implausible log entry count {}", count));
  }
  StateImage state;
  state.checkpoint = r.take(r.u64());
  state.log.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    LogEntry e;
    e.sequence_number = r.u64();
    e.payload = r.take(r.u64());
    state.log.push_back(std::move(e));
  }
  if (r.remaining() != 0) {
    throw Error(Errc::kMalformedState,
                fmt::format("{} trailing bytes after state framing", r.remaining()));
  }
  return state;
}

// ---------------------------------------------------------------------------

ChunkPayload ChunkPayload::materialized(Bytes bytes) {
  return ChunkPayload(Rep(std::make_shared<const Bytes>(std::move(bytes))));
}

ChunkPayload ChunkPayload::synthetic(SyntheticChunk ref) { return ChunkPayload(Rep(ref)); }

std::uint64_t ChunkPayload::size() const {
  if (const auto* p = std::get_if<std::shared_ptr<const Bytes>>(&rep_)) return (*p)->size();
  return std::get<SyntheticChunk>(rep_).size;
}

std::span<const std::uint8_t> ChunkPayload::bytes() const {
  if (const auto* p = std::get_if<std::shared_ptr<const Bytes>>(&rep_)) return **p;
  throw std::logic_error("ChunkPayload::bytes on a synthetic payload");
}

const SyntheticChunk& ChunkPayload::synthetic_ref() const {
  if (const auto* s = std::get_if<SyntheticChunk>(&rep_)) return *s;
  throw std::logic_error("ChunkPayload::synthetic_ref on a materialized payload");
}

Bytes ChunkPayload::expand() const {
  if (is_materialized()) {
    auto b = bytes();
    return Bytes(b.begin(), b.end());
  }
  const auto& s = synthetic_ref();
  Bytes out(s.size);
  std::uint64_t state = s.seed ^ (static_cast<std::uint64_t>(s.index) * 0xd1342543de82ef95ULL) ^
                        (s.tamper * 0x2545f4914f6cdd1dULL);
  for (std::uint64_t off = 0; off < s.size; off += 8) {
    const std::uint64_t word = splitmix64(state);
    const std::uint64_t n = std::min<std::uint64_t>(8, s.size - off);
    for (std::uint64_t k = 0; k < n; ++k) out[off + k] = static_cast<std::uint8_t>(word >> (8 * k));
  }
  return out;
}

Digest ChunkPayload::digest() const {
  if (is_materialized()) return sha512(bytes());
  const auto& s = synthetic_ref();
  Bytes desc;
  desc.reserve(40);
  static constexpr char kTag[] = "geost-syn";
  desc.insert(desc.end(), kTag, kTag + 8);
  put_u64(desc, s.seed);
  put_u64(desc, s.index);
  put_u64(desc, s.size);
  put_u64(desc, s.tamper);
  return sha512(desc);
}

ChunkPayload ChunkPayload::tampered(std::uint64_t salt) const {
  if (salt == 0) throw std::invalid_argument("tamper salt must be non-zero");
  if (!is_materialized()) {
    auto s = synthetic_ref();
    s.tamper = salt;
    return synthetic(s);
  }
  Bytes copy = expand();
  if (copy.empty()) {
    copy.push_back(static_cast<std::uint8_t>(salt | 1));
  } else {
    copy[salt % copy.size()] ^= static_cast<std::uint8_t>((salt >> 8) | 1);
  }
  return materialized(std::move(copy));
}

bool operator==(const ChunkPayload& a, const ChunkPayload& b) {
  if (a.is_materialized() != b.is_materialized()) return false;
  if (!a.is_materialized()) return a.synthetic_ref() == b.synthetic_ref();
  auto x = a.bytes();
  auto y = b.bytes();
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

// ---------------------------------------------------------------------------

bool ChunkGeometry::feasible(std::uint64_t total_bytes, std::uint32_t n) {
  if (total_bytes == 0 || n == 0) return false;
  const std::uint64_t cs = (total_bytes + n - 1) / n;
  return cs * (n - 1) < total_bytes;
}

ChunkGeometry ChunkGeometry::make(std::uint64_t total_bytes, std::uint32_t n) {
  if (total_bytes == 0) throw Error(Errc::kEmptyState, "cannot chunk an empty state");
  if (n == 0) throw Error(Errc::kInvalidN, "chunk count must be >= 1");
  if (!feasible(total_bytes, n)) {
    throw Error(Errc::kInvalidN,
                fmt::format("{} bytes cannot be split into {} chunks of ceil(size/n) bytes with a "
                            "non-empty last chunk",
                            total_bytes, n));
  }
  return ChunkGeometry{total_bytes, n, (total_bytes + n - 1) / n};
}

std::uint64_t ChunkGeometry::length(ChunkIndex i) const {
  if (i + 1 < total_chunks) return chunk_size;
  return total_bytes - chunk_size * (total_chunks - 1);
}

ChunkTable ChunkTable::from_serialized(std::span<const std::uint8_t> serialized, std::uint32_t n) {
  ChunkTable t;
  t.geometry_ = ChunkGeometry::make(serialized.size(), n);
  t.chunks_.reserve(n);
  for (ChunkIndex i = 0; i < n; ++i) {
    auto piece = serialized.subspan(t.geometry_.offset(i), t.geometry_.length(i));
    t.chunks_.push_back(Chunk{i, ChunkPayload::materialized(Bytes(piece.begin(), piece.end()))});
  }
  return t;
}

ChunkTable ChunkTable::synthetic(std::uint64_t total_bytes, std::uint32_t n, std::uint64_t seed) {
  ChunkTable t;
  t.geometry_ = ChunkGeometry::make(total_bytes, n);
  t.synthetic_ = true;
  t.chunks_.reserve(n);
  for (ChunkIndex i = 0; i < n; ++i) {
    t.chunks_.push_back(
        Chunk{i, ChunkPayload::synthetic(SyntheticChunk{seed, i, t.geometry_.length(i), 0})});
  }
  return t;
}

ChunkTable chunkify(std::span<const std::uint8_t> serialized, std::uint32_t n) {
  return ChunkTable::from_serialized(serialized, n);
}

Bytes concatenate(std::span<const Chunk> chunks, std::uint32_t total_chunks) {
  std::vector<const Chunk*> by_index(total_chunks, nullptr);
  for (const auto& c : chunks) {
    if (c.index >= total_chunks) {
      throw Error(Errc::kMalformedState, fmt::format("chunk index {} out of range", c.index));
    }
    if (by_index[c.index] != nullptr) {
      throw Error(Errc::kMalformedState, fmt::format("duplicate chunk index {}", c.index));
    }
    by_index[c.index] = &c;
  }
  std::uint64_t total = 0;
  for (ChunkIndex i = 0; i < total_chunks; ++i) {
    if (by_index[i] == nullptr) {
      throw Error(Errc::kMissingChunk, fmt::format("missing chunk {}", i));
    }
    total += by_index[i]->data.size();
  }
  Bytes out;
  out.reserve(total);
  for (const Chunk* c : by_index) {
    auto b = c->data.bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

StateImage reassemble(std::span<const Chunk> chunks, std::uint32_t total_chunks) {
  return deserialize_state(concatenate(chunks, total_chunks));
}

// ---------------------------------------------------------------------------

void CounterService::execute(ServiceState& state, const LogEntry& entry) const {
  if (state.snapshot.size() < 8) state.snapshot.resize(8, 0);
  std::uint64_t delta = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(8, entry.payload.size()); ++i) {
    delta |= static_cast<std::uint64_t>(entry.payload[i]) << (8 * i);
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(state.snapshot[i]) << (8 * i);
  v += delta;  // two's complement wraparound
  for (int i = 0; i < 8; ++i) state.snapshot[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::int64_t CounterService::value(const ServiceState& state) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(8, state.snapshot.size()); ++i) {
    v |= static_cast<std::uint64_t>(state.snapshot[i]) << (8 * i);
  }
  return static_cast<std::int64_t>(v);
}

Bytes CounterService::encode(std::int64_t v) {
  Bytes out;
  put_u64(out, static_cast<std::uint64_t>(v));
  return out;
}

std::vector<const LogEntry*> replay_order(const StateImage& state,
                                          std::span<const LogEntry> buffered_log) {
  std::vector<const LogEntry*> order;
  order.reserve(state.log.size() + buffered_log.size());
  for (std::size_t i = 0; i < state.log.size(); ++i) {
    if (i > 0 && state.log[i].sequence_number <= state.log[i - 1].sequence_number) {
      throw Error(Errc::kMalformedState,
                  fmt::format("log sequence numbers not increasing at position {}", i));
    }
    order.push_back(&state.log[i]);
  }
  const bool have_log = !state.log.empty();
  std::uint64_t last = have_log ? state.log.back().sequence_number : 0;
  bool started = have_log;
  for (const auto& e : buffered_log) {
    if (have_log && e.sequence_number <= state.log.back().sequence_number) continue;
    if (started && e.sequence_number != last + 1) {
      throw Error(Errc::kGapInLog, fmt::format("log gap: expected sequence {} but got {}",
                                               last + 1, e.sequence_number));
    }
    order.push_back(&e);
    last = e.sequence_number;
    started = true;
  }
  return order;
}

}  // namespace geost
