#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "geost/types.hpp"

namespace geost {

struct LogEntry {
  std::uint64_t sequence_number = 0;
  Bytes payload;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

/// The replicated service state as transferred: a checkpoint plus the log of
/// requests executed after it.
struct StateImage {
  Bytes checkpoint;
  std::vector<LogEntry> log;

  friend bool operator==(const StateImage&, const StateImage&) = default;
};

// Wire framing (all integers little-endian u64):
//   entry_count | checkpoint_len | checkpoint bytes |
//   { sequence_number | payload_len | payload bytes } * entry_count
Bytes serialize_state(const StateImage& state);
std::uint64_t serialized_size(const StateImage& state);

/// Throws Error{kMalformedState} when the framing is inconsistent.
StateImage deserialize_state(std::span<const std::uint8_t> bytes);

/// Descriptor for chunk content produced on demand from (seed, index).
/// `tamper != 0` marks a corrupted copy.
struct SyntheticChunk {
  std::uint64_t seed = 0;
  ChunkIndex index = 0;
  std::uint64_t size = 0;
  std::uint64_t tamper = 0;

  friend bool operator==(const SyntheticChunk&, const SyntheticChunk&) = default;
};

/// Chunk content: either real bytes (shared, immutable) or a synthetic
/// descriptor used by timing-only runs.
class ChunkPayload {
 public:
  ChunkPayload() : rep_(std::make_shared<const Bytes>()) {}

  static ChunkPayload materialized(Bytes bytes);
  static ChunkPayload synthetic(SyntheticChunk ref);

  std::uint64_t size() const;
  bool is_materialized() const {
    return std::holds_alternative<std::shared_ptr<const Bytes>>(rep_);
  }

  /// Real bytes; throws std::logic_error for synthetic payloads.
  std::span<const std::uint8_t> bytes() const;
  const SyntheticChunk& synthetic_ref() const;

  /// Deterministic expansion of a synthetic payload (copy for real bytes).
  Bytes expand() const;

  /// SHA-512 of the bytes, or of the descriptor for synthetic payloads.
  Digest digest() const;

  /// A corrupted copy: one flipped byte for real payloads, a tamper tag for
  /// synthetic ones. `salt` selects the corruption and must be non-zero.
  ChunkPayload tampered(std::uint64_t salt) const;

  friend bool operator==(const ChunkPayload& a, const ChunkPayload& b);

 private:
  using Rep = std::variant<std::shared_ptr<const Bytes>, SyntheticChunk>;
  explicit ChunkPayload(Rep rep) : rep_(std::move(rep)) {}

  Rep rep_;
};

struct Chunk {
  ChunkIndex index = 0;
  ChunkPayload data;
};

/// Chunk geometry: chunk_size = ceil(total / n), every chunk is full except
/// the last, which must be non-empty.
struct ChunkGeometry {
  std::uint64_t total_bytes = 0;
  std::uint32_t total_chunks = 0;
  std::uint64_t chunk_size = 0;

  /// Throws kEmptyState / kInvalidN when no valid split exists.
  static ChunkGeometry make(std::uint64_t total_bytes, std::uint32_t n);
  static bool feasible(std::uint64_t total_bytes, std::uint32_t n);

  std::uint64_t offset(ChunkIndex i) const { return chunk_size * i; }
  std::uint64_t length(ChunkIndex i) const;
};

class ChunkTable {
 public:
  ChunkTable() = default;

  static ChunkTable from_serialized(std::span<const std::uint8_t> serialized, std::uint32_t n);
  static ChunkTable synthetic(std::uint64_t total_bytes, std::uint32_t n, std::uint64_t seed);

  std::uint32_t total_chunks() const { return geometry_.total_chunks; }
  std::uint64_t chunk_size() const { return geometry_.chunk_size; }
  std::uint64_t total_bytes() const { return geometry_.total_bytes; }
  const ChunkGeometry& geometry() const { return geometry_; }
  bool is_synthetic() const { return synthetic_; }

  const Chunk& chunk(ChunkIndex i) const { return chunks_.at(i); }
  std::span<const Chunk> chunks() const { return chunks_; }

 private:
  ChunkGeometry geometry_;
  std::vector<Chunk> chunks_;
  bool synthetic_ = false;
};

/// Split the serialized state into n chunks.
ChunkTable chunkify(std::span<const std::uint8_t> serialized, std::uint32_t n);

/// Inverse of chunkify + serialize. Chunks may be in any order but each index
/// in [0, total_chunks) must appear exactly once.
StateImage reassemble(std::span<const Chunk> chunks, std::uint32_t total_chunks);

/// Concatenation of chunk bytes in index order (same preconditions as reassemble).
Bytes concatenate(std::span<const Chunk> chunks, std::uint32_t total_chunks);

/// Live service state after checkpoint restore and log replay.
struct ServiceState {
  Bytes snapshot;
  std::uint64_t last_applied = 0;

  friend bool operator==(const ServiceState&, const ServiceState&) = default;
};

/// Toy deterministic service: a signed 64-bit little-endian counter stored in
/// snapshot bytes [0, 8); each log payload is an LE int64 delta.
struct CounterService {
  void execute(ServiceState& state, const LogEntry& entry) const;
  static std::int64_t value(const ServiceState& state);
  static Bytes encode(std::int64_t v);
};

template <class S>
concept ReplicatedService = requires(const S& s, ServiceState& st, const LogEntry& e) {
  s.execute(st, e);
};

/// The entries to replay after restoring the checkpoint, oldest first: all of
/// L, then the buffered entries newer than L. Throws kGapInLog when the
/// buffered entries do not continue L contiguously.
std::vector<const LogEntry*> replay_order(const StateImage& state,
                                          std::span<const LogEntry> buffered_log);

template <ReplicatedService S = CounterService>
ServiceState apply_recovered(const StateImage& state, std::span<const LogEntry> buffered_log,
                             const S& service = {}) {
  const auto order = replay_order(state, buffered_log);
  ServiceState out{state.checkpoint, 0};
  for (const LogEntry* e : order) {
    service.execute(out, *e);
    out.last_applied = e->sequence_number;
  }
  return out;
}

}  // namespace geost
