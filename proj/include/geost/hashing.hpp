#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "geost/state_model.hpp"
#include "geost/types.hpp"

namespace geost {

/// Index used for the single digest over the whole serialized state.
inline constexpr ChunkIndex kWholeStateIndex = 0xffffffffu;

struct ChunkHash {
  ChunkIndex index = 0;
  Digest digest{};

  friend bool operator==(const ChunkHash&, const ChunkHash&) = default;
};

std::vector<ChunkHash> compute_all_hashes(const ChunkTable& table);

/// Digest over the whole state: SHA-512 of the concatenated chunk bytes for
/// real payloads, SHA-512 of the concatenated chunk digests when any chunk is
/// synthetic. `chunks` must be in index order.
Digest whole_state_digest(std::span<const Chunk> chunks);
inline Digest whole_state_digest(const ChunkTable& table) {
  return whole_state_digest(table.chunks());
}

// Hash wire format: u32 LE entry count, then per entry u32 LE index followed
// by the 64 digest bytes.
inline constexpr std::size_t kHashEntryWireSize = 4 + 64;

Bytes encode_hashes(std::span<const ChunkHash> hashes);

/// nullopt when the buffer is not a well-formed hash list.
std::optional<std::vector<ChunkHash>> decode_hashes(std::span<const std::uint8_t> wire);

enum class Verdict { kVerified, kRejected, kUndecided };

const char* verdict_name(Verdict v);

/// Digests reported by transfer replicas, keyed by chunk index. A sender holds
/// at most one digest per index; a later report replaces the earlier one.
class HashStore {
 public:
  void record(ReplicaId sender, const ChunkHash& hash);

  /// Number of distinct senders currently reporting `digest` for `index`.
  std::size_t support(ChunkIndex index, const Digest& digest) const;

  /// Digests for `index` with at least f+1 supporters, in byte order.
  std::vector<Digest> agreed(ChunkIndex index, std::uint32_t f) const;

  Verdict verify_digest(ChunkIndex index, const Digest& local, std::uint32_t f) const;

  /// Record that `index` passed verification. Throws std::logic_error when no
  /// digest for it has f+1 support.
  void mark_verified(ChunkIndex index, std::uint32_t f);
  const std::set<ChunkIndex>& verified() const { return verified_; }

  std::size_t indices_seen() const { return reports_.size(); }

 private:
  std::unordered_map<ChunkIndex, std::map<ReplicaId, Digest>> reports_;
  std::set<ChunkIndex> verified_;
};

/// Pure check of a received chunk against the store; hashes chunk.data locally.
Verdict verify_chunk(const HashStore& store, const Chunk& chunk, std::uint32_t f);

}  // namespace geost
