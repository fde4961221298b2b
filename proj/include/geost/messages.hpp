#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "geost/state_model.hpp"
#include "geost/types.hpp"

namespace geost {

enum class HashScope : std::uint8_t { kPerChunk, kWholeState };

struct HashRequest {
  HashScope scope = HashScope::kPerChunk;
};

/// Hash list in the hash wire format (see hashing.hpp).
struct HashResponse {
  Bytes wire;
};

struct ChunkRequest {
  std::uint32_t round = 0;
  std::vector<ChunkIndex> indices;
};

struct ChunkResponse {
  ChunkIndex index = 0;
  ChunkPayload data;
};

using Message = std::variant<HashRequest, HashResponse, ChunkRequest, ChunkResponse>;

struct Outbound {
  ReplicaId to;
  Message message;
};

// Every message carries an 8-byte header (u32 type, u32 length); bodies are
// HashRequest: 1 byte scope; HashResponse: the hash wire bytes;
// ChunkRequest: u32 round, u32 count, u32 per index;
// ChunkResponse: u32 index, then the chunk bytes.
inline constexpr std::uint64_t kMessageHeaderBytes = 8;

std::uint64_t wire_size(const Message& m);
const char* message_name(const Message& m);

}  // namespace geost
