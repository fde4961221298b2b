#include "geost/hashing.hpp"

#include <algorithm>

#include "geost/sha512.hpp"

namespace geost {
namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  return v;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kVerified: return "Verified";
    case Verdict::kRejected: return "Rejected";
    case Verdict::kUndecided: return "Undecided";
  }
  return "?";
}

std::vector<ChunkHash> compute_all_hashes(const ChunkTable& table) {
  std::vector<ChunkHash> out;
  out.reserve(table.total_chunks());
  for (const auto& c : table.chunks()) out.push_back(ChunkHash{c.index, c.data.digest()});
  return out;
}

Digest whole_state_digest(std::span<const Chunk> chunks) {
  const bool real = std::all_of(chunks.begin(), chunks.end(),
                                [](const Chunk& c) { return c.data.is_materialized(); });
  Sha512Stream s;
  for (const auto& c : chunks) {
    if (real) {
      s.update(c.data.bytes());
    } else {
      const Digest d = c.data.digest();
      s.update(d);
    }
  }
  return s.finish();
}

Bytes encode_hashes(std::span<const ChunkHash> hashes) {
  Bytes out;
  out.reserve(4 + hashes.size() * kHashEntryWireSize);
  put_u32(out, static_cast<std::uint32_t>(hashes.size()));
  for (const auto& h : hashes) {
    put_u32(out, h.index);
    out.insert(out.end(), h.digest.begin(), h.digest.end());
  }
  return out;
}

std::optional<std::vector<ChunkHash>> decode_hashes(std::span<const std::uint8_t> wire) {
  if (wire.size() < 4) return std::nullopt;
  const std::uint32_t count = get_u32(wire, 0);
  if ((wire.size() - 4) % kHashEntryWireSize != 0 ||
      (wire.size() - 4) / kHashEntryWireSize != count) {
    return std::nullopt;
  }
  std::vector<ChunkHash> out(count);
  std::size_t pos = 4;
  for (auto& h : out) {
    h.index = get_u32(wire, pos);
    std::copy_n(wire.begin() + static_cast<std::ptrdiff_t>(pos + 4), 64, h.digest.begin());
    pos += kHashEntryWireSize;
  }
  return out;
}

void HashStore::record(ReplicaId sender, const ChunkHash& hash) {
  reports_[hash.index][sender] = hash.digest;
}

std::size_t HashStore::support(ChunkIndex index, const Digest& digest) const {
  auto it = reports_.find(index);
  if (it == reports_.end()) return 0;
  return static_cast<std::size_t>(
      std::count_if(it->second.begin(), it->second.end(),
                    [&](const auto& kv) { return kv.second == digest; }));
}

std::vector<Digest> HashStore::agreed(ChunkIndex index, std::uint32_t f) const {
  std::vector<Digest> out;
  auto it = reports_.find(index);
  if (it == reports_.end()) return out;
  std::map<Digest, std::size_t> counts;
  for (const auto& [sender, d] : it->second) ++counts[d];
  for (const auto& [d, n] : counts) {
    if (n >= static_cast<std::size_t>(f) + 1) out.push_back(d);
  }
  return out;
}

Verdict HashStore::verify_digest(ChunkIndex index, const Digest& local, std::uint32_t f) const {
  const auto quorum = agreed(index, f);
  if (quorum.empty()) return Verdict::kUndecided;
  if (std::find(quorum.begin(), quorum.end(), local) != quorum.end()) return Verdict::kVerified;
  return Verdict::kRejected;
}

void HashStore::mark_verified(ChunkIndex index, std::uint32_t f) {
  if (agreed(index, f).empty()) {
    throw std::logic_error("HashStore::mark_verified without f+1 agreement");
  }
  verified_.insert(index);
}

Verdict verify_chunk(const HashStore& store, const Chunk& chunk, std::uint32_t f) {
  return store.verify_digest(chunk.index, chunk.data.digest(), f);
}

}  // namespace geost
