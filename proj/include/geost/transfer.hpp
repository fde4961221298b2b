#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geost/hashing.hpp"
#include "geost/messages.hpp"
#include "geost/state_model.hpp"

namespace geost {

/// Transfer-replica side: answers hash requests and streams the requested
/// chunks one message at a time. Each chunk request replaces the queue.
class TransferSession {
 public:
  TransferSession(ReplicaId self, std::shared_ptr<const ChunkTable> table, FaultModel mode);

  ReplicaId self() const { return self_; }
  const ChunkTable& table() const { return *table_; }

  /// nullopt (with a diagnostic) when asked in CFT mode.
  std::optional<HashResponse> on_hash_request(ReplicaId requester, const HashRequest& request);

  /// Replace the send queue. Out-of-range and duplicate indices are skipped,
  /// as is the index currently on the wire.
  void on_chunk_request(ReplicaId requester, const ChunkRequest& request);

  /// Pop the next queued chunk and mark it in flight. nullopt if the queue is
  /// empty or a chunk is already in flight.
  std::optional<ChunkResponse> next_chunk();
  void transmission_complete();

  std::optional<ChunkIndex> in_flight() const { return in_flight_; }
  const std::deque<ChunkIndex>& send_queue() const { return queue_; }

  const std::vector<ChunkHash>& hashes();
  const Digest& whole_digest();

  std::uint32_t requests_received() const { return requests_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  ReplicaId self_;
  std::shared_ptr<const ChunkTable> table_;
  FaultModel mode_;
  std::optional<std::vector<ChunkHash>> hashes_;
  std::optional<Digest> whole_;
  std::deque<ChunkIndex> queue_;
  std::optional<ChunkIndex> in_flight_;
  std::uint32_t requests_ = 0;
  std::vector<std::string> diagnostics_;
};

}  // namespace geost
