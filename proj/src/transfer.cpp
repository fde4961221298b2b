#include "geost/transfer.hpp"

#include <fmt/format.h>

namespace geost {

TransferSession::TransferSession(ReplicaId self, std::shared_ptr<const ChunkTable> table,
                                 FaultModel mode)
    : self_(self), table_(std::move(table)), mode_(mode) {
  if (!table_) throw std::invalid_argument("TransferSession needs a chunk table");
}

const std::vector<ChunkHash>& TransferSession::hashes() {
  if (!hashes_) hashes_ = compute_all_hashes(*table_);
  return *hashes_;
}

const Digest& TransferSession::whole_digest() {
  if (!whole_) whole_ = whole_state_digest(*table_);
  return *whole_;
}

std::optional<HashResponse> TransferSession::on_hash_request(ReplicaId requester,
                                                             const HashRequest& request) {
  if (mode_ == FaultModel::kCft) {
    diagnostics_.push_back(
        fmt::format("protocol violation: hash request from {} in CFT mode", to_string(requester)));
    return std::nullopt;
  }
  if (request.scope == HashScope::kWholeState) {
    const ChunkHash h{kWholeStateIndex, whole_digest()};
    return HashResponse{encode_hashes(std::span(&h, 1))};
  }
  return HashResponse{encode_hashes(hashes())};
}

void TransferSession::on_chunk_request(ReplicaId requester, const ChunkRequest& request) {
  ++requests_;
  std::vector<bool> seen(table_->total_chunks(), false);
  if (in_flight_) seen[*in_flight_] = true;
  queue_.clear();
  for (ChunkIndex c : request.indices) {
    if (c >= table_->total_chunks()) {
      diagnostics_.push_back(fmt::format("request from {} names out-of-range chunk {}",
                                         to_string(requester), c));
      continue;
    }
    if (seen[c]) continue;
    seen[c] = true;
    queue_.push_back(c);
  }
}

std::optional<ChunkResponse> TransferSession::next_chunk() {
  if (in_flight_ || queue_.empty()) return std::nullopt;
  const ChunkIndex c = queue_.front();
  queue_.pop_front();
  in_flight_ = c;
  return ChunkResponse{c, table_->chunk(c).data};
}

void TransferSession::transmission_complete() { in_flight_.reset(); }

}  // namespace geost
