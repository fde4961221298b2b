#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "geost/types.hpp"

namespace geost {

/// Floor applied to every bandwidth estimate (bytes/second) so the total
/// weight is always positive.
inline constexpr double kMinEstimate = 1.0;

/// Chunk requests for one round.
struct AllocationPlan {
  std::uint32_t round = 0;
  /// Proportional share of each replica, ascending indices. Every replica in
  /// the weight map has an entry, possibly empty.
  std::map<ReplicaId, std::vector<ChunkIndex>> assignments;
  /// One duplicated chunk for each replica whose share rounded to zero.
  std::map<ReplicaId, ChunkIndex> overlap_assignments;

  /// What to request from `replica`: its share, or its overlap chunk.
  std::vector<ChunkIndex> request_for(ReplicaId replica) const;
  std::map<ReplicaId, std::uint32_t> counts() const;
  std::set<ChunkIndex> assigned() const;
};

/// Largest-remainder (Hamilton) apportionment of `seats` by `weights`; ties in
/// the remainder go to the lower ReplicaId. Throws kNoReplicas on an empty map
/// and kInvalidWeights when no weight is positive or any is negative/NaN.
std::map<ReplicaId, std::uint32_t> largest_remainder(std::uint32_t seats, const WeightMap& weights);

/// Replicas ordered by descending weight, ties by ascending id.
std::vector<ReplicaId> by_descending_weight(const WeightMap& weights);

/// Split `remaining` (any order, unique, each < n_total) into contiguous
/// ascending runs sized by largest_remainder, handed out fastest replica
/// first. Zero-count replicas duplicate the first chunk of the largest run.
AllocationPlan allocate(std::span<const ChunkIndex> remaining, const WeightMap& weights,
                        std::uint32_t n_total);

/// verified ∪ assigned == [0, n_total)
bool covers_all(const AllocationPlan& plan, const std::set<ChunkIndex>& verified,
                std::uint32_t n_total);

/// Passive per-replica reception-rate estimator. Estimates start at 1 and are
/// replaced at each round close by bytes / interval, averaged over the last
/// `smoothing_window` rounds and floored at kMinEstimate.
class BandwidthEstimator {
 public:
  BandwidthEstimator() = default;
  explicit BandwidthEstimator(std::span<const ReplicaId> replicas, std::size_t smoothing_window = 1);

  /// Returns false (and records nothing) for an unknown sender.
  bool observe_bytes(ReplicaId from, std::uint64_t bytes, TimeNs now);

  /// Closes the current round of length `interval` (> 0) and returns the
  /// new estimates in bytes/second.
  const WeightMap& close_round(TimeNs interval);

  const WeightMap& estimates() const { return estimates_; }
  std::uint32_t round() const { return round_; }
  std::uint64_t bytes_this_round(ReplicaId r) const;
  std::uint64_t total_bytes(ReplicaId r) const;

 private:
  std::size_t window_ = 1;
  std::uint32_t round_ = 0;
  WeightMap estimates_;
  std::map<ReplicaId, std::uint64_t> current_;
  std::map<ReplicaId, std::uint64_t> totals_;
  std::map<ReplicaId, std::deque<double>> history_;
};

}  // namespace geost
