#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "geost/allocation.hpp"

namespace geost {

enum class PolicyKind { kAdaptive, kStaticEqual, kStaticPremeasured };

const char* policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

/// How the recovery replica splits chunks among transfer replicas.
struct AllocationPolicy {
  PolicyKind kind = PolicyKind::kAdaptive;
  /// Mbps per transfer replica; required for kStaticPremeasured.
  WeightMap premeasured;

  static AllocationPolicy adaptive() { return {}; }
  static AllocationPolicy static_equal() { return {PolicyKind::kStaticEqual, {}}; }
  static AllocationPolicy static_premeasured(WeightMap mbps) {
    return {PolicyKind::kStaticPremeasured, std::move(mbps)};
  }

  bool is_static() const { return kind != PolicyKind::kAdaptive; }

  /// Throws kMissingBandwidth when a premeasured policy lacks a replica.
  void validate(std::span<const ReplicaId> replicas) const;
};

/// CST-style split: contiguous near-equal runs by ascending ReplicaId; the
/// first (|indices| mod |replicas|) replicas get one extra chunk.
AllocationPlan static_equal_allocate(std::span<const ChunkIndex> indices,
                                     std::span<const ReplicaId> replicas);

/// One-shot proportional split by bandwidths measured in advance.
AllocationPlan static_premeasured_allocate(std::span<const ChunkIndex> indices,
                                           const WeightMap& premeasured,
                                           std::span<const ReplicaId> replicas);

/// The replica after `after` in ascending id order, wrapping around.
ReplicaId next_replica_by_id(std::span<const ReplicaId> replicas, ReplicaId after);

}  // namespace geost
