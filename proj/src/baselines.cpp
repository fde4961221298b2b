#include "geost/baselines.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace geost {

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kAdaptive: return "adaptive";
    case PolicyKind::kStaticEqual: return "cst";
    case PolicyKind::kStaticPremeasured: return "premeasured";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  if (name == "adaptive" || name == "proposed") return PolicyKind::kAdaptive;
  if (name == "cst" || name == "static-equal" || name == "equal") return PolicyKind::kStaticEqual;
  if (name == "premeasured" || name == "static-premeasured") return PolicyKind::kStaticPremeasured;
  return std::nullopt;
}

void AllocationPolicy::validate(std::span<const ReplicaId> replicas) const {
  if (kind != PolicyKind::kStaticPremeasured) return;
  for (ReplicaId r : replicas) {
    if (!premeasured.contains(r)) {
      throw Error(Errc::kMissingBandwidth,
                  fmt::format("no premeasured bandwidth for replica {}", to_string(r)));
    }
  }
}

AllocationPlan static_equal_allocate(std::span<const ChunkIndex> indices,
                                     std::span<const ReplicaId> replicas) {
  if (replicas.empty()) throw Error(Errc::kNoReplicas, "static split needs at least one replica");
  std::vector<ReplicaId> ids(replicas.begin(), replicas.end());
  std::sort(ids.begin(), ids.end());
  std::vector<ChunkIndex> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());

  AllocationPlan plan;
  const std::size_t base = sorted.size() / ids.size();
  const std::size_t extra = sorted.size() % ids.size();
  std::size_t pos = 0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const std::size_t n = base + (k < extra ? 1 : 0);
    plan.assignments[ids[k]].assign(sorted.begin() + static_cast<std::ptrdiff_t>(pos),
                                    sorted.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
  }
  return plan;
}

AllocationPlan static_premeasured_allocate(std::span<const ChunkIndex> indices,
                                           const WeightMap& premeasured,
                                           std::span<const ReplicaId> replicas) {
  if (replicas.empty()) throw Error(Errc::kNoReplicas, "static split needs at least one replica");
  AllocationPolicy::static_premeasured(premeasured).validate(replicas);
  WeightMap weights;
  for (ReplicaId r : replicas) weights[r] = premeasured.at(r);
  const ChunkIndex n_total =
      indices.empty() ? 0 : *std::max_element(indices.begin(), indices.end()) + 1;
  return allocate(indices, weights, n_total);
}

ReplicaId next_replica_by_id(std::span<const ReplicaId> replicas, ReplicaId after) {
  if (replicas.empty()) throw Error(Errc::kNoReplicas, "no replicas");
  std::vector<ReplicaId> ids(replicas.begin(), replicas.end());
  std::sort(ids.begin(), ids.end());
  auto it = std::upper_bound(ids.begin(), ids.end(), after);
  return it == ids.end() ? ids.front() : *it;
}

}  // namespace geost
