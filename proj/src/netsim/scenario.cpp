#include "geost/netsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "geost/state_model.hpp"

namespace geost::netsim {

const char* fault_name(FaultBehavior b) {
  switch (b) {
    case FaultBehavior::kSilent: return "silent";
    case FaultBehavior::kFakeChunks: return "fake-chunks";
    case FaultBehavior::kFakeHashes: return "fake-hashes";
    case FaultBehavior::kSlow: return "slow";
  }
  return "?";
}

std::optional<FaultBehavior> parse_fault(const std::string& name) {
  if (name == "silent") return FaultBehavior::kSilent;
  if (name == "fake-chunks") return FaultBehavior::kFakeChunks;
  if (name == "fake-hashes") return FaultBehavior::kFakeHashes;
  if (name == "slow") return FaultBehavior::kSlow;
  return std::nullopt;
}

std::optional<std::size_t> Scenario::replica_index(const std::string& region) const {
  for (std::size_t i = 0; i < replicas.size(); ++i) {
    if (replicas[i].region == region) return i;
  }
  return std::nullopt;
}

ReplicaId Scenario::recovery_id() const {
  auto i = replica_index(recovery);
  if (!i) throw Error(Errc::kInvalidScenario, fmt::format("unknown recovery replica '{}'", recovery));
  return ReplicaId(static_cast<std::uint32_t>(*i));
}

std::vector<ReplicaId> Scenario::transfer_ids() const {
  std::vector<ReplicaId> out;
  const ReplicaId r = recovery_id();
  for (std::uint32_t i = 0; i < replicas.size(); ++i) {
    if (ReplicaId(i) != r) out.push_back(ReplicaId(i));
  }
  return out;
}

const LinkTrace* Scenario::find_trace(const std::string& src, const std::string& dst) const {
  for (const auto& t : traces) {
    if (t.src == src && t.dst == dst) return &t;
  }
  return nullptr;
}

AllocationPolicy Scenario::allocation_policy() const {
  AllocationPolicy p;
  p.kind = policy;
  if (policy == PolicyKind::kStaticPremeasured) {
    for (ReplicaId t : transfer_ids()) {
      const auto& region = replicas[t.value].region;
      if (auto it = premeasured_mbps.find(region); it != premeasured_mbps.end()) {
        p.premeasured[t] = it->second;
      }
    }
  }
  return p;
}

void Scenario::validate() const {
  auto bad = [](const std::string& msg) { return Error(Errc::kInvalidScenario, msg); };
  if (replicas.size() < 2) throw bad("scenario needs a recovery replica and at least one transfer replica");
  std::set<std::string> regions;
  for (const auto& r : replicas) {
    if (r.region.empty()) throw bad("replica with empty region label");
    if (!regions.insert(r.region).second) throw bad(fmt::format("duplicate replica '{}'", r.region));
  }
  if (!replica_index(recovery)) throw bad(fmt::format("recovery replica '{}' is not a replica", recovery));
  if (n_chunks == 0) throw Error(Errc::kInvalidN, "n_chunks must be >= 1");
  if (state_size_bytes == 0) throw bad("state_size_bytes must be positive");
  if (!(interval_ms > 0.0)) throw bad("interval_ms must be positive");
  if (!(deadline_s > 0.0) || !std::isfinite(deadline_s)) throw bad("deadline_s must be positive and finite");
  if (verify_ms_per_mib < 0.0 || verify_overhead_ms < 0.0) throw bad("verification cost must be >= 0");
  if (ingress_cap_mbps && !(*ingress_cap_mbps > 0.0)) throw bad("ingress_cap_mbps must be positive");
  if (default_delay_ms < 0.0) throw bad("default_delay_ms must be >= 0");
  if (payload == PayloadMode::kMaterialized && state_size_bytes > 2048 * kMiB) {
    throw bad("materialized payloads are limited to 2048 MiB; use synthetic payloads");
  }

  const auto transfers = transfer_ids();
  if (mode == FaultModel::kBft && transfers.size() < 2ULL * f + 1) {
    throw bad(fmt::format("BFT with f={} needs {} transfer replicas, scenario has {}", f, 2 * f + 1,
                          transfers.size()));
  }

  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& t : traces) {
    t.validate();
    if (!regions.contains(t.src) || !regions.contains(t.dst)) {
      throw bad(fmt::format("trace {}->{} names an unknown replica", t.src, t.dst));
    }
    if (!pairs.insert({t.src, t.dst}).second) {
      throw bad(fmt::format("duplicate trace {}->{}", t.src, t.dst));
    }
  }
  for (ReplicaId t : transfers) {
    const auto& src = replicas[t.value].region;
    if (!pairs.contains({src, recovery})) {
      throw Error(Errc::kIncompleteTraces, fmt::format("missing trace {}->{}", src, recovery));
    }
  }
  if (policy == PolicyKind::kStaticPremeasured) {
    for (ReplicaId t : transfers) {
      const auto& src = replicas[t.value].region;
      auto it = premeasured_mbps.find(src);
      if (it == premeasured_mbps.end()) {
        throw Error(Errc::kMissingBandwidth, fmt::format("no premeasured bandwidth for '{}'", src));
      }
      if (!(it->second >= 0.0)) throw bad(fmt::format("bad premeasured bandwidth for '{}'", src));
    }
  }
  std::set<std::string> faulty;
  for (const auto& fs : faults) {
    if (!regions.contains(fs.replica)) throw bad(fmt::format("fault names unknown replica '{}'", fs.replica));
    if (fs.replica == recovery) throw bad("the recovery replica cannot be faulty");
    if (fs.behavior == FaultBehavior::kSlow && !(fs.slow_factor >= 1.0)) {
      throw bad("slow fault factor must be >= 1");
    }
    if (fs.start_time_s < 0.0) throw bad("fault start time must be >= 0");
    faulty.insert(fs.replica);
  }
  if (payload == PayloadMode::kSynthetic) {
    ChunkGeometry::make(state_size_bytes, n_chunks);
  } else if (!ChunkGeometry::feasible(state_size_bytes + 16 + 24ULL * initial_log_entries, n_chunks)) {
    throw Error(Errc::kInvalidN, fmt::format("state of {} bytes cannot be split into {} chunks",
                                             state_size_bytes, n_chunks));
  }
}

}  // namespace geost::netsim
