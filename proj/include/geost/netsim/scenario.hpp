#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geost/baselines.hpp"
#include "geost/netsim/trace.hpp"
#include "geost/recovery.hpp"
#include "geost/types.hpp"

namespace geost::netsim {

enum class FaultBehavior { kSilent, kFakeChunks, kFakeHashes, kSlow };

const char* fault_name(FaultBehavior b);
std::optional<FaultBehavior> parse_fault(const std::string& name);

struct FaultSpec {
  std::string replica;  // region label
  FaultBehavior behavior = FaultBehavior::kSilent;
  double slow_factor = 1.0;  // kSlow: outbound rate divided by this
  double start_time_s = 0.0;
};

/// Real chunk bytes with real SHA-512, or on-demand synthetic payloads for
/// timing runs at large state sizes.
enum class PayloadMode { kMaterialized, kSynthetic };

struct ReplicaSpec {
  std::string region;  // node identifier used by traces
  std::string name;    // display name
};

struct Scenario {
  std::string name = "scenario";
  std::vector<ReplicaSpec> replicas;  // ReplicaId = position in this list
  std::string recovery;
  std::uint64_t state_size_bytes = 1000 * kMiB;
  std::uint32_t n_chunks = 256;
  double interval_ms = 1000.0;
  std::uint32_t f = 1;
  FaultModel mode = FaultModel::kBft;
  VerificationMode verification = VerificationMode::kPerChunk;
  PolicyKind policy = PolicyKind::kAdaptive;
  std::map<std::string, double> premeasured_mbps;  // sender region -> Mbps into recovery
  PayloadMode payload = PayloadMode::kSynthetic;
  std::vector<LinkTrace> traces;
  /// Delay for directed links without a trace (control direction).
  double default_delay_ms = 0.0;
  std::vector<FaultSpec> faults;
  double deadline_s = 3600.0;
  std::uint64_t seed = 1;
  /// Recovery-side verification CPU cost model.
  double verify_ms_per_mib = 3.0;  // ~3 s per 1000 MiB
  double verify_overhead_ms = 0.0;
  /// Aggregate ingress cap at the recovery replica (Mbps); none by default.
  std::optional<double> ingress_cap_mbps;
  std::size_t smoothing_window = 1;
  /// Entries in the transferred log, and period of entries ordered during the
  /// transfer (0 disables). Materialized payloads only.
  std::uint32_t initial_log_entries = 4;
  double log_interval_ms = 250.0;

  std::optional<std::size_t> replica_index(const std::string& region) const;
  ReplicaId recovery_id() const;
  std::vector<ReplicaId> transfer_ids() const;
  const LinkTrace* find_trace(const std::string& src, const std::string& dst) const;
  AllocationPolicy allocation_policy() const;

  /// Throws kInvalidScenario, kIncompleteTraces, kMissingBandwidth, kInvalidN.
  void validate() const;
};

}  // namespace geost::netsim
