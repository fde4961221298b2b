#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "geost/allocation.hpp"
#include "geost/baselines.hpp"
#include "geost/hashing.hpp"
#include "geost/messages.hpp"
#include "geost/state_model.hpp"

namespace geost {

/// BFT integrity check granularity: per chunk as chunks arrive, or once over
/// the reassembled state.
enum class VerificationMode { kPerChunk, kWholeState };

struct RecoveryConfig {
  std::uint32_t n_chunks = 256;
  TimeNs interval = 1000 * kNsPerMs;
  std::uint32_t f = 1;
  FaultModel mode = FaultModel::kBft;
  VerificationMode verification = VerificationMode::kPerChunk;
  std::vector<ReplicaId> transfer_replicas;
  AllocationPolicy policy;
  std::size_t smoothing_window = 1;
  /// Session deadline measured from start(); kNever disables it.
  TimeNs deadline = kNever;

  /// Throws kInvalidConfig / kNoReplicas / kMissingBandwidth.
  void validate() const;
};

enum class Phase { kRequesting, kCompleting, kDone, kTimedOut, kFailed };

const char* phase_name(Phase p);

enum class ChunkOutcome {
  kIgnored,      // unknown sender, bad index, or session not accepting chunks
  kDuplicate,    // index already in C
  kPending,      // buffered, local hash not computed yet
  kUndecided,    // hashed, no digest with f+1 support yet
  kVerified,     // admitted into C
  kRejected,     // agreed digest differs; will be re-requested elsewhere
  kAdmitted,     // admitted without per-chunk verification (CFT / whole-state)
  kAwaitingWholeVerification,  // all chunks present, whole-state check pending
  kCompleted,    // this event completed the transfer
  kFailed,       // all chunks admitted but the state could not be decoded
};

const char* outcome_name(ChunkOutcome o);

struct HashOutcome {
  bool accepted = false;
  std::uint32_t newly_verified = 0;
  std::uint32_t newly_rejected = 0;
  bool completed = false;
};

/// Recovery-replica side of the transfer. Event driven: the host delivers
/// messages, ticks every `interval`, and (optionally) defers local hashing by
/// splitting on_chunk into receive_chunk + verify_candidate.
class RecoverySession {
 public:
  explicit RecoverySession(RecoveryConfig config);

  /// Hash requests (BFT) and the round-0 chunk requests.
  std::vector<Outbound> start(TimeNs now);

  /// Round boundary: re-estimate and re-request.
  std::vector<Outbound> on_tick(TimeNs now);

  ChunkOutcome on_chunk(ReplicaId sender, ChunkIndex index, ChunkPayload data, TimeNs now);

  /// Bandwidth accounting, dedup and buffering only; returns kPending when a
  /// verify_candidate call is required.
  ChunkOutcome receive_chunk(ReplicaId sender, ChunkIndex index, ChunkPayload data, TimeNs now);
  ChunkOutcome verify_candidate(ChunkIndex index, ReplicaId sender);

  HashOutcome on_hashes(ReplicaId sender, std::span<const std::uint8_t> wire);

  /// In whole-state mode, runs the final check once phase() == kCompleting.
  ChunkOutcome finish_whole_state_verification();

  /// Log entry ordered during the transfer.
  void on_log_entry(LogEntry entry);

  /// Moves to kTimedOut when the deadline has passed. Returns true if so.
  bool check_deadline(TimeNs now);

  const RecoveryConfig& config() const { return config_; }
  Phase phase() const { return phase_; }
  std::uint32_t round() const { return round_; }
  std::uint32_t verified_count() const { return verified_count_; }
  bool is_verified(ChunkIndex i) const { return i < verified_.size() && verified_[i].has_value(); }
  std::set<ChunkIndex> verified_set() const;
  std::vector<ChunkIndex> unverified() const;

  const BandwidthEstimator& estimator() const { return estimator_; }
  const HashStore& hash_store() const { return hashes_; }
  const AllocationPlan& last_plan() const { return last_plan_; }
  const std::vector<LogEntry>& buffered_log() const { return buffered_log_; }

  /// Set when a materialized transfer reached kDone.
  const std::optional<StateImage>& recovered_image() const { return image_; }
  const std::optional<ServiceState>& service_state() const { return service_; }
  /// whole_state_digest of the admitted chunks, set at kDone.
  const std::optional<Digest>& state_digest() const { return state_digest_; }

  std::uint32_t rejected_count() const { return rejected_count_; }
  std::uint64_t coverage_checks() const { return coverage_checks_; }
  std::uint64_t coverage_violations() const { return coverage_violations_; }
  /// True if some request ever named an index that was already verified at
  /// the time of the request.
  bool requested_verified_index() const { return requested_verified_; }
  ReplicaId sender_of(ChunkIndex i) const { return sender_.at(i); }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  struct Candidate {
    ChunkPayload data;
    std::optional<Digest> local;
  };

  bool is_transfer_replica(ReplicaId r) const;
  std::vector<Outbound> adaptive_requests();
  std::vector<Outbound> static_requests(bool initial);
  void steer_rejected(AllocationPlan& plan, const WeightMap& weights);
  ChunkOutcome evaluate(ChunkIndex index, ReplicaId sender, Candidate& cand);
  ChunkOutcome admit(ChunkIndex index, ReplicaId sender, ChunkPayload data);
  ChunkOutcome complete();
  void reset_transfer();
  void check_coverage(const AllocationPlan& plan);
  void diag(std::string msg);

  RecoveryConfig config_;
  Phase phase_ = Phase::kRequesting;
  bool started_ = false;
  TimeNs started_at_ = 0;
  TimeNs round_started_at_ = 0;
  std::uint32_t round_ = 0;

  std::vector<std::optional<ChunkPayload>> verified_;
  std::vector<ReplicaId> sender_;
  std::uint32_t verified_count_ = 0;
  std::map<ChunkIndex, std::map<ReplicaId, Candidate>> candidates_;
  HashStore hashes_;
  HashStore whole_hashes_;
  std::optional<Digest> local_whole_;
  BandwidthEstimator estimator_;
  AllocationPlan last_plan_;

  // Rejected chunk -> the sender it must not be requested from next round.
  std::map<ChunkIndex, ReplicaId> avoid_;
  // Static policies: current owner of each index and replicas needing a new request.
  std::vector<ReplicaId> owner_;
  std::set<ReplicaId> dirty_;
  std::map<ReplicaId, std::set<ChunkIndex>> received_from_;

  std::vector<LogEntry> buffered_log_;
  std::optional<StateImage> image_;
  std::optional<ServiceState> service_;
  std::optional<Digest> state_digest_;

  std::uint32_t rejected_count_ = 0;
  std::uint64_t coverage_checks_ = 0;
  std::uint64_t coverage_violations_ = 0;
  bool requested_verified_ = false;
  std::vector<std::string> diagnostics_;
};

}  // namespace geost
