#include "geost/recovery.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace geost {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kRequesting: return "Requesting";
    case Phase::kCompleting: return "Completing";
    case Phase::kDone: return "Done";
    case Phase::kTimedOut: return "TimedOut";
    case Phase::kFailed: return "Failed";
  }
  return "?";
}

const char* outcome_name(ChunkOutcome o) {
  switch (o) {
    case ChunkOutcome::kIgnored: return "Ignored";
    case ChunkOutcome::kDuplicate: return "Duplicate";
    case ChunkOutcome::kPending: return "Pending";
    case ChunkOutcome::kUndecided: return "Undecided";
    case ChunkOutcome::kVerified: return "Verified";
    case ChunkOutcome::kRejected: return "Rejected";
    case ChunkOutcome::kAdmitted: return "Admitted";
    case ChunkOutcome::kAwaitingWholeVerification: return "AwaitingWholeVerification";
    case ChunkOutcome::kCompleted: return "Completed";
    case ChunkOutcome::kFailed: return "Failed";
  }
  return "?";
}

void RecoveryConfig::validate() const {
  if (n_chunks == 0) throw Error(Errc::kInvalidConfig, "n_chunks must be >= 1");
  if (interval <= 0) throw Error(Errc::kInvalidConfig, "interval must be positive");
  if (transfer_replicas.empty()) throw Error(Errc::kNoReplicas, "no transfer replicas configured");
  std::vector<ReplicaId> ids = transfer_replicas;
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw Error(Errc::kInvalidConfig, "duplicate transfer replica");
  }
  if (mode == FaultModel::kBft && ids.size() < 2ULL * f + 1) {
    throw Error(Errc::kInvalidConfig,
                fmt::format("BFT mode needs >= 2f+1 = {} transfer replicas, have {}", 2 * f + 1,
                            ids.size()));
  }
  policy.validate(ids);
}

RecoverySession::RecoverySession(RecoveryConfig config) : config_(std::move(config)) {
  config_.validate();
  std::sort(config_.transfer_replicas.begin(), config_.transfer_replicas.end());
  verified_.resize(config_.n_chunks);
  sender_.resize(config_.n_chunks);
  estimator_ = BandwidthEstimator(config_.transfer_replicas, config_.smoothing_window);
}

bool RecoverySession::is_transfer_replica(ReplicaId r) const {
  return std::binary_search(config_.transfer_replicas.begin(), config_.transfer_replicas.end(), r);
}

void RecoverySession::diag(std::string msg) {
  if (diagnostics_.size() < 1000) diagnostics_.push_back(std::move(msg));
}

std::set<ChunkIndex> RecoverySession::verified_set() const {
  std::set<ChunkIndex> out;
  for (ChunkIndex i = 0; i < verified_.size(); ++i) {
    if (verified_[i]) out.insert(i);
  }
  return out;
}

std::vector<ChunkIndex> RecoverySession::unverified() const {
  std::vector<ChunkIndex> out;
  out.reserve(config_.n_chunks - verified_count_);
  for (ChunkIndex i = 0; i < verified_.size(); ++i) {
    if (!verified_[i]) out.push_back(i);
  }
  return out;
}

std::vector<Outbound> RecoverySession::start(TimeNs now) {
  if (started_) throw std::logic_error("RecoverySession::start called twice");
  started_ = true;
  started_at_ = now;
  round_started_at_ = now;
  std::vector<Outbound> out;
  if (config_.mode == FaultModel::kBft) {
    const HashScope scope = config_.verification == VerificationMode::kPerChunk
                                ? HashScope::kPerChunk
                                : HashScope::kWholeState;
    for (ReplicaId t : config_.transfer_replicas) out.push_back({t, HashRequest{scope}});
  }
  auto requests = config_.policy.is_static() ? static_requests(true) : adaptive_requests();
  std::move(requests.begin(), requests.end(), std::back_inserter(out));
  return out;
}

std::vector<Outbound> RecoverySession::on_tick(TimeNs now) {
  if (phase_ != Phase::kRequesting && phase_ != Phase::kCompleting) return {};
  if (check_deadline(now)) return {};
  if (now > round_started_at_) estimator_.close_round(now - round_started_at_);
  round_started_at_ = now;
  ++round_;
  if (phase_ == Phase::kCompleting) return {};
  if (verified_count_ == config_.n_chunks) {
    phase_ = Phase::kCompleting;
    return {};
  }
  return config_.policy.is_static() ? static_requests(false) : adaptive_requests();
}

void RecoverySession::check_coverage(const AllocationPlan& plan) {
  ++coverage_checks_;
  const auto verified = verified_set();
  if (!covers_all(plan, verified, config_.n_chunks)) ++coverage_violations_;
  for (ChunkIndex c : plan.assigned()) {
    if (verified.contains(c)) requested_verified_ = true;
  }
}

std::vector<Outbound> RecoverySession::adaptive_requests() {
  const auto remaining = unverified();
  if (remaining.empty()) return {};
  const WeightMap& weights = estimator_.estimates();
  AllocationPlan plan = allocate(remaining, weights, config_.n_chunks);
  plan.round = round_;
  steer_rejected(plan, weights);
  check_coverage(plan);
  last_plan_ = plan;

  std::vector<Outbound> out;
  out.reserve(config_.transfer_replicas.size());
  for (ReplicaId t : config_.transfer_replicas) {
    out.push_back({t, ChunkRequest{round_, plan.request_for(t)}});
  }
  return out;
}

// A rejected chunk is requested from someone other than its previous sender.
void RecoverySession::steer_rejected(AllocationPlan& plan, const WeightMap& weights) {
  const auto order = by_descending_weight(weights);
  for (const auto& [idx, bad] : avoid_) {
    if (is_verified(idx)) continue;
    auto& mine = plan.assignments[bad];
    auto it = std::find(mine.begin(), mine.end(), idx);
    const bool overlap_hit =
        plan.overlap_assignments.contains(bad) && plan.overlap_assignments.at(bad) == idx;
    if (it == mine.end() && !overlap_hit) continue;

    if (it != mine.end()) {
      mine.erase(it);
      auto target = std::find_if(order.begin(), order.end(), [&](ReplicaId r) { return r != bad; });
      if (target != order.end()) {
        plan.overlap_assignments.erase(*target);
        auto& theirs = plan.assignments[*target];
        theirs.insert(std::lower_bound(theirs.begin(), theirs.end(), idx), idx);
      } else {
        mine.push_back(idx);  // single transfer replica: nobody else to ask
        continue;
      }
    }
    if (mine.empty()) {
      // Keep one chunk flowing from `bad` so its bandwidth stays measurable.
      plan.overlap_assignments.erase(bad);
      for (ChunkIndex c : plan.assigned()) {
        if (c != idx) {
          plan.overlap_assignments[bad] = c;
          break;
        }
      }
    }
  }
  avoid_.clear();
}

std::vector<Outbound> RecoverySession::static_requests(bool initial) {
  const auto& replicas = config_.transfer_replicas;
  std::vector<Outbound> out;
  if (initial) {
    std::vector<ChunkIndex> all(config_.n_chunks);
    for (ChunkIndex i = 0; i < config_.n_chunks; ++i) all[i] = i;
    AllocationPlan plan = config_.policy.kind == PolicyKind::kStaticEqual
                              ? static_equal_allocate(all, replicas)
                              : static_premeasured_allocate(all, config_.policy.premeasured, replicas);
    owner_.assign(config_.n_chunks, replicas.front());
    for (const auto& [r, v] : plan.assignments) {
      for (ChunkIndex c : v) owner_[c] = r;
    }
    check_coverage(plan);
    last_plan_ = plan;
    for (ReplicaId t : replicas) out.push_back({t, ChunkRequest{round_, plan.request_for(t)}});
    return out;
  }
  if (dirty_.empty()) return out;
  AllocationPlan plan;
  plan.round = round_;
  for (ChunkIndex i = 0; i < config_.n_chunks; ++i) {
    if (!is_verified(i)) plan.assignments[owner_[i]].push_back(i);
  }
  check_coverage(plan);
  for (ReplicaId t : dirty_) {
    std::vector<ChunkIndex> req;
    const auto& got = received_from_[t];
    for (ChunkIndex c : plan.assignments[t]) {
      if (!got.contains(c)) req.push_back(c);
    }
    out.push_back({t, ChunkRequest{round_, std::move(req)}});
  }
  dirty_.clear();
  last_plan_ = std::move(plan);
  return out;
}

ChunkOutcome RecoverySession::on_chunk(ReplicaId sender, ChunkIndex index, ChunkPayload data,
                                       TimeNs now) {
  const ChunkOutcome r = receive_chunk(sender, index, std::move(data), now);
  if (r != ChunkOutcome::kPending) return r;
  return verify_candidate(index, sender);
}

ChunkOutcome RecoverySession::receive_chunk(ReplicaId sender, ChunkIndex index, ChunkPayload data,
                                            TimeNs now) {
  if (!is_transfer_replica(sender)) {
    diag(fmt::format("chunk {} from unknown sender {} ignored", index, to_string(sender)));
    return ChunkOutcome::kIgnored;
  }
  estimator_.observe_bytes(sender, data.size(), now);
  if (phase_ != Phase::kRequesting) return ChunkOutcome::kIgnored;
  if (index >= config_.n_chunks) {
    diag(fmt::format("chunk index {} from {} out of range", index, to_string(sender)));
    return ChunkOutcome::kIgnored;
  }
  if (config_.policy.is_static()) received_from_[sender].insert(index);
  if (is_verified(index)) return ChunkOutcome::kDuplicate;

  if (config_.mode == FaultModel::kCft || config_.verification == VerificationMode::kWholeState) {
    return admit(index, sender, std::move(data));
  }
  candidates_[index].insert_or_assign(sender, Candidate{std::move(data), std::nullopt});
  return ChunkOutcome::kPending;
}

ChunkOutcome RecoverySession::verify_candidate(ChunkIndex index, ReplicaId sender) {
  if (phase_ != Phase::kRequesting) return ChunkOutcome::kIgnored;
  if (is_verified(index)) {
    candidates_.erase(index);
    return ChunkOutcome::kDuplicate;
  }
  auto it = candidates_.find(index);
  if (it == candidates_.end()) return ChunkOutcome::kIgnored;
  auto cit = it->second.find(sender);
  if (cit == it->second.end()) return ChunkOutcome::kIgnored;
  Candidate& cand = cit->second;
  if (!cand.local) cand.local = cand.data.digest();
  return evaluate(index, sender, cand);
}

ChunkOutcome RecoverySession::evaluate(ChunkIndex index, ReplicaId sender, Candidate& cand) {
  switch (hashes_.verify_digest(index, *cand.local, config_.f)) {
    case Verdict::kVerified: {
      ChunkPayload data = std::move(cand.data);
      hashes_.mark_verified(index, config_.f);
      candidates_.erase(index);
      return admit(index, sender, std::move(data));
    }
    case Verdict::kRejected: {
      auto& per_index = candidates_[index];
      per_index.erase(sender);
      if (per_index.empty()) candidates_.erase(index);
      avoid_[index] = sender;
      ++rejected_count_;
      diag(fmt::format("chunk {} from {} failed verification", index, to_string(sender)));
      if (config_.policy.is_static()) {
        const ReplicaId next = next_replica_by_id(config_.transfer_replicas, sender);
        owner_[index] = next;
        received_from_[next].erase(index);
        dirty_.insert(next);
      }
      return ChunkOutcome::kRejected;
    }
    case Verdict::kUndecided:
      return ChunkOutcome::kUndecided;
  }
  return ChunkOutcome::kUndecided;
}

ChunkOutcome RecoverySession::admit(ChunkIndex index, ReplicaId sender, ChunkPayload data) {
  verified_[index] = std::move(data);
  sender_[index] = sender;
  ++verified_count_;
  if (verified_count_ == config_.n_chunks) {
    if (config_.mode == FaultModel::kBft && config_.verification == VerificationMode::kWholeState) {
      phase_ = Phase::kCompleting;
      return ChunkOutcome::kAwaitingWholeVerification;
    }
    return complete();
  }
  return config_.mode == FaultModel::kBft && config_.verification == VerificationMode::kPerChunk
             ? ChunkOutcome::kVerified
             : ChunkOutcome::kAdmitted;
}

ChunkOutcome RecoverySession::complete() {
  std::vector<Chunk> chunks;
  chunks.reserve(config_.n_chunks);
  bool real = true;
  for (ChunkIndex i = 0; i < config_.n_chunks; ++i) {
    chunks.push_back(Chunk{i, *verified_[i]});
    real = real && verified_[i]->is_materialized();
  }
  state_digest_ = whole_state_digest(chunks);
  if (real) {
    try {
      image_ = reassemble(chunks, config_.n_chunks);
      service_ = apply_recovered(*image_, buffered_log_);
    } catch (const Error& e) {
      diag(fmt::format("state recovery failed: {}", e.what()));
      image_.reset();
      service_.reset();
      phase_ = Phase::kFailed;
      return ChunkOutcome::kFailed;
    }
  }
  candidates_.clear();
  phase_ = Phase::kDone;
  return ChunkOutcome::kCompleted;
}

HashOutcome RecoverySession::on_hashes(ReplicaId sender, std::span<const std::uint8_t> wire) {
  HashOutcome result;
  if (config_.mode == FaultModel::kCft) {
    diag(fmt::format("hash list from {} ignored in CFT mode", to_string(sender)));
    return result;
  }
  if (!is_transfer_replica(sender)) {
    diag(fmt::format("hash list from unknown sender {} ignored", to_string(sender)));
    return result;
  }
  auto decoded = decode_hashes(wire);
  if (!decoded) {
    diag(fmt::format("malformed hash list from {} discarded", to_string(sender)));
    return result;
  }
  const bool whole = config_.verification == VerificationMode::kWholeState;
  if (whole) {
    if (decoded->size() != 1 || decoded->front().index != kWholeStateIndex) {
      diag(fmt::format("bad whole-state hash from {} discarded", to_string(sender)));
      return result;
    }
    whole_hashes_.record(sender, decoded->front());
  } else {
    std::vector<bool> seen(config_.n_chunks, false);
    bool ok = decoded->size() == config_.n_chunks;
    for (const auto& h : *decoded) {
      if (!ok) break;
      ok = h.index < config_.n_chunks && !seen[h.index];
      if (ok) seen[h.index] = true;
    }
    if (!ok) {
      diag(fmt::format("hash list from {} has wrong shape ({} entries), discarded",
                       to_string(sender), decoded->size()));
      return result;
    }
    for (const auto& h : *decoded) hashes_.record(sender, h);
  }
  result.accepted = true;

  if (whole) {
    if (phase_ == Phase::kCompleting && local_whole_) {
      const ChunkOutcome o = finish_whole_state_verification();
      result.completed = o == ChunkOutcome::kCompleted;
      result.newly_rejected = o == ChunkOutcome::kRejected ? 1 : 0;
    }
    return result;
  }
  if (phase_ != Phase::kRequesting) return result;

  std::vector<std::pair<ChunkIndex, ReplicaId>> hashed;
  for (const auto& [idx, per_sender] : candidates_) {
    for (const auto& [s, cand] : per_sender) {
      if (cand.local) hashed.emplace_back(idx, s);
    }
  }
  for (const auto& [idx, s] : hashed) {
    if (phase_ != Phase::kRequesting) break;
    auto it = candidates_.find(idx);
    if (it == candidates_.end()) continue;
    auto cit = it->second.find(s);
    if (cit == it->second.end()) continue;
    switch (evaluate(idx, s, cit->second)) {
      case ChunkOutcome::kVerified: ++result.newly_verified; break;
      case ChunkOutcome::kCompleted:
        ++result.newly_verified;
        result.completed = true;
        break;
      case ChunkOutcome::kRejected: ++result.newly_rejected; break;
      default: break;
    }
  }
  return result;
}

ChunkOutcome RecoverySession::finish_whole_state_verification() {
  if (phase_ != Phase::kCompleting || config_.verification != VerificationMode::kWholeState ||
      config_.mode != FaultModel::kBft) {
    return ChunkOutcome::kIgnored;
  }
  if (!local_whole_) {
    std::vector<Chunk> chunks;
    chunks.reserve(config_.n_chunks);
    for (ChunkIndex i = 0; i < config_.n_chunks; ++i) chunks.push_back(Chunk{i, *verified_[i]});
    local_whole_ = whole_state_digest(chunks);
  }
  switch (whole_hashes_.verify_digest(kWholeStateIndex, *local_whole_, config_.f)) {
    case Verdict::kVerified:
      return complete();
    case Verdict::kRejected:
      diag("whole-state digest mismatch; restarting transfer");
      reset_transfer();
      return ChunkOutcome::kRejected;
    case Verdict::kUndecided:
      return ChunkOutcome::kUndecided;
  }
  return ChunkOutcome::kUndecided;
}

void RecoverySession::reset_transfer() {
  for (auto& v : verified_) v.reset();
  verified_count_ = 0;
  local_whole_.reset();
  ++rejected_count_;
  received_from_.clear();
  dirty_.insert(config_.transfer_replicas.begin(), config_.transfer_replicas.end());
  phase_ = Phase::kRequesting;
}

void RecoverySession::on_log_entry(LogEntry entry) {
  if (phase_ == Phase::kDone) return;
  buffered_log_.push_back(std::move(entry));
}

bool RecoverySession::check_deadline(TimeNs now) {
  if (config_.deadline == kNever) return false;
  if (phase_ != Phase::kRequesting && phase_ != Phase::kCompleting) return false;
  if (now - started_at_ < config_.deadline) return false;
  phase_ = Phase::kTimedOut;
  return true;
}

}  // namespace geost
