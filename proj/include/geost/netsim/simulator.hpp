#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geost/netsim/scenario.hpp"

namespace geost::netsim {

/// Processing order for events with equal timestamps (lower first).
enum class EventKind : std::uint8_t {
  kTraceChange = 0,  // link rate change or serialization completion
  kMessageDelivery = 1,
  kVerificationDone = 2,
  kLogDelivery = 3,
  kTick = 4,
};
inline constexpr std::size_t kEventKinds = 5;

const char* event_name(EventKind k);

struct ReplicaReport {
  std::string region;
  std::string name;
  bool faulty = false;
  std::uint64_t bytes_sent = 0;       // messages that began serializing
  std::uint64_t bytes_delivered = 0;  // arrived at the recovery replica before termination
  std::uint64_t bytes_in_flight = 0;  // sent but not delivered at termination
  std::uint32_t chunks_sent = 0;
  std::uint32_t chunks_delivered = 0;
  std::uint32_t chunks_admitted = 0;  // chunks in the final state sent by this replica
  std::optional<double> finish_time_s;  // last chunk delivered
};

struct SimReport {
  std::string scenario;
  std::string policy;
  std::string mode;
  std::string verification;
  Phase outcome = Phase::kRequesting;
  double total_time_s = 0.0;  // start to termination
  std::uint32_t rounds = 0;
  std::uint32_t rejected = 0;
  double verify_cpu_s = 0.0;          // total recovery-side hashing time charged
  double whole_verify_span_s = 0.0;   // whole-state mode: final check duration
  std::uint64_t events = 0;
  std::array<std::uint64_t, kEventKinds> events_by_kind{};
  std::uint64_t coverage_checks = 0;
  std::uint64_t coverage_violations = 0;
  bool requested_verified_index = false;
  std::uint32_t buffered_log_entries = 0;
  std::optional<bool> state_matches;  // recovered state equals the honest one
  std::string state_digest;
  std::vector<ReplicaReport> replicas;  // transfer replicas, ascending id

  bool done() const { return outcome == Phase::kDone; }
  /// max/min finish time over replicas that delivered at least one chunk.
  std::optional<double> finish_ratio() const;
};

struct RunOptions {
  std::ostream* event_log = nullptr;
};

/// Run one scenario to completion or deadline. Deterministic in (scenario, seed).
SimReport run(const Scenario& scenario, const RunOptions& options = {});

void write_report_csv(std::ostream& out, const std::vector<SimReport>& reports);
void write_report_summary(std::ostream& out, const SimReport& report);

}  // namespace geost::netsim
