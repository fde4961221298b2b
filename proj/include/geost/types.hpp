#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace geost {

using Bytes = std::vector<std::uint8_t>;

/// Identity of a replica. Ordering by id is used for every tie-break.
struct ReplicaId {
  std::uint32_t value = 0;

  constexpr ReplicaId() = default;
  constexpr explicit ReplicaId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(ReplicaId, ReplicaId) = default;
};

using ChunkIndex = std::uint32_t;

/// Simulated or host time in nanoseconds.
using TimeNs = std::int64_t;

inline constexpr TimeNs kNsPerMs = 1'000'000;
inline constexpr TimeNs kNsPerSecond = 1'000'000'000;
inline constexpr TimeNs kNever = INT64_MAX;

inline constexpr double to_seconds(TimeNs t) {
  return static_cast<double>(t) / static_cast<double>(kNsPerSecond);
}

inline constexpr std::uint64_t kMiB = 1024ULL * 1024ULL;

/// SHA-512 digest.
using Digest = std::array<std::uint8_t, 64>;

/// Per-replica weights (bandwidth estimates, premeasured rates, ...).
using WeightMap = std::map<ReplicaId, double>;

enum class FaultModel { kBft, kCft };

enum class Errc {
  kEmptyState,
  kInvalidN,
  kMissingChunk,
  kMalformedState,
  kGapInLog,
  kNoReplicas,
  kInvalidWeights,
  kMissingBandwidth,
  kInvalidConfig,
  kInvalidScenario,
  kIncompleteTraces,
  kParseError,
  kNonMonotonicTime,
};

const char* errc_name(Errc code);

/// Error raised by every module. `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

std::string to_string(ReplicaId id);
std::string to_hex(const Digest& digest);

}  // namespace geost

template <>
struct std::hash<geost::ReplicaId> {
  std::size_t operator()(geost::ReplicaId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
