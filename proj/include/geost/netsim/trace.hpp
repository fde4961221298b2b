#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geost/types.hpp"

namespace geost::netsim {

struct TraceSample {
  double time_s = 0.0;
  double bandwidth_mbps = 0.0;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

/// Time-varying bandwidth of one directed link as a step function: each
/// sample holds until the next one. Times before the first sample use the
/// first sample's rate.
struct LinkTrace {
  std::string src;
  std::string dst;
  std::vector<TraceSample> samples;
  double propagation_delay_ms = 0.0;

  static LinkTrace constant(std::string src, std::string dst, double mbps, double delay_ms = 0.0);

  /// Throws kNonMonotonicTime / kInvalidScenario.
  void validate() const;

  /// Rate in bits per second at time t.
  double bits_per_second_at(TimeNs t) const;
  /// Time of the first sample strictly after t, or kNever.
  TimeNs next_change_after(TimeNs t) const;
  TimeNs propagation_delay() const;

  friend bool operator==(const LinkTrace&, const LinkTrace&) = default;
};

TimeNs seconds_to_ns(double s);

/// Delivery time of a `bytes`-sized message that starts serializing at
/// `start` on an otherwise idle link: the serialization time is integrated
/// over the step-function rate, then the propagation delay is added.
/// nullopt when the link never carries the remaining bits (zero forever).
std::optional<TimeNs> transmit(const LinkTrace& link, std::uint64_t bytes, TimeNs start);

/// Serialization finish time only (no propagation delay).
std::optional<TimeNs> serialization_end(const LinkTrace& link, std::uint64_t bytes, TimeNs start);

// Trace CSV: header `time_s,src,dst,bandwidth_mbps`, one row per sample.
// Rows for one (src, dst) pair form one LinkTrace in file order.
std::vector<LinkTrace> parse_traces(std::istream& in);
std::vector<LinkTrace> load_traces(const std::string& path);
void write_traces(std::ostream& out, const std::vector<LinkTrace>& traces);

}  // namespace geost::netsim
