#pragma once

#include <string>
#include <vector>

#include "geost/baselines.hpp"
#include "geost/netsim/scenario.hpp"

namespace geost::harness {

struct Region {
  std::string code;  // region label used by scenarios and traces
  std::string name;
};

/// Measured mean bandwidths between regions, Mbps. mbps[s][d] is the rate
/// from regions[s] to regions[d]; the diagonal is unused.
struct BandwidthMatrix {
  std::string group;
  std::vector<Region> regions;
  std::vector<std::vector<double>> mbps;

  std::size_t index_of(const std::string& code) const;  // throws kInvalidScenario
  double at(const std::string& src, const std::string& dst) const;
};

const BandwidthMatrix& group_a();
const BandwidthMatrix& group_b();
/// "a" / "b" / "group_a" / "group_b" (case-insensitive); throws kInvalidScenario.
const BandwidthMatrix& find_group(const std::string& name);

/// Approximate one-way delays between region pairs in ms, for the
/// `delays: "approx"` preset. Not taken from any measurement campaign.
double approx_delay_ms(const std::string& src, const std::string& dst);

/// Constant-rate scenario over a group: every directed pair gets a trace at
/// its matrix value, and the premeasured map holds the inbound column.
netsim::Scenario make_static_scenario(const BandwidthMatrix& m, const std::string& recovery,
                                      PolicyKind policy = PolicyKind::kAdaptive,
                                      bool approx_delays = false);

}  // namespace geost::harness
