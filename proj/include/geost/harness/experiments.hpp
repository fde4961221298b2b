#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geost/baselines.hpp"
#include "geost/harness/presets.hpp"
#include "geost/netsim/simulator.hpp"

namespace geost::harness {

enum class Variability { kConstant, kSine, kRandomWalk };

const char* variability_name(Variability v);
std::optional<Variability> parse_variability(const std::string& name);

/// Synthetic bandwidth traces around a matrix of means.
struct TraceGenSpec {
  Variability model = Variability::kConstant;
  /// Relative deviation bound: rates stay within mean * [1 - a, 1 + a].
  double amplitude = 0.0;
  double period_s = 20.0;    // sine period; random-walk time scale
  double step_s = 0.5;       // sample spacing
  double duration_s = 120.0;  // last sample time; the final rate holds afterwards
  std::uint64_t seed = 1;
  /// Only pairs into this region when set; all directed pairs otherwise.
  std::optional<std::string> toward;

  /// Throws kInvalidConfig on amplitude outside [0, 1), non-positive period,
  /// step or duration.
  void validate() const;
};

/// One trace per directed pair, in matrix order. Consecutive equal samples
/// are merged, so a zero-amplitude model yields the constant traces.
std::vector<netsim::LinkTrace> generate_traces(const BandwidthMatrix& m, const TraceGenSpec& spec);

struct PolicyRun {
  PolicyKind policy = PolicyKind::kAdaptive;
  netsim::SimReport report;
};

struct Reduction {
  PolicyKind faster;   // a
  PolicyKind baseline;  // b
  double value = 0.0;   // 1 - t_a / t_b
};

struct ComparisonReport {
  std::vector<PolicyRun> runs;
  std::vector<Reduction> reductions;  // every ordered pair (a, b), a != b

  const PolicyRun& run(PolicyKind p) const;
  double reduction(PolicyKind a, PolicyKind b) const;
};

/// Runs the scenario once per policy with everything else, seed included,
/// held fixed. Needs at least two distinct policies (kInvalidConfig).
ComparisonReport compare(const netsim::Scenario& scenario, std::span<const PolicyKind> policies);

void write_comparison(std::ostream& out, const ComparisonReport& report);
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace geost::harness
