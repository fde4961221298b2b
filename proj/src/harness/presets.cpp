#include "geost/harness/presets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

namespace geost::harness {

namespace {

constexpr double kNa = std::numeric_limits<double>::quiet_NaN();

BandwidthMatrix make_group_a() {
  return {"group_a",
          {{"ap-southeast-2", "Sydney"},
           {"sa-east-1", "Sao Paulo"},
           {"us-east-1", "N. Virginia"},
           {"eu-west-1", "Ireland"}},
          {{kNa, 33.7, 57.0, 42.9},
           {33.3, kNa, 102.2, 64.5},
           {56.6, 103.0, kNa, 174.3},
           {42.9, 64.4, 173.3, kNa}}};
}

BandwidthMatrix make_group_b() {
  return {"group_b",
          {{"eu-west-1", "Ireland"},
           {"eu-west-2", "London"},
           {"eu-west-3", "Paris"},
           {"eu-central-1", "Frankfurt"}},
          {{kNa, 857.8, 578.1, 420.8},
           {866.8, kNa, 1219.6, 667.2},
           {594.4, 1234.4, kNa, 1115.5},
           {420.0, 662.4, 1113.6, kNa}}};
}

// Rough great-circle based one-way figures.
const std::map<std::pair<std::string, std::string>, double>& delay_table() {
  static const std::map<std::pair<std::string, std::string>, double> t = {
      {{"ap-southeast-2", "sa-east-1"}, 155.0},
      {{"ap-southeast-2", "us-east-1"}, 100.0},
      {{"ap-southeast-2", "eu-west-1"}, 130.0},
      {{"sa-east-1", "us-east-1"}, 60.0},
      {{"sa-east-1", "eu-west-1"}, 90.0},
      {{"us-east-1", "eu-west-1"}, 35.0},
      {{"eu-west-1", "eu-west-2"}, 6.0},
      {{"eu-west-1", "eu-west-3"}, 9.0},
      {{"eu-west-1", "eu-central-1"}, 12.0},
      {{"eu-west-2", "eu-west-3"}, 4.0},
      {{"eu-west-2", "eu-central-1"}, 7.0},
      {{"eu-west-3", "eu-central-1"}, 5.0},
  };
  return t;
}

}  // namespace

std::size_t BandwidthMatrix::index_of(const std::string& code) const {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].code == code) return i;
  }
  throw Error(Errc::kInvalidScenario, fmt::format("region '{}' not in {}", code, group));
}

double BandwidthMatrix::at(const std::string& src, const std::string& dst) const {
  const auto s = index_of(src);
  const auto d = index_of(dst);
  if (s == d) throw Error(Errc::kInvalidScenario, "no self bandwidth");
  return mbps[s][d];
}

const BandwidthMatrix& group_a() {
  static const BandwidthMatrix m = make_group_a();
  return m;
}

const BandwidthMatrix& group_b() {
  static const BandwidthMatrix m = make_group_b();
  return m;
}

const BandwidthMatrix& find_group(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n == "a" || n == "group_a" || n == "group-a") return group_a();
  if (n == "b" || n == "group_b" || n == "group-b") return group_b();
  throw Error(Errc::kInvalidScenario, fmt::format("unknown group '{}'", name));
}

double approx_delay_ms(const std::string& src, const std::string& dst) {
  if (src == dst) return 0.0;
  const auto& t = delay_table();
  if (auto it = t.find({src, dst}); it != t.end()) return it->second;
  if (auto it = t.find({dst, src}); it != t.end()) return it->second;
  throw Error(Errc::kInvalidScenario, fmt::format("no delay preset for {} -> {}", src, dst));
}

netsim::Scenario make_static_scenario(const BandwidthMatrix& m, const std::string& recovery,
                                      PolicyKind policy, bool approx_delays) {
  netsim::Scenario sc;
  const std::size_t r = m.index_of(recovery);
  sc.name = fmt::format("{}_{}_{}", m.group, m.regions[r].name, policy_name(policy));
  std::replace(sc.name.begin(), sc.name.end(), ' ', '_');
  for (const auto& reg : m.regions) sc.replicas.push_back({reg.code, reg.name});
  sc.recovery = recovery;
  sc.policy = policy;
  for (std::size_t s = 0; s < m.regions.size(); ++s) {
    for (std::size_t d = 0; d < m.regions.size(); ++d) {
      if (s == d) continue;
      const auto& a = m.regions[s].code;
      const auto& b = m.regions[d].code;
      sc.traces.push_back(netsim::LinkTrace::constant(a, b, m.mbps[s][d],
                                                      approx_delays ? approx_delay_ms(a, b) : 0.0));
    }
    if (s != r) sc.premeasured_mbps[m.regions[s].code] = m.mbps[s][r];
  }
  return sc;
}

}  // namespace geost::harness
