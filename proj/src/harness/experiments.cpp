#include "geost/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <fmt/format.h>

namespace geost::harness {

const char* variability_name(Variability v) {
  switch (v) {
    case Variability::kConstant: return "constant";
    case Variability::kSine: return "sine";
    case Variability::kRandomWalk: return "random-walk";
  }
  return "?";
}

std::optional<Variability> parse_variability(const std::string& name) {
  if (name == "constant") return Variability::kConstant;
  if (name == "sine") return Variability::kSine;
  if (name == "random-walk" || name == "walk") return Variability::kRandomWalk;
  return std::nullopt;
}

void TraceGenSpec::validate() const {
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw Error(Errc::kInvalidConfig, fmt::format("amplitude {} outside [0, 1)", amplitude));
  }
  if (model != Variability::kConstant && !(period_s > 0.0 && std::isfinite(period_s))) {
    throw Error(Errc::kInvalidConfig, fmt::format("period {} must be positive", period_s));
  }
  if (!(step_s > 0.0 && std::isfinite(step_s))) {
    throw Error(Errc::kInvalidConfig, fmt::format("step {} must be positive", step_s));
  }
  if (!(duration_s > 0.0 && std::isfinite(duration_s))) {
    throw Error(Errc::kInvalidConfig, fmt::format("duration {} must be positive", duration_s));
  }
}

std::vector<netsim::LinkTrace> generate_traces(const BandwidthMatrix& m, const TraceGenSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto steps = static_cast<std::size_t>(std::floor(spec.duration_s / spec.step_s + 1e-9));

  std::vector<netsim::LinkTrace> out;
  for (std::size_t d = 0; d < m.regions.size(); ++d) {
    if (spec.toward && m.regions[d].code != *spec.toward) continue;
    for (std::size_t s = 0; s < m.regions.size(); ++s) {
      if (s == d) continue;
      netsim::LinkTrace t;
      t.src = m.regions[s].code;
      t.dst = m.regions[d].code;
      const double mean = m.mbps[s][d];
      // Draws happen for every model so the stream layout is model independent.
      const double phase = unit(rng) * 2.0 * std::numbers::pi;
      double walk = 0.0;
      auto add = [&](double time, double mbps) {
        if (!t.samples.empty() && t.samples.back().bandwidth_mbps == mbps) return;
        t.samples.push_back({time, mbps});
      };
      for (std::size_t k = 0; k <= steps; ++k) {
        const double time = static_cast<double>(k) * spec.step_s;
        double factor = 0.0;
        switch (spec.model) {
          case Variability::kConstant:
            break;
          case Variability::kSine:
            factor = spec.amplitude * std::sin(2.0 * std::numbers::pi * time / spec.period_s + phase);
            break;
          case Variability::kRandomWalk: {
            if (k == 0) {
              walk = spec.amplitude * (2.0 * unit(rng) - 1.0);
            } else {
              walk += spec.amplitude * std::sqrt(spec.step_s / spec.period_s) * normal(rng);
              // reflect into [-a, a]
              const double a = spec.amplitude;
              for (int guard = 0; guard < 8 && (walk > a || walk < -a); ++guard) {
                walk = walk > a ? 2 * a - walk : -2 * a - walk;
              }
              walk = std::clamp(walk, -a, a);
            }
            factor = walk;
            break;
          }
        }
        add(time, mean * (1.0 + factor));
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

const PolicyRun& ComparisonReport::run(PolicyKind p) const {
  for (const auto& r : runs) {
    if (r.policy == p) return r;
  }
  throw Error(Errc::kInvalidConfig, fmt::format("policy {} not in comparison", policy_name(p)));
}

double ComparisonReport::reduction(PolicyKind a, PolicyKind b) const {
  for (const auto& r : reductions) {
    if (r.faster == a && r.baseline == b) return r.value;
  }
  throw Error(Errc::kInvalidConfig, "reduction pair not in comparison");
}

ComparisonReport compare(const netsim::Scenario& scenario, std::span<const PolicyKind> policies) {
  const std::set<PolicyKind> distinct(policies.begin(), policies.end());
  if (distinct.size() < 2 || distinct.size() != policies.size()) {
    throw Error(Errc::kInvalidConfig, "compare needs at least two distinct policies");
  }
  ComparisonReport rep;
  for (PolicyKind p : policies) {
    netsim::Scenario sc = scenario;
    sc.policy = p;
    rep.runs.push_back({p, netsim::run(sc)});
  }
  for (const auto& a : rep.runs) {
    for (const auto& b : rep.runs) {
      if (a.policy == b.policy) continue;
      rep.reductions.push_back(
          {a.policy, b.policy, 1.0 - a.report.total_time_s / b.report.total_time_s});
    }
  }
  return rep;
}

void write_comparison(std::ostream& out, const ComparisonReport& report) {
  out << fmt::format("{:<12} {:>10} {:>12} {:>10} {:>8} {:>10}\n", "policy", "outcome", "total_s",
                     "ratio", "rounds", "verify_s");
  for (const auto& r : report.runs) {
    const auto ratio = r.report.finish_ratio();
    out << fmt::format("{:<12} {:>10} {:>12.3f} {:>10} {:>8} {:>10.3f}\n", policy_name(r.policy),
                       phase_name(r.report.outcome), r.report.total_time_s,
                       ratio ? fmt::format("{:.3f}", *ratio) : "-", r.report.rounds,
                       r.report.verify_cpu_s);
  }
  out << "\nper-replica finish (s) / bytes\n";
  for (const auto& r : report.runs) {
    out << fmt::format("  {}:", policy_name(r.policy));
    for (const auto& p : r.report.replicas) {
      out << fmt::format("  {}={}/{}", p.region,
                         p.finish_time_s ? fmt::format("{:.3f}", *p.finish_time_s) : "-",
                         p.bytes_delivered);
    }
    out << '\n';
  }
  out << "\nreductions (1 - t_a / t_b)\n";
  for (const auto& red : report.reductions) {
    out << fmt::format("  {} vs {}: {:+.1f}%\n", policy_name(red.faster), policy_name(red.baseline),
                       100.0 * red.value);
  }
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  std::vector<netsim::SimReport> reports;
  for (const auto& r : report.runs) reports.push_back(r.report);
  netsim::write_report_csv(out, reports);
}

}  // namespace geost::harness
