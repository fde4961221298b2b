// geost: run, compare and validate state-transfer scenarios; generate traces.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "geost/harness/experiments.hpp"
#include "geost/harness/presets.hpp"
#include "geost/harness/scenario_io.hpp"
#include "geost/netsim/simulator.hpp"

using namespace geost;

namespace {

struct Overrides {
  std::optional<std::string> name, recovery, state_size, mode, verification, policy, payload,
      traces, delays;
  std::optional<std::uint32_t> chunks, f, log_entries;
  std::optional<double> interval_ms, default_delay_ms, deadline, hash_cost, hash_overhead,
      ingress_cap, log_interval_ms;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> smoothing_window;
  std::vector<std::string> faults, premeasured, replicas;

  void attach(CLI::App* app) {
    app->add_option("--name", name, "Scenario name");
    app->add_option("--replica", replicas, "Replace the replica list: region[:name] (repeatable)");
    app->add_option("--recovery", recovery, "Recovery replica region");
    app->add_option("--state-size", state_size, "State size, e.g. 1000MiB");
    app->add_option("--chunks", chunks, "Number of chunks N");
    app->add_option("--interval-ms", interval_ms, "Re-estimation interval I (ms)");
    app->add_option("--f", f, "Tolerated faults f");
    app->add_option("--mode", mode, "bft | cft");
    app->add_option("--hash-mode", verification, "per-chunk | whole-state");
    app->add_option("--policy", policy, "adaptive | cst | premeasured");
    app->add_option("--premeasured", premeasured, "region=Mbps (repeatable)");
    app->add_option("--payload", payload, "synthetic | materialized");
    app->add_option("--traces", traces, "Trace CSV replacing the scenario traces");
    app->add_option("--delays", delays, "zero | approx propagation delays on traces");
    app->add_option("--default-delay-ms", default_delay_ms, "Delay for links without a trace");
    app->add_option("--fault", faults, "region:behavior[:slow_factor[:start_s]] (repeatable)");
    app->add_option("--deadline", deadline, "Deadline (s)");
    app->add_option("--seed", seed, "RNG seed");
    app->add_option("--hash-cost", hash_cost, "Verification cost (ms per MiB)");
    app->add_option("--hash-overhead-ms", hash_overhead, "Fixed verification cost per check (ms)");
    app->add_option("--ingress-cap", ingress_cap, "Recovery ingress cap (Mbps)");
    app->add_option("--smoothing-window", smoothing_window, "Rounds averaged per estimate");
    app->add_option("--log-entries", log_entries, "Log entries in the transferred state");
    app->add_option("--log-interval-ms", log_interval_ms, "Period of new log entries (0 disables)");
  }

  void apply(netsim::Scenario& sc) const {
    auto bad = [](const std::string& m) { return Error(Errc::kInvalidConfig, m); };
    if (name) sc.name = *name;
    if (!replicas.empty()) {
      sc.replicas.clear();
      for (const auto& r : replicas) {
        const auto colon = r.find(':');
        if (colon == std::string::npos) sc.replicas.push_back({r, r});
        else sc.replicas.push_back({r.substr(0, colon), r.substr(colon + 1)});
      }
    }
    if (recovery) sc.recovery = *recovery;
    if (state_size) sc.state_size_bytes = harness::parse_size(*state_size);
    if (chunks) sc.n_chunks = *chunks;
    if (interval_ms) sc.interval_ms = *interval_ms;
    if (f) sc.f = *f;
    if (mode) {
      if (*mode == "bft") sc.mode = FaultModel::kBft;
      else if (*mode == "cft") sc.mode = FaultModel::kCft;
      else throw bad("--mode must be bft or cft");
    }
    if (verification) {
      if (*verification == "per-chunk") sc.verification = VerificationMode::kPerChunk;
      else if (*verification == "whole-state") sc.verification = VerificationMode::kWholeState;
      else throw bad("--hash-mode must be per-chunk or whole-state");
    }
    if (policy) {
      auto p = parse_policy(*policy);
      if (!p) throw bad(fmt::format("unknown policy '{}'", *policy));
      sc.policy = *p;
    }
    for (const auto& pm : premeasured) {
      const auto eq = pm.find('=');
      if (eq == std::string::npos) throw bad("--premeasured expects region=Mbps");
      sc.premeasured_mbps[pm.substr(0, eq)] = std::stod(pm.substr(eq + 1));
    }
    if (payload) {
      if (*payload == "synthetic") sc.payload = netsim::PayloadMode::kSynthetic;
      else if (*payload == "materialized") sc.payload = netsim::PayloadMode::kMaterialized;
      else throw bad("--payload must be synthetic or materialized");
    }
    if (traces) sc.traces = netsim::load_traces(*traces);
    if (delays) {
      if (*delays != "approx" && *delays != "zero") throw bad("--delays must be zero or approx");
      for (auto& t : sc.traces) {
        t.propagation_delay_ms = *delays == "approx" ? harness::approx_delay_ms(t.src, t.dst) : 0.0;
      }
    }
    if (default_delay_ms) sc.default_delay_ms = *default_delay_ms;
    if (!faults.empty()) {
      sc.faults.clear();
      for (const auto& spec : faults) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() < 2) throw bad("--fault expects region:behavior");
        netsim::FaultSpec fs;
        fs.replica = parts[0];
        auto b = netsim::parse_fault(parts[1]);
        if (!b) throw bad(fmt::format("unknown fault behavior '{}'", parts[1]));
        fs.behavior = *b;
        if (parts.size() > 2) fs.slow_factor = std::stod(parts[2]);
        if (parts.size() > 3) fs.start_time_s = std::stod(parts[3]);
        sc.faults.push_back(fs);
      }
    }
    if (deadline) sc.deadline_s = *deadline;
    if (seed) sc.seed = *seed;
    if (hash_cost) sc.verify_ms_per_mib = *hash_cost;
    if (hash_overhead) sc.verify_overhead_ms = *hash_overhead;
    if (ingress_cap) sc.ingress_cap_mbps = *ingress_cap;
    if (smoothing_window) sc.smoothing_window = *smoothing_window;
    if (log_entries) sc.initial_log_entries = *log_entries;
    if (log_interval_ms) sc.log_interval_ms = *log_interval_ms;
  }
};

netsim::Scenario load(const std::string& path, const Overrides& o) {
  auto sc = harness::load_scenario(path);
  o.apply(sc);
  sc.validate();
  return sc;
}

int exit_code(Phase p) {
  switch (p) {
    case Phase::kDone: return 0;
    case Phase::kTimedOut: return 2;
    default: return 3;
  }
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Error(Errc::kInvalidConfig, fmt::format("cannot write '{}'", path));
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandwidth-adaptive chunked state transfer simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  std::string events_path;
  Overrides run_o;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario");
  run_cmd->add_option("scenario", scenario_path, "Scenario JSON")->required();
  run_cmd->add_option("--out", out_path, "Report CSV path");
  run_cmd->add_option("--events", events_path, "Event log path");
  run_o.attach(run_cmd);

  Overrides cmp_o;
  std::vector<std::string> policies{"adaptive", "cst", "premeasured"};
  auto* cmp_cmd = app.add_subcommand("compare", "Run a scenario under several policies");
  cmp_cmd->add_option("scenario", scenario_path, "Scenario JSON")->required();
  cmp_cmd->add_option("--policies", policies, "Policies to compare")->delimiter(',');
  cmp_cmd->add_option("--out", out_path, "Report CSV path");
  cmp_o.attach(cmp_cmd);

  Overrides val_o;
  auto* val_cmd = app.add_subcommand("validate", "Check a scenario without running it");
  val_cmd->add_option("scenario", scenario_path, "Scenario JSON")->required();
  val_o.attach(val_cmd);

  std::string group = "a";
  std::string model = "constant";
  harness::TraceGenSpec gen;
  std::string toward;
  auto* gen_cmd = app.add_subcommand("gen-traces", "Generate a trace CSV around a group's means");
  gen_cmd->add_option("--group", group, "a | b");
  gen_cmd->add_option("--model", model, "constant | sine | random-walk");
  gen_cmd->add_option("--amplitude", gen.amplitude, "Relative deviation in [0, 1)");
  gen_cmd->add_option("--period", gen.period_s, "Sine period (s)");
  gen_cmd->add_option("--step", gen.step_s, "Sample spacing (s)");
  gen_cmd->add_option("--duration", gen.duration_s, "Trace length (s)");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--toward", toward, "Only links into this region");
  gen_cmd->add_option("--out", out_path, "Output CSV path");

  std::string recovery = "eu-west-1";
  std::string policy = "adaptive";
  bool approx = false;
  auto* init_cmd = app.add_subcommand("init", "Write a constant-bandwidth group scenario");
  init_cmd->add_option("--group", group, "a | b");
  init_cmd->add_option("--recovery", recovery, "Recovery replica region");
  init_cmd->add_option("--policy", policy, "adaptive | cst | premeasured");
  init_cmd->add_flag("--approx-delays", approx, "Use the approximate delay preset");
  init_cmd->add_option("--out", out_path, "Output JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ofstream file;
    if (*run_cmd) {
      const auto sc = load(scenario_path, run_o);
      std::ofstream events;
      netsim::RunOptions opts;
      if (!events_path.empty()) {
        events.open(events_path);
        opts.event_log = &events;
      }
      const auto rep = netsim::run(sc, opts);
      netsim::write_report_summary(std::cout, rep);
      if (!out_path.empty()) netsim::write_report_csv(open_out(out_path, file), {rep});
      return exit_code(rep.outcome);
    }
    if (*cmp_cmd) {
      const auto sc = load(scenario_path, cmp_o);
      std::vector<PolicyKind> kinds;
      for (const auto& p : policies) {
        auto k = parse_policy(p);
        if (!k) throw Error(Errc::kInvalidConfig, fmt::format("unknown policy '{}'", p));
        kinds.push_back(*k);
      }
      const auto rep = harness::compare(sc, kinds);
      harness::write_comparison(std::cout, rep);
      if (!out_path.empty()) harness::write_comparison_csv(open_out(out_path, file), rep);
      int code = 0;
      for (const auto& r : rep.runs) code = std::max(code, exit_code(r.report.outcome));
      return code;
    }
    if (*val_cmd) {
      const auto sc = load(scenario_path, val_o);
      std::cout << fmt::format("{}: ok ({} replicas, recovery {}, {} traces)\n", sc.name,
                               sc.replicas.size(), sc.recovery, sc.traces.size());
      return 0;
    }
    if (*gen_cmd) {
      auto m = harness::parse_variability(model);
      if (!m) throw Error(Errc::kInvalidConfig, fmt::format("unknown model '{}'", model));
      gen.model = *m;
      if (!toward.empty()) gen.toward = toward;
      const auto traces = harness::generate_traces(harness::find_group(group), gen);
      netsim::write_traces(open_out(out_path, file), traces);
      return 0;
    }
    if (*init_cmd) {
      auto p = parse_policy(policy);
      if (!p) throw Error(Errc::kInvalidConfig, fmt::format("unknown policy '{}'", policy));
      const auto sc = harness::make_static_scenario(harness::find_group(group), recovery, *p, approx);
      open_out(out_path, file) << harness::scenario_to_json(sc);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
