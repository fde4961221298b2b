#include "geost/harness/scenario_io.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "geost/harness/presets.hpp"

namespace geost::harness {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t parse_size(std::string_view text) {
  auto bad = [&] { return Error(Errc::kInvalidScenario, fmt::format("bad size '{}'", text)); };
  std::size_t i = 0;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
  if (i == 0) throw bad();
  double value = 0.0;
  try {
    value = std::stod(std::string(text.substr(0, i)));
  } catch (const std::exception&) {
    throw bad();
  }
  std::string unit;
  for (char c : text.substr(i)) {
    if (!std::isspace(static_cast<unsigned char>(c))) unit += static_cast<char>(std::tolower(c));
  }
  double mult = 1.0;
  if (unit.empty() || unit == "b") mult = 1.0;
  else if (unit == "kib") mult = 1024.0;
  else if (unit == "mib") mult = 1024.0 * 1024.0;
  else if (unit == "gib") mult = 1024.0 * 1024.0 * 1024.0;
  else if (unit == "kb") mult = 1e3;
  else if (unit == "mb") mult = 1e6;
  else if (unit == "gb") mult = 1e9;
  else throw bad();
  const double bytes = value * mult;
  if (!std::isfinite(bytes) || bytes < 0 || bytes != std::floor(bytes) || bytes > 1e18) throw bad();
  return static_cast<std::uint64_t>(bytes);
}

namespace {

class Reader {
 public:
  Reader(std::string origin, std::string base_dir) : origin_(std::move(origin)), base_(std::move(base_dir)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw Error(Errc::kInvalidScenario, fmt::format("{}: {}: {}", origin_, path, msg));
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
  }

  std::uint64_t uinteger(const json& j, const std::string& path) const {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
      fail(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
  }

  std::string string(const json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  netsim::Scenario read(const json& doc) const {
    if (!doc.is_object()) fail("$", "scenario must be an object");
    static const std::set<std::string> known = {
        "name", "group", "replicas", "recovery", "state_size", "n_chunks", "interval_ms", "f",
        "mode", "verification", "policy", "premeasured_mbps", "payload", "traces", "traces_file",
        "delays", "default_delay_ms", "faults", "deadline_s", "seed", "verify_ms_per_mib",
        "verify_overhead_ms", "ingress_cap_mbps", "smoothing_window", "initial_log_entries",
        "log_interval_ms"};
    for (const auto& [k, v] : doc.items()) {
      if (!known.count(k)) fail("$." + k, "unknown field");
    }

    netsim::Scenario sc;
    const bool approx = doc.contains("delays") && [&] {
      const auto d = string(doc["delays"], "$.delays");
      if (d == "approx") return true;
      if (d == "zero") return false;
      fail("$.delays", "expected \"zero\" or \"approx\"");
    }();

    if (doc.contains("group")) {
      const auto g = string(doc["group"], "$.group");
      const BandwidthMatrix* m = nullptr;
      try {
        m = &find_group(g);
      } catch (const Error& e) {
        fail("$.group", e.what());
      }
      if (!doc.contains("recovery")) fail("$.recovery", "required with \"group\"");
      const auto rec = string(doc["recovery"], "$.recovery");
      try {
        sc = make_static_scenario(*m, rec, PolicyKind::kAdaptive, approx);
      } catch (const Error& e) {
        fail("$.recovery", e.what());
      }
    }

    if (doc.contains("name")) sc.name = string(doc["name"], "$.name");
    if (doc.contains("replicas")) {
      const auto& rs = doc["replicas"];
      if (!rs.is_array()) fail("$.replicas", "expected an array");
      sc.replicas.clear();
      for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto p = fmt::format("$.replicas[{}]", i);
        if (rs[i].is_string()) {
          sc.replicas.push_back({rs[i].get<std::string>(), rs[i].get<std::string>()});
        } else if (rs[i].is_object()) {
          if (!rs[i].contains("region")) fail(p + ".region", "required");
          netsim::ReplicaSpec spec;
          spec.region = string(rs[i]["region"], p + ".region");
          spec.name = rs[i].contains("name") ? string(rs[i]["name"], p + ".name") : spec.region;
          sc.replicas.push_back(std::move(spec));
        } else {
          fail(p, "expected a region string or an object");
        }
      }
    }
    if (doc.contains("recovery")) sc.recovery = string(doc["recovery"], "$.recovery");
    if (doc.contains("state_size")) {
      const auto& s = doc["state_size"];
      try {
        sc.state_size_bytes = s.is_string() ? parse_size(s.get<std::string>()) : uinteger(s, "$.state_size");
      } catch (const Error& e) {
        fail("$.state_size", e.what());
      }
    }
    if (doc.contains("n_chunks")) sc.n_chunks = static_cast<std::uint32_t>(uinteger(doc["n_chunks"], "$.n_chunks"));
    if (doc.contains("interval_ms")) sc.interval_ms = number(doc["interval_ms"], "$.interval_ms");
    if (doc.contains("f")) sc.f = static_cast<std::uint32_t>(uinteger(doc["f"], "$.f"));
    if (doc.contains("mode")) {
      const auto m = string(doc["mode"], "$.mode");
      if (m == "bft") sc.mode = FaultModel::kBft;
      else if (m == "cft") sc.mode = FaultModel::kCft;
      else fail("$.mode", "expected \"bft\" or \"cft\"");
    }
    if (doc.contains("verification")) {
      const auto v = string(doc["verification"], "$.verification");
      if (v == "per-chunk") sc.verification = VerificationMode::kPerChunk;
      else if (v == "whole-state") sc.verification = VerificationMode::kWholeState;
      else fail("$.verification", "expected \"per-chunk\" or \"whole-state\"");
    }
    if (doc.contains("policy")) {
      const auto p = parse_policy(string(doc["policy"], "$.policy"));
      if (!p) fail("$.policy", "expected adaptive, cst or premeasured");
      sc.policy = *p;
    }
    if (doc.contains("premeasured_mbps")) {
      const auto& pm = doc["premeasured_mbps"];
      if (!pm.is_object()) fail("$.premeasured_mbps", "expected an object");
      sc.premeasured_mbps.clear();
      for (const auto& [k, v] : pm.items()) sc.premeasured_mbps[k] = number(v, "$.premeasured_mbps." + k);
    }
    if (doc.contains("payload")) {
      const auto p = string(doc["payload"], "$.payload");
      if (p == "synthetic") sc.payload = netsim::PayloadMode::kSynthetic;
      else if (p == "materialized") sc.payload = netsim::PayloadMode::kMaterialized;
      else fail("$.payload", "expected \"synthetic\" or \"materialized\"");
    }
    if (doc.contains("traces") && doc.contains("traces_file")) {
      fail("$.traces_file", "give either \"traces\" or \"traces_file\"");
    }
    if (doc.contains("traces")) sc.traces = read_traces(doc["traces"]);
    if (doc.contains("traces_file")) {
      fs::path p = string(doc["traces_file"], "$.traces_file");
      if (p.is_relative()) p = fs::path(base_) / p;
      try {
        sc.traces = netsim::load_traces(p.string());
      } catch (const Error& e) {
        fail("$.traces_file", e.what());
      }
    }
    if (approx && (doc.contains("traces") || doc.contains("traces_file"))) {
      for (auto& t : sc.traces) {
        try {
          t.propagation_delay_ms = approx_delay_ms(t.src, t.dst);
        } catch (const Error& e) {
          fail("$.delays", e.what());
        }
      }
    }
    if (doc.contains("default_delay_ms")) sc.default_delay_ms = number(doc["default_delay_ms"], "$.default_delay_ms");
    if (doc.contains("faults")) sc.faults = read_faults(doc["faults"]);
    if (doc.contains("deadline_s")) sc.deadline_s = number(doc["deadline_s"], "$.deadline_s");
    if (doc.contains("seed")) sc.seed = uinteger(doc["seed"], "$.seed");
    if (doc.contains("verify_ms_per_mib")) sc.verify_ms_per_mib = number(doc["verify_ms_per_mib"], "$.verify_ms_per_mib");
    if (doc.contains("verify_overhead_ms")) sc.verify_overhead_ms = number(doc["verify_overhead_ms"], "$.verify_overhead_ms");
    if (doc.contains("ingress_cap_mbps")) {
      if (doc["ingress_cap_mbps"].is_null()) sc.ingress_cap_mbps.reset();
      else sc.ingress_cap_mbps = number(doc["ingress_cap_mbps"], "$.ingress_cap_mbps");
    }
    if (doc.contains("smoothing_window")) sc.smoothing_window = uinteger(doc["smoothing_window"], "$.smoothing_window");
    if (doc.contains("initial_log_entries")) {
      sc.initial_log_entries = static_cast<std::uint32_t>(uinteger(doc["initial_log_entries"], "$.initial_log_entries"));
    }
    if (doc.contains("log_interval_ms")) sc.log_interval_ms = number(doc["log_interval_ms"], "$.log_interval_ms");
    return sc;
  }

  std::vector<netsim::LinkTrace> read_traces(const json& ts) const {
    if (!ts.is_array()) fail("$.traces", "expected an array");
    std::vector<netsim::LinkTrace> out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto p = fmt::format("$.traces[{}]", i);
      const auto& t = ts[i];
      if (!t.is_object()) fail(p, "expected an object");
      netsim::LinkTrace lt;
      if (!t.contains("src")) fail(p + ".src", "required");
      if (!t.contains("dst")) fail(p + ".dst", "required");
      lt.src = string(t["src"], p + ".src");
      lt.dst = string(t["dst"], p + ".dst");
      if (t.contains("propagation_delay_ms")) {
        lt.propagation_delay_ms = number(t["propagation_delay_ms"], p + ".propagation_delay_ms");
      }
      if (t.contains("mbps")) {
        lt.samples.push_back({0.0, number(t["mbps"], p + ".mbps")});
      } else if (t.contains("samples")) {
        const auto& ss = t["samples"];
        if (!ss.is_array()) fail(p + ".samples", "expected an array");
        for (std::size_t k = 0; k < ss.size(); ++k) {
          const auto sp = fmt::format("{}.samples[{}]", p, k);
          if (!ss[k].is_array() || ss[k].size() != 2) fail(sp, "expected [time_s, mbps]");
          lt.samples.push_back({number(ss[k][0], sp + "[0]"), number(ss[k][1], sp + "[1]")});
        }
      } else {
        fail(p, "needs \"mbps\" or \"samples\"");
      }
      out.push_back(std::move(lt));
    }
    return out;
  }

  std::vector<netsim::FaultSpec> read_faults(const json& fs_) const {
    if (!fs_.is_array()) fail("$.faults", "expected an array");
    std::vector<netsim::FaultSpec> out;
    for (std::size_t i = 0; i < fs_.size(); ++i) {
      const auto p = fmt::format("$.faults[{}]", i);
      const auto& f = fs_[i];
      if (!f.is_object()) fail(p, "expected an object");
      netsim::FaultSpec spec;
      if (!f.contains("replica")) fail(p + ".replica", "required");
      if (!f.contains("behavior")) fail(p + ".behavior", "required");
      spec.replica = string(f["replica"], p + ".replica");
      const auto b = netsim::parse_fault(string(f["behavior"], p + ".behavior"));
      if (!b) fail(p + ".behavior", "expected silent, fake-chunks, fake-hashes or slow");
      spec.behavior = *b;
      if (f.contains("slow_factor")) spec.slow_factor = number(f["slow_factor"], p + ".slow_factor");
      if (f.contains("start_time_s")) spec.start_time_s = number(f["start_time_s"], p + ".start_time_s");
      out.push_back(std::move(spec));
    }
    return out;
  }

 private:
  std::string origin_;
  std::string base_;
};

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

netsim::Scenario parse_scenario(std::string_view text, const std::string& origin,
                                const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte is one past the offending character
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    if (auto pos = what.find("; "); pos != std::string::npos) what = what.substr(pos + 2);
    throw Error(Errc::kParseError, fmt::format("{}:{}:{}: {}", origin, line, col, what));
  }
  return Reader(origin, base_dir).read(doc);
}

netsim::Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kInvalidScenario, fmt::format("cannot open scenario '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = fs::path(path).parent_path().string();
  return parse_scenario(ss.str(), path, dir.empty() ? "." : dir);
}

std::string scenario_to_json(const netsim::Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["replicas"] = json::array();
  for (const auto& r : sc.replicas) j["replicas"].push_back({{"region", r.region}, {"name", r.name}});
  j["recovery"] = sc.recovery;
  j["state_size"] = sc.state_size_bytes;
  j["n_chunks"] = sc.n_chunks;
  j["interval_ms"] = sc.interval_ms;
  j["f"] = sc.f;
  j["mode"] = sc.mode == FaultModel::kBft ? "bft" : "cft";
  j["verification"] = sc.verification == VerificationMode::kPerChunk ? "per-chunk" : "whole-state";
  j["policy"] = policy_name(sc.policy);
  j["premeasured_mbps"] = json::object();
  for (const auto& [k, v] : sc.premeasured_mbps) j["premeasured_mbps"][k] = v;
  j["payload"] = sc.payload == netsim::PayloadMode::kSynthetic ? "synthetic" : "materialized";
  j["traces"] = json::array();
  for (const auto& t : sc.traces) {
    json tj{{"src", t.src}, {"dst", t.dst}, {"propagation_delay_ms", t.propagation_delay_ms}};
    tj["samples"] = json::array();
    for (const auto& s : t.samples) tj["samples"].push_back({s.time_s, s.bandwidth_mbps});
    j["traces"].push_back(std::move(tj));
  }
  j["default_delay_ms"] = sc.default_delay_ms;
  j["faults"] = json::array();
  for (const auto& f : sc.faults) {
    j["faults"].push_back({{"replica", f.replica},
                           {"behavior", netsim::fault_name(f.behavior)},
                           {"slow_factor", f.slow_factor},
                           {"start_time_s", f.start_time_s}});
  }
  j["deadline_s"] = sc.deadline_s;
  j["seed"] = sc.seed;
  j["verify_ms_per_mib"] = sc.verify_ms_per_mib;
  j["verify_overhead_ms"] = sc.verify_overhead_ms;
  j["ingress_cap_mbps"] = sc.ingress_cap_mbps ? json(*sc.ingress_cap_mbps) : json(nullptr);
  j["smoothing_window"] = sc.smoothing_window;
  j["initial_log_entries"] = sc.initial_log_entries;
  j["log_interval_ms"] = sc.log_interval_ms;
  return j.dump(2) + "\n";
}

}  // namespace geost::harness
