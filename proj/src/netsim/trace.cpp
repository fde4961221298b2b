#include "geost/netsim/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace geost::netsim {

TimeNs seconds_to_ns(double s) {
  return static_cast<TimeNs>(std::llround(s * static_cast<double>(kNsPerSecond)));
}

LinkTrace LinkTrace::constant(std::string src, std::string dst, double mbps, double delay_ms) {
  return LinkTrace{std::move(src), std::move(dst), {{0.0, mbps}}, delay_ms};
}

void LinkTrace::validate() const {
  if (samples.empty()) {
    throw Error(Errc::kInvalidScenario, fmt::format("trace {}->{} has no samples", src, dst));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.time_s) || !std::isfinite(s.bandwidth_mbps) || s.bandwidth_mbps < 0.0) {
      throw Error(Errc::kInvalidScenario,
                  fmt::format("trace {}->{} sample {} is invalid", src, dst, i));
    }
    if (i > 0 && !(s.time_s > samples[i - 1].time_s)) {
      throw Error(Errc::kNonMonotonicTime,
                  fmt::format("trace {}->{}: sample times not strictly increasing at {}", src, dst,
                              s.time_s));
    }
  }
  if (!(propagation_delay_ms >= 0.0) || !std::isfinite(propagation_delay_ms)) {
    throw Error(Errc::kInvalidScenario, fmt::format("trace {}->{}: bad delay", src, dst));
  }
}

double LinkTrace::bits_per_second_at(TimeNs t) const {
  if (samples.empty()) return 0.0;
  // Last sample whose start time is <= t.
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](TimeNs v, const TraceSample& s) { return v < seconds_to_ns(s.time_s); });
  const TraceSample& s = it == samples.begin() ? samples.front() : *(it - 1);
  return s.bandwidth_mbps * 1e6;
}

TimeNs LinkTrace::next_change_after(TimeNs t) const {
  for (const auto& s : samples) {
    const TimeNs at = seconds_to_ns(s.time_s);
    if (at > t) return at;
  }
  return kNever;
}

TimeNs LinkTrace::propagation_delay() const {
  return static_cast<TimeNs>(std::llround(propagation_delay_ms * static_cast<double>(kNsPerMs)));
}

std::optional<TimeNs> serialization_end(const LinkTrace& link, std::uint64_t bytes, TimeNs start) {
  double bits = static_cast<double>(bytes) * 8.0;
  TimeNs t = start;
  while (true) {
    if (bits <= 0.0) return t;
    const double rate = link.bits_per_second_at(t);
    const TimeNs next = link.next_change_after(t);
    if (rate > 0.0) {
      const double need = bits / rate * 1e9;
      if (next == kNever || static_cast<double>(t) + need <= static_cast<double>(next)) {
        return t + static_cast<TimeNs>(std::ceil(need));
      }
      bits -= rate * static_cast<double>(next - t) / 1e9;
    } else if (next == kNever) {
      return std::nullopt;
    }
    t = next;
  }
}

std::optional<TimeNs> transmit(const LinkTrace& link, std::uint64_t bytes, TimeNs start) {
  auto end = serialization_end(link, bytes, start);
  if (!end) return std::nullopt;
  return *end + link.propagation_delay();
}

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_number(const std::string& field, std::size_t line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::kParseError, fmt::format("trace line {}: '{}' is not a number", line, field));
  }
  return v;
}

}  // namespace

std::vector<LinkTrace> parse_traces(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<LinkTrace> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!header) {
      if (fields != std::vector<std::string>{"time_s", "src", "dst", "bandwidth_mbps"}) {
        throw Error(Errc::kParseError,
                    fmt::format("trace line {}: expected header time_s,src,dst,bandwidth_mbps",
                                lineno));
      }
      header = true;
      continue;
    }
    if (fields.size() != 4) {
      throw Error(Errc::kParseError,
                  fmt::format("trace line {}: expected 4 fields, got {}", lineno, fields.size()));
    }
    const double t = parse_number(fields[0], lineno);
    const double bw = parse_number(fields[3], lineno);
    if (fields[1].empty() || fields[2].empty()) {
      throw Error(Errc::kParseError, fmt::format("trace line {}: empty endpoint", lineno));
    }
    if (bw < 0.0) {
      throw Error(Errc::kParseError, fmt::format("trace line {}: negative bandwidth", lineno));
    }
    auto key = std::make_pair(fields[1], fields[2]);
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) out.push_back(LinkTrace{fields[1], fields[2], {}, 0.0});
    auto& tr = out[it->second];
    if (!tr.samples.empty() && !(t > tr.samples.back().time_s)) {
      throw Error(Errc::kNonMonotonicTime,
                  fmt::format("trace line {}: time {} not after {} for {}->{}", lineno, t,
                              tr.samples.back().time_s, fields[1], fields[2]));
    }
    tr.samples.push_back({t, bw});
  }
  if (!header) throw Error(Errc::kParseError, "trace file is empty");
  if (out.empty()) throw Error(Errc::kParseError, "trace file has no samples");
  return out;
}

std::vector<LinkTrace> load_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kParseError, fmt::format("cannot open trace file '{}'", path));
  return parse_traces(in);
}

void write_traces(std::ostream& out, const std::vector<LinkTrace>& traces) {
  out << "time_s,src,dst,bandwidth_mbps\n";
  for (const auto& tr : traces) {
    for (const auto& s : tr.samples) {
      out << fmt::format("{},{},{},{}\n", s.time_s, tr.src, tr.dst, s.bandwidth_mbps);
    }
  }
}

}  // namespace geost::netsim
