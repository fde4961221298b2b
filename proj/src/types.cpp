#include "geost/types.hpp"

namespace geost {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kEmptyState: return "EmptyState";
    case Errc::kInvalidN: return "InvalidN";
    case Errc::kMissingChunk: return "MissingChunk";
    case Errc::kMalformedState: return "MalformedState";
    case Errc::kGapInLog: return "GapInLog";
    case Errc::kNoReplicas: return "NoReplicas";
    case Errc::kInvalidWeights: return "InvalidWeights";
    case Errc::kMissingBandwidth: return "MissingBandwidth";
    case Errc::kInvalidConfig: return "InvalidConfig";
    case Errc::kInvalidScenario: return "InvalidScenario";
    case Errc::kIncompleteTraces: return "IncompleteTraces";
    case Errc::kParseError: return "ParseError";
    case Errc::kNonMonotonicTime: return "NonMonotonicTime";
  }
  return "Unknown";
}

std::string to_string(ReplicaId id) { return "r" + std::to_string(id.value); }

std::string to_hex(const Digest& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (auto b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

}  // namespace geost
