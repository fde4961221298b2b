#include "geost/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace geost {

std::vector<ChunkIndex> AllocationPlan::request_for(ReplicaId replica) const {
  if (auto it = overlap_assignments.find(replica); it != overlap_assignments.end()) {
    return {it->second};
  }
  if (auto it = assignments.find(replica); it != assignments.end()) return it->second;
  return {};
}

std::map<ReplicaId, std::uint32_t> AllocationPlan::counts() const {
  std::map<ReplicaId, std::uint32_t> out;
  for (const auto& [r, v] : assignments) out[r] = static_cast<std::uint32_t>(v.size());
  return out;
}

std::set<ChunkIndex> AllocationPlan::assigned() const {
  std::set<ChunkIndex> out;
  for (const auto& [r, v] : assignments) out.insert(v.begin(), v.end());
  for (const auto& [r, c] : overlap_assignments) out.insert(c);
  return out;
}

std::map<ReplicaId, std::uint32_t> largest_remainder(std::uint32_t seats, const WeightMap& weights) {
  if (weights.empty()) throw Error(Errc::kNoReplicas, "allocation needs at least one replica");
  double total = 0.0;
  for (const auto& [r, w] : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(Errc::kInvalidWeights, fmt::format("invalid weight {} for {}", w, to_string(r)));
    }
    total += w;
  }
  if (!(total > 0.0)) throw Error(Errc::kInvalidWeights, "all weights are zero");

  // Remainders are kept as numerators over the common denominator `total` so
  // they compare consistently across replicas.
  struct Share {
    ReplicaId id;
    std::uint32_t floor;
    double remainder;
  };
  std::vector<Share> shares;
  shares.reserve(weights.size());
  std::int64_t used = 0;
  for (const auto& [r, w] : weights) {
    const double num = static_cast<double>(seats) * w;
    double fl = std::floor(num / total);
    double rem = num - fl * total;
    if (rem < 0.0) {
      fl -= 1.0;
      rem += total;
    } else if (rem >= total) {
      fl += 1.0;
      rem -= total;
    }
    shares.push_back(Share{r, static_cast<std::uint32_t>(fl), rem});
    used += static_cast<std::int64_t>(fl);
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (shares[a].remainder != shares[b].remainder) {
      return shares[a].remainder > shares[b].remainder;
    }
    return shares[a].id < shares[b].id;
  });
  std::int64_t left = static_cast<std::int64_t>(seats) - used;
  for (std::size_t k = 0; left > 0; k = (k + 1) % order.size(), --left) ++shares[order[k]].floor;
  // Only reachable through floating-point drift in `total`.
  for (std::size_t k = order.size(); left < 0 && k > 0; --k) {
    auto& s = shares[order[k - 1]];
    while (left < 0 && s.floor > 0) {
      --s.floor;
      ++left;
    }
  }
  std::map<ReplicaId, std::uint32_t> out;
  for (const auto& s : shares) out[s.id] = s.floor;
  return out;
}

std::vector<ReplicaId> by_descending_weight(const WeightMap& weights) {
  std::vector<ReplicaId> ids;
  ids.reserve(weights.size());
  for (const auto& [r, w] : weights) ids.push_back(r);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](ReplicaId a, ReplicaId b) { return weights.at(a) > weights.at(b); });
  return ids;
}

AllocationPlan allocate(std::span<const ChunkIndex> remaining, const WeightMap& weights,
                        std::uint32_t n_total) {
  if (weights.empty()) throw Error(Errc::kNoReplicas, "allocation needs at least one replica");
  std::vector<ChunkIndex> sorted(remaining.begin(), remaining.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(Errc::kInvalidConfig, "allocate: duplicate chunk index in remaining set");
  }
  if (!sorted.empty() && sorted.back() >= n_total) {
    throw Error(Errc::kInvalidConfig,
                fmt::format("allocate: chunk index {} >= N={}", sorted.back(), n_total));
  }

  AllocationPlan plan;
  const auto counts = largest_remainder(static_cast<std::uint32_t>(sorted.size()), weights);
  const auto order = by_descending_weight(weights);
  std::size_t pos = 0;
  for (ReplicaId r : order) {
    const std::uint32_t n = counts.at(r);
    plan.assignments[r].assign(sorted.begin() + static_cast<std::ptrdiff_t>(pos),
                               sorted.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
  }
  if (sorted.empty()) return plan;

  ReplicaId largest = order.front();
  for (ReplicaId r : order) {
    if (counts.at(r) > counts.at(largest)) largest = r;
  }
  const ChunkIndex dup = plan.assignments.at(largest).front();
  for (ReplicaId r : order) {
    if (counts.at(r) == 0) plan.overlap_assignments[r] = dup;
  }
  return plan;
}

bool covers_all(const AllocationPlan& plan, const std::set<ChunkIndex>& verified,
                std::uint32_t n_total) {
  std::vector<bool> hit(n_total, false);
  auto mark = [&](ChunkIndex c) {
    if (c < n_total) hit[c] = true;
  };
  for (ChunkIndex c : verified) mark(c);
  for (ChunkIndex c : plan.assigned()) mark(c);
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------------------

BandwidthEstimator::BandwidthEstimator(std::span<const ReplicaId> replicas,
                                       std::size_t smoothing_window)
    : window_(std::max<std::size_t>(1, smoothing_window)) {
  for (ReplicaId r : replicas) {
    estimates_[r] = 1.0;
    current_[r] = 0;
    totals_[r] = 0;
    history_[r];
  }
}

bool BandwidthEstimator::observe_bytes(ReplicaId from, std::uint64_t bytes, TimeNs /*now*/) {
  auto it = current_.find(from);
  if (it == current_.end()) return false;
  it->second += bytes;
  totals_[from] += bytes;
  return true;
}

const WeightMap& BandwidthEstimator::close_round(TimeNs interval) {
  if (interval <= 0) throw Error(Errc::kInvalidConfig, "round interval must be positive");
  const double seconds = to_seconds(interval);
  for (auto& [r, bytes] : current_) {
    auto& h = history_[r];
    h.push_back(static_cast<double>(bytes) / seconds);
    while (h.size() > window_) h.pop_front();
    const double mean = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
    estimates_[r] = std::max(kMinEstimate, mean);
    bytes = 0;
  }
  ++round_;
  return estimates_;
}

std::uint64_t BandwidthEstimator::bytes_this_round(ReplicaId r) const {
  auto it = current_.find(r);
  return it == current_.end() ? 0 : it->second;
}

std::uint64_t BandwidthEstimator::total_bytes(ReplicaId r) const {
  auto it = totals_.find(r);
  return it == totals_.end() ? 0 : it->second;
}

}  // namespace geost
