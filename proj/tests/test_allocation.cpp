#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "geost/allocation.hpp"
#include "geost/baselines.hpp"
#include "oracles.hpp"

using namespace geost;

namespace {

std::vector<ChunkIndex> iota_indices(std::uint32_t n) {
  std::vector<ChunkIndex> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

WeightMap weights(std::initializer_list<double> ws) {
  WeightMap m;
  std::uint32_t i = 0;
  for (double w : ws) m[ReplicaId(i++)] = w;
  return m;
}

std::vector<std::uint32_t> counts_of(const AllocationPlan& p) {
  std::vector<std::uint32_t> out;
  for (const auto& [r, c] : p.counts()) out.push_back(c);
  return out;
}

void check_plan_shape(const AllocationPlan& plan, std::span<const ChunkIndex> remaining, const WeightMap& w) {
  std::set<ChunkIndex> seen;
  std::size_t total = 0;
  for (const auto& [r, idx] : plan.assignments) {
    for (ChunkIndex c : idx) EXPECT_TRUE(seen.insert(c).second) << "duplicate " << c;
    total += idx.size();
  }
  EXPECT_EQ(total, remaining.size());
  EXPECT_EQ(seen, std::set<ChunkIndex>(remaining.begin(), remaining.end()));
  // Runs are contiguous slices of `remaining`, fastest replica first.
  std::size_t pos = 0;
  for (ReplicaId r : by_descending_weight(w)) {
    const auto& idx = plan.assignments.at(r);
    for (std::size_t k = 0; k < idx.size(); ++k) EXPECT_EQ(idx[k], remaining[pos + k]);
    pos += idx.size();
  }
}

}  // namespace

TEST(LargestRemainder, EqualWeightsTieToLowerId) {
  const auto c = largest_remainder(256, weights({1, 1, 1}));
  EXPECT_EQ(c.at(ReplicaId(0)), 86u);
  EXPECT_EQ(c.at(ReplicaId(1)), 85u);
  EXPECT_EQ(c.at(ReplicaId(2)), 85u);
}

TEST(LargestRemainder, GroupAIntoIreland) {
  const auto c = largest_remainder(256, weights({42.9, 64.5, 174.3}));
  EXPECT_EQ(c.at(ReplicaId(0)), 39u);
  EXPECT_EQ(c.at(ReplicaId(1)), 59u);
  EXPECT_EQ(c.at(ReplicaId(2)), 158u);
}

TEST(LargestRemainder, GroupBIntoLondon) {
  const auto c = largest_remainder(256, weights({857.8, 1234.4, 662.4}));
  EXPECT_EQ(c.at(ReplicaId(0)), 80u);
  EXPECT_EQ(c.at(ReplicaId(1)), 115u);
  EXPECT_EQ(c.at(ReplicaId(2)), 61u);
}

TEST(LargestRemainder, Errors) {
  auto code = [](const WeightMap& w) {
    try {
      largest_remainder(10, w);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kParseError;
  };
  EXPECT_EQ(code({}), Errc::kNoReplicas);
  EXPECT_EQ(code(weights({0, 0})), Errc::kInvalidWeights);
  EXPECT_EQ(code(weights({1, -1})), Errc::kInvalidWeights);
  EXPECT_EQ(code(weights({1, std::nan("")})), Errc::kInvalidWeights);
}

TEST(LargestRemainder, MatchesExactOracleOnRandomVectors) {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t k = 1 + rng() % 7;
    const std::uint32_t seats = static_cast<std::uint32_t>(rng() % 1025);
    const std::uint64_t scale = (iter % 3 == 0) ? 10 : (iter % 3 == 1) ? 1000 : 1'000'000;
    std::vector<std::uint64_t> w(k);
    for (auto& x : w) x = rng() % (scale + 1);
    if (std::accumulate(w.begin(), w.end(), std::uint64_t{0}) == 0) w[0] = 1;
    WeightMap m;
    for (std::uint32_t i = 0; i < k; ++i) m[ReplicaId(i)] = static_cast<double>(w[i]);
    const auto got = largest_remainder(seats, m);
    const auto want = oracle::hamilton(seats, w);
    for (std::uint32_t i = 0; i < k; ++i) ASSERT_EQ(got.at(ReplicaId(i)), want[i]) << "iter " << iter;
  }
}

TEST(LargestRemainder, Properties) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.1, 2000.0);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t k = 2 + rng() % 5;
    const std::uint32_t seats = 1 + static_cast<std::uint32_t>(rng() % 512);
    WeightMap m;
    double total = 0;
    for (std::uint32_t i = 0; i < k; ++i) total += (m[ReplicaId(i)] = u(rng));
    const auto c = largest_remainder(seats, m);
    std::uint32_t sum = 0;
    for (const auto& [r, n] : c) {
      sum += n;
      EXPECT_LT(std::abs(n - seats * m.at(r) / total), 1.0);  // quota rule
    }
    EXPECT_EQ(sum, seats);
    WeightMap scaled = m;
    for (auto& [r, w] : scaled) w *= 4.0;
    EXPECT_EQ(largest_remainder(seats, scaled), c);
    // raising one weight never lowers its count
    WeightMap bumped = m;
    bumped[ReplicaId(0)] *= 1.5;
    EXPECT_GE(largest_remainder(seats, bumped).at(ReplicaId(0)), c.at(ReplicaId(0)));
  }
}

TEST(Allocate, RunsAndOverlapRule) {
  const auto rem = iota_indices(256);
  const auto w = weights({42.9, 64.5, 174.3});
  const auto plan = allocate(rem, w, 256);
  check_plan_shape(plan, rem, w);
  EXPECT_EQ(counts_of(plan), (std::vector<std::uint32_t>{39, 59, 158}));
  EXPECT_EQ(plan.assignments.at(ReplicaId(2)).front(), 0u);  // fastest first
  EXPECT_TRUE(plan.overlap_assignments.empty());
}

TEST(Allocate, ZeroShareGetsOverlapChunk) {
  const std::vector<ChunkIndex> rem = {10, 20};
  const auto w = weights({1000, 1, 1});
  const auto plan = allocate(rem, w, 256);
  EXPECT_EQ(counts_of(plan), (std::vector<std::uint32_t>{2, 0, 0}));
  EXPECT_EQ(plan.overlap_assignments.at(ReplicaId(1)), 10u);
  EXPECT_EQ(plan.overlap_assignments.at(ReplicaId(2)), 10u);
  EXPECT_EQ(plan.request_for(ReplicaId(1)), std::vector<ChunkIndex>{10});
}

TEST(Allocate, FewerChunksThanReplicas) {
  const std::vector<ChunkIndex> rem = {7};
  const auto plan = allocate(rem, weights({1, 1, 1}), 8);
  std::size_t covered = 0;
  for (std::uint32_t r = 0; r < 3; ++r) covered += plan.request_for(ReplicaId(r)) == std::vector<ChunkIndex>{7};
  EXPECT_EQ(covered, 3u);
}

TEST(Allocate, CoverageProperty) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 300; ++iter) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng() % 300);
    std::set<ChunkIndex> verified;
    std::vector<ChunkIndex> rem;
    for (ChunkIndex i = 0; i < n; ++i) {
      if (rng() % 3 == 0) verified.insert(i);
      else rem.push_back(i);
    }
    WeightMap w;
    const std::size_t k = 1 + rng() % 5;
    for (std::uint32_t i = 0; i < k; ++i) w[ReplicaId(i)] = 1.0 + static_cast<double>(rng() % 100000);
    const auto plan = allocate(rem, w, n);
    EXPECT_TRUE(covers_all(plan, verified, n));
    check_plan_shape(plan, rem, w);
  }
}

TEST(Allocate, RejectsBadIndices) {
  const std::vector<ChunkIndex> dup = {1, 1};
  EXPECT_THROW(allocate(dup, weights({1, 1}), 4), Error);
  const std::vector<ChunkIndex> out_of_range = {9};
  EXPECT_THROW(allocate(out_of_range, weights({1, 1}), 4), Error);
  EXPECT_TRUE(allocate({}, weights({1, 1}), 4).assigned().empty());
}

TEST(Estimator, InitialWeightsAreOne) {
  const std::vector<ReplicaId> rs = {ReplicaId(0), ReplicaId(1), ReplicaId(2)};
  BandwidthEstimator e(rs);
  for (const auto& [r, w] : e.estimates()) EXPECT_EQ(w, 1.0);
}

TEST(Estimator, BytesPerIntervalAndFloor) {
  const std::vector<ReplicaId> rs = {ReplicaId(0), ReplicaId(1), ReplicaId(2)};
  BandwidthEstimator e(rs);
  e.observe_bytes(ReplicaId(0), 8'192'000, 0);
  e.observe_bytes(ReplicaId(1), 4'096'000, 0);
  e.observe_bytes(ReplicaId(2), 2'048'000, 0);
  EXPECT_FALSE(e.observe_bytes(ReplicaId(9), 1, 0));
  const auto& w = e.close_round(kNsPerSecond);
  EXPECT_DOUBLE_EQ(w.at(ReplicaId(0)), 8'192'000.0);
  EXPECT_DOUBLE_EQ(w.at(ReplicaId(1)), 4'096'000.0);
  EXPECT_DOUBLE_EQ(w.at(ReplicaId(2)), 2'048'000.0);
  EXPECT_EQ(e.round(), 1u);
  const auto& z = e.close_round(kNsPerSecond);
  for (const auto& [r, v] : z) EXPECT_EQ(v, kMinEstimate);
}

TEST(Estimator, SmoothingWindowAverages) {
  const std::vector<ReplicaId> rs = {ReplicaId(0)};
  BandwidthEstimator e(rs, 2);
  e.observe_bytes(ReplicaId(0), 1000, 0);
  e.close_round(kNsPerSecond);
  e.observe_bytes(ReplicaId(0), 3000, 0);
  EXPECT_DOUBLE_EQ(e.close_round(kNsPerSecond).at(ReplicaId(0)), 2000.0);
}

TEST(StaticEqual, SizesByIdOrder) {
  const std::vector<ReplicaId> rs = {ReplicaId(2), ReplicaId(0), ReplicaId(1)};
  const auto all = iota_indices(256);
  const auto plan = static_equal_allocate(all, rs);
  EXPECT_EQ(counts_of(plan), (std::vector<std::uint32_t>{86, 85, 85}));
  EXPECT_EQ(plan.assignments.at(ReplicaId(0)).front(), 0u);
  EXPECT_EQ(plan.assignments.at(ReplicaId(1)).front(), 86u);
  const auto three = iota_indices(3);
  EXPECT_EQ(counts_of(static_equal_allocate(three, rs)), (std::vector<std::uint32_t>{1, 1, 1}));
  EXPECT_EQ(static_equal_allocate(all, rs).assignments, plan.assignments);
}

TEST(StaticPremeasured, TableValues) {
  const std::vector<ReplicaId> rs = {ReplicaId(0), ReplicaId(1), ReplicaId(2)};
  const auto all = iota_indices(256);
  EXPECT_EQ(counts_of(static_premeasured_allocate(all, weights({42.9, 64.5, 174.3}), rs)),
            (std::vector<std::uint32_t>{39, 59, 158}));
  EXPECT_EQ(counts_of(static_premeasured_allocate(all, weights({857.8, 1234.4, 662.4}), rs)),
            (std::vector<std::uint32_t>{80, 115, 61}));
  EXPECT_EQ(counts_of(static_premeasured_allocate(all, weights({5, 5, 5}), rs)),
            (std::vector<std::uint32_t>{86, 85, 85}));
}

TEST(Policy, NamesAndValidation) {
  EXPECT_EQ(parse_policy("cst"), PolicyKind::kStaticEqual);
  EXPECT_EQ(parse_policy("premeasured"), PolicyKind::kStaticPremeasured);
  EXPECT_EQ(parse_policy("adaptive"), PolicyKind::kAdaptive);
  EXPECT_FALSE(parse_policy("fastest"));
  const std::vector<ReplicaId> rs = {ReplicaId(0), ReplicaId(1)};
  auto p = AllocationPolicy::static_premeasured({{ReplicaId(0), 1.0}});
  try {
    p.validate(rs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMissingBandwidth);
  }
  EXPECT_EQ(next_replica_by_id(rs, ReplicaId(1)), ReplicaId(0));
}
