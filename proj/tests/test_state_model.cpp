#include <gtest/gtest.h>

#include <random>

#include "geost/sha512.hpp"
#include "geost/state_model.hpp"
#include "oracles.hpp"

using namespace geost;

namespace {

Bytes random_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

StateImage counter_state(std::int64_t start, std::vector<std::int64_t> deltas) {
  StateImage s;
  s.checkpoint = CounterService::encode(start);
  std::uint64_t seq = 1;
  for (auto d : deltas) s.log.push_back({seq++, CounterService::encode(d)});
  return s;
}

}  // namespace

TEST(Sha512, EmptyInputKnownVector) {
  EXPECT_EQ(to_hex(sha512({})).substr(0, 8), "cf83e135");
  EXPECT_EQ(sha512({}), oracle::sha512({}));
}

TEST(Sha512, MatchesOracleAndStreaming) {
  for (std::size_t n : {1u, 63u, 64u, 127u, 128u, 1000u, 65537u}) {
    const Bytes b = random_bytes(n, n);
    EXPECT_EQ(sha512(b), oracle::sha512(b)) << n;
    Sha512Stream s;
    const std::size_t half = n / 3;
    s.update(std::span(b).first(half));
    s.update(std::span(b).subspan(half));
    EXPECT_EQ(s.finish(), oracle::sha512(b)) << n;
  }
}

TEST(Serialize, EmptyStateIsLengthHeadersOnly) {
  const Bytes b = serialize_state({});
  EXPECT_EQ(b.size(), 16u);
  EXPECT_TRUE(std::all_of(b.begin(), b.end(), [](auto x) { return x == 0; }));
  EXPECT_EQ(deserialize_state(b), StateImage{});
}

TEST(Serialize, SizeIsPayloadPlusFraming) {
  StateImage s;
  s.checkpoint = random_bytes(5000, 1);
  s.log = {{1, Bytes(3, 7)}, {2, Bytes(0)}, {3, Bytes(10, 1)}};
  const Bytes b = serialize_state(s);
  EXPECT_EQ(b.size(), 16u + 5000u + 3 * 16u + 13u);
  EXPECT_EQ(serialized_size(s), b.size());
  EXPECT_EQ(deserialize_state(b), s);
}

TEST(Serialize, RejectsTruncationAndTrailingBytes) {
  StateImage s = counter_state(5, {1, 2});
  Bytes b = serialize_state(s);
  for (std::size_t cut = 0; cut < b.size(); ++cut) {
    Bytes t(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
    EXPECT_THROW(deserialize_state(t), Error) << cut;
  }
  b.push_back(0);
  try {
    deserialize_state(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMalformedState);
  }
}

TEST(Chunkify, ThousandMiBSplitsEvenly) {
  const auto g = ChunkGeometry::make(1000 * kMiB, 256);
  EXPECT_EQ(g.chunk_size, 4'096'000u);
  for (ChunkIndex i = 0; i < 256; ++i) EXPECT_EQ(g.length(i), 4'096'000u);
}

TEST(Chunkify, TenBytesFourChunks) {
  const Bytes b = random_bytes(10, 3);
  const auto t = chunkify(b, 4);
  ASSERT_EQ(t.total_chunks(), 4u);
  EXPECT_EQ(t.chunk_size(), 3u);
  std::vector<std::uint64_t> sizes;
  for (const auto& c : t.chunks()) sizes.push_back(c.data.size());
  EXPECT_EQ(sizes, (std::vector<std::uint64_t>{3, 3, 3, 1}));
  EXPECT_EQ(concatenate(t.chunks(), 4), b);
}

TEST(Chunkify, SingleChunkIsIdentity) {
  const Bytes b = random_bytes(777, 4);
  const auto t = chunkify(b, 1);
  ASSERT_EQ(t.total_chunks(), 1u);
  EXPECT_TRUE(std::equal(b.begin(), b.end(), t.chunk(0).data.bytes().begin()));
}

TEST(Chunkify, ErrorCases) {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kParseError;
  };
  EXPECT_EQ(code([] { chunkify({}, 4); }), Errc::kEmptyState);
  const Bytes b(10, 1);
  EXPECT_EQ(code([&] { chunkify(b, 0); }), Errc::kInvalidN);
  EXPECT_EQ(code([&] { chunkify(b, 11); }), Errc::kInvalidN);
  // ceil(10/6) = 2 leaves the sixth chunk empty
  EXPECT_EQ(code([&] { chunkify(b, 6); }), Errc::kInvalidN);
  EXPECT_FALSE(ChunkGeometry::feasible(10, 6));
  EXPECT_TRUE(ChunkGeometry::feasible(10, 5));
}

TEST(Chunkify, RoundTripPropertyAcrossN) {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 200; ++iter) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng() % 300);
    const std::size_t size = n * (1 + rng() % 40) + rng() % n;
    if (!ChunkGeometry::feasible(size, n)) continue;
    const Bytes b = random_bytes(size, rng());
    const auto t = chunkify(b, n);
    EXPECT_EQ(t.total_chunks(), n);
    std::vector<Chunk> shuffled(t.chunks().begin(), t.chunks().end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(concatenate(shuffled, n), b);
  }
}

TEST(Reassemble, TenMiBBitExactAndMissingChunk) {
  StateImage s;
  s.checkpoint = random_bytes(10 * kMiB, 9);
  s.log = {{1, CounterService::encode(4)}};
  const auto t = chunkify(serialize_state(s), 256);
  EXPECT_EQ(reassemble(t.chunks(), 256), s);

  std::vector<Chunk> missing(t.chunks().begin(), t.chunks().end());
  missing.erase(missing.begin() + 17);
  try {
    reassemble(missing, 256);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMissingChunk);
  }
}

TEST(Reassemble, CorruptedFramingIsDetected) {
  const StateImage s = counter_state(1, {1, 2, 3});
  const Bytes b = serialize_state(s);
  // Flip each byte of the leading length fields; framing must break.
  for (std::size_t i = 0; i < 16; ++i) {
    Bytes c = b;
    c[i] ^= 0x80;
    EXPECT_THROW(reassemble(chunkify(c, 4).chunks(), 4), Error) << i;
  }
}

TEST(Synthetic, DigestDependsOnDescriptorAndTamper) {
  const auto t = ChunkTable::synthetic(1000 * kMiB, 256, 42);
  EXPECT_TRUE(t.is_synthetic());
  EXPECT_EQ(t.chunk(0).data.size(), 4'096'000u);
  EXPECT_NE(t.chunk(0).data.digest(), t.chunk(1).data.digest());
  const auto bad = t.chunk(3).data.tampered(7);
  EXPECT_NE(bad.digest(), t.chunk(3).data.digest());
  EXPECT_FALSE(bad == t.chunk(3).data);
  EXPECT_THROW(static_cast<void>(t.chunk(0).data.bytes()), std::logic_error);
  const auto small = ChunkTable::synthetic(100, 3, 1);
  const Bytes e = small.chunk(2).data.expand();
  EXPECT_EQ(e.size(), small.chunk(2).data.size());
}

TEST(Materialized, TamperChangesBytes) {
  const auto p = ChunkPayload::materialized(Bytes(32, 5));
  const auto q = p.tampered(3);
  EXPECT_EQ(q.size(), p.size());
  EXPECT_FALSE(p == q);
  EXPECT_NE(p.digest(), q.digest());
}

TEST(ApplyRecovered, CounterExample) {
  const StateImage s = counter_state(5, {1, 2});
  const std::vector<LogEntry> buffered = {{3, CounterService::encode(3)}};
  const ServiceState out = apply_recovered(s, buffered);
  EXPECT_EQ(CounterService::value(out), 11);
  EXPECT_EQ(out.last_applied, 3u);
}

TEST(ApplyRecovered, EmptyLogsKeepCheckpoint) {
  StateImage s;
  s.checkpoint = random_bytes(100, 2);
  const ServiceState out = apply_recovered(s, {});
  EXPECT_EQ(out.snapshot, s.checkpoint);
  EXPECT_EQ(out.last_applied, 0u);
}

TEST(ApplyRecovered, GapThrowsAndOverlapSkips) {
  const StateImage s = counter_state(0, {1, 1});
  const std::vector<LogEntry> gap = {{4, CounterService::encode(1)}};
  try {
    apply_recovered(s, gap);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kGapInLog);
  }
  // Entry 2 is already in L and is not applied twice.
  const std::vector<LogEntry> overlap = {{2, CounterService::encode(100)}, {3, CounterService::encode(10)}};
  EXPECT_EQ(CounterService::value(apply_recovered(s, overlap)), 12);
}
