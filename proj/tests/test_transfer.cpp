#include <gtest/gtest.h>

#include "geost/hashing.hpp"
#include "geost/transfer.hpp"

using namespace geost;

namespace {

std::shared_ptr<const ChunkTable> table(std::uint32_t n = 256) {
  Bytes b(n * 100);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<std::uint8_t>(i);
  return std::make_shared<const ChunkTable>(chunkify(b, n));
}

std::vector<ChunkIndex> drain(TransferSession& t) {
  std::vector<ChunkIndex> sent;
  while (auto c = t.next_chunk()) {
    sent.push_back(c->index);
    t.transmission_complete();
  }
  return sent;
}

const ReplicaId R(0);

}  // namespace

TEST(TransferHashes, FullListAndCaching) {
  TransferSession t(ReplicaId(1), table(), FaultModel::kBft);
  const auto r1 = t.on_hash_request(R, HashRequest{});
  ASSERT_TRUE(r1);
  const auto decoded = decode_hashes(r1->wire);
  ASSERT_TRUE(decoded);
  EXPECT_EQ(decoded->size(), 256u);
  const auto r2 = t.on_hash_request(R, HashRequest{});
  EXPECT_EQ(r1->wire, r2->wire);
}

TEST(TransferHashes, CftModeRefusesWithDiagnostic) {
  TransferSession t(ReplicaId(1), table(), FaultModel::kCft);
  EXPECT_FALSE(t.on_hash_request(R, HashRequest{}));
  EXPECT_EQ(t.diagnostics().size(), 1u);
}

TEST(TransferQueue, ReplacementKeepsInFlightAndDropsOld) {
  TransferSession t(ReplicaId(1), table(), FaultModel::kBft);
  t.on_chunk_request(R, ChunkRequest{0, {5, 6, 7}});
  const auto first = t.next_chunk();
  ASSERT_TRUE(first);
  EXPECT_EQ(first->index, 5u);
  EXPECT_FALSE(t.next_chunk());  // one message on the wire at a time
  t.on_chunk_request(R, ChunkRequest{1, {7, 9}});
  t.transmission_complete();
  EXPECT_EQ(drain(t), (std::vector<ChunkIndex>{7, 9}));
}

TEST(TransferQueue, EmptyRequestClearsQueue) {
  TransferSession t(ReplicaId(1), table(), FaultModel::kBft);
  t.on_chunk_request(R, ChunkRequest{0, {1, 2, 3}});
  ASSERT_TRUE(t.next_chunk());
  t.on_chunk_request(R, ChunkRequest{1, {}});
  EXPECT_TRUE(t.send_queue().empty());
  EXPECT_EQ(t.in_flight(), 1u);
  t.transmission_complete();
  EXPECT_TRUE(drain(t).empty());
}

TEST(TransferQueue, AllIndicesInOrderAndBadIndicesSkipped) {
  TransferSession t(ReplicaId(1), table(), FaultModel::kBft);
  std::vector<ChunkIndex> all(256);
  for (ChunkIndex i = 0; i < 256; ++i) all[i] = i;
  t.on_chunk_request(R, ChunkRequest{0, all});
  EXPECT_EQ(drain(t), all);
  t.on_chunk_request(R, ChunkRequest{1, {3, 300, 3, 4}});
  EXPECT_EQ(drain(t), (std::vector<ChunkIndex>{3, 4}));
  EXPECT_EQ(t.requests_received(), 2u);
  EXPECT_FALSE(t.diagnostics().empty());
}

TEST(TransferQueue, ChunkPayloadMatchesTable) {
  auto tb = table(8);
  TransferSession t(ReplicaId(1), tb, FaultModel::kBft);
  t.on_chunk_request(R, ChunkRequest{0, {2}});
  const auto c = t.next_chunk();
  ASSERT_TRUE(c);
  EXPECT_TRUE(c->data == tb->chunk(2).data);
  EXPECT_EQ(wire_size(Message{*c}), kMessageHeaderBytes + 4 + tb->chunk(2).data.size());
}
