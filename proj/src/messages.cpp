#include "geost/messages.hpp"

namespace geost {

std::uint64_t wire_size(const Message& m) {
  struct Visitor {
    std::uint64_t operator()(const HashRequest&) const { return 1; }
    std::uint64_t operator()(const HashResponse& r) const { return r.wire.size(); }
    std::uint64_t operator()(const ChunkRequest& r) const { return 8 + 4 * r.indices.size(); }
    std::uint64_t operator()(const ChunkResponse& r) const { return 4 + r.data.size(); }
  };
  return kMessageHeaderBytes + std::visit(Visitor{}, m);
}

const char* message_name(const Message& m) {
  struct Visitor {
    const char* operator()(const HashRequest&) const { return "HashRequest"; }
    const char* operator()(const HashResponse&) const { return "HashResponse"; }
    const char* operator()(const ChunkRequest&) const { return "ChunkRequest"; }
    const char* operator()(const ChunkResponse&) const { return "ChunkResponse"; }
  };
  return std::visit(Visitor{}, m);
}

}  // namespace geost
