#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "geost/types.hpp"

namespace geost {

Digest sha512(std::span<const std::uint8_t> data);

/// Incremental SHA-512 for hashing data that is not contiguous in memory.
class Sha512Stream {
 public:
  Sha512Stream();
  ~Sha512Stream();
  Sha512Stream(Sha512Stream&&) noexcept;
  Sha512Stream& operator=(Sha512Stream&&) noexcept;

  void update(std::span<const std::uint8_t> data);
  Digest finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace geost
