#include "geost/sha512.hpp"

#include <openssl/evp.h>

namespace geost {

struct Sha512Stream::Impl {
  EVP_MD_CTX* ctx = nullptr;
  ~Impl() { EVP_MD_CTX_free(ctx); }
};

Sha512Stream::Sha512Stream() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (impl_->ctx == nullptr || EVP_DigestInit_ex(impl_->ctx, EVP_sha512(), nullptr) != 1) {
    throw std::runtime_error("sha512: digest init failed");
  }
}

Sha512Stream::~Sha512Stream() = default;
Sha512Stream::Sha512Stream(Sha512Stream&&) noexcept = default;
Sha512Stream& Sha512Stream::operator=(Sha512Stream&&) noexcept = default;

void Sha512Stream::update(std::span<const std::uint8_t> data) {
  if (data.empty()) return;
  if (EVP_DigestUpdate(impl_->ctx, data.data(), data.size()) != 1) {
    throw std::runtime_error("sha512: digest update failed");
  }
}

Digest Sha512Stream::finish() {
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(impl_->ctx, out.data(), &len) != 1 || len != out.size()) {
    throw std::runtime_error("sha512: digest final failed");
  }
  return out;
}

Digest sha512(std::span<const std::uint8_t> data) {
  Sha512Stream s;
  s.update(data);
  return s.finish();
}

}  // namespace geost
