#include "aigiqa/hashing.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <stdexcept>

namespace aigiqa {

namespace {

EVP_MD_CTX * as_ctx(void * p) { return static_cast<EVP_MD_CTX *>(p); }

} // namespace

Sha256::Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest init failed");
    }
}

Sha256::~Sha256() { EVP_MD_CTX_free(as_ctx(ctx_)); }

Sha256 & Sha256::update(std::span<const std::byte> bytes) {
    EVP_DigestUpdate(as_ctx(ctx_), bytes.data(), bytes.size());
    return *this;
}

Sha256 & Sha256::update(std::string_view text) {
    return update(std::as_bytes(std::span(text.data(), text.size())));
}

Sha256 & Sha256::update(const Matrix & m) {
    const std::array<std::int64_t, 2> shape{m.rows(), m.cols()};
    update(std::as_bytes(std::span(shape)));
    return update(std::as_bytes(std::span(m.data(), static_cast<std::size_t>(m.size()))));
}

Sha256 & Sha256::update(const Vector & v) {
    const std::int64_t n = v.size();
    update(std::as_bytes(std::span(&n, 1)));
    return update(std::as_bytes(std::span(v.data(), static_cast<std::size_t>(v.size()))));
}

Sha256 & Sha256::update(double value) { return update(std::as_bytes(std::span(&value, 1))); }

std::string Sha256::hex_digest() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(as_ctx(ctx_), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_hex(std::string_view text) {
    Sha256 h;
    h.update(text);
    return h.hex_digest();
}

} // namespace aigiqa
