#pragma once

#include "aigiqa/types.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace aigiqa {

/// Incremental SHA-256 over raw bytes. Used for parameter fingerprints and
/// config hashes.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256 &) = delete;
    Sha256 & operator=(const Sha256 &) = delete;

    Sha256 & update(std::span<const std::byte> bytes);
    Sha256 & update(std::string_view text);
    Sha256 & update(const Matrix & m);
    Sha256 & update(const Vector & v);
    Sha256 & update(double value);

    /// Lowercase hex digest. The object cannot be updated afterwards.
    std::string hex_digest();

private:
    void * ctx_;
};

std::string sha256_hex(std::string_view text);

} // namespace aigiqa
