// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/hashing.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <atomic>

namespace lyquor {

namespace {
std::atomic<uint64_t> gHashInvocations{0};
}

uint64_t
hash_invocations()
{
    return gHashInvocations.load();
}

Digest
sha256(std::span<const uint8_t> data)
{
    gHashInvocations.fetch_add(1, std::memory_order_relaxed);
    Digest out{};
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr);
    return out;
}

uint32_t
crc32c(std::span<const uint8_t> data)
{
    gHashInvocations.fetch_add(1, std::memory_order_relaxed);
    return static_cast<uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

std::string
digest_hex(const Digest& d)
{
    return to_hex(d);
}

std::string
short_digest_hex(std::span<const uint8_t> data)
{
    auto d = sha256(data);
    return to_hex(std::span<const uint8_t>(d.data(), 8));
}

} // namespace lyquor
