// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/bytes.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace lyquor {

using Digest = std::array<uint8_t, 32>;

// Every hash computation in the project goes through these wrappers; the
// invocation counter lets tests assert that a code path (notably the DMA
// read/write path, which is plain address arithmetic) performs no hashing.
uint64_t hash_invocations();

Digest sha256(std::span<const uint8_t> data);
uint32_t crc32c(std::span<const uint8_t> data);

std::string digest_hex(const Digest& d);
std::string short_digest_hex(std::span<const uint8_t> data); // first 8 bytes of sha256

} // namespace lyquor
