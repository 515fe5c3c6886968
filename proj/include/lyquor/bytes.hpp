// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/common.hpp"

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace lyquor {

using Bytes = std::vector<uint8_t>;

std::string to_hex(std::span<const uint8_t> data);
Bytes from_hex(std::string_view hex); // throws parse_error

// Little-endian, fixed-width writer for all on-disk and on-wire encodings.
class ByteWriter {
  public:
    void u8(uint8_t v) { mBuf.push_back(v); }
    void u16(uint16_t v);
    void u32(uint32_t v);
    void u64(uint64_t v);
    void raw(std::span<const uint8_t> data);
    void str(std::string_view s); // u32 length prefix + bytes
    void blob(std::span<const uint8_t> data); // u32 length prefix + bytes

    const Bytes& bytes() const { return mBuf; }
    Bytes take() { return std::move(mBuf); }

  private:
    Bytes mBuf;
};

class ByteReader {
  public:
    explicit ByteReader(std::span<const uint8_t> data) : mData(data) {}

    uint8_t u8();
    uint16_t u16();
    uint32_t u32();
    uint64_t u64();
    void raw(std::span<uint8_t> out);
    std::string str();
    Bytes blob();

    size_t remaining() const { return mData.size() - mPos; }
    bool done() const { return mPos == mData.size(); }
    void expect_done() const;

  private:
    void need(size_t n) const;

    std::span<const uint8_t> mData;
    size_t mPos = 0;
};

} // namespace lyquor
