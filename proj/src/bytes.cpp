// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/bytes.hpp"

namespace lyquor {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int
hex_nibble(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}
} // namespace

std::string
to_hex(std::span<const uint8_t> data)
{
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data)
    {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0xF]);
    }
    return out;
}

Bytes
from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0)
        fail(Errc::parse_error, "odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2)
    {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            fail(Errc::parse_error, "invalid hex digit");
        out.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return out;
}

void
ByteWriter::u16(uint16_t v)
{
    mBuf.push_back(static_cast<uint8_t>(v));
    mBuf.push_back(static_cast<uint8_t>(v >> 8));
}

void
ByteWriter::u32(uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        mBuf.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void
ByteWriter::u64(uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        mBuf.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void
ByteWriter::raw(std::span<const uint8_t> data)
{
    mBuf.insert(mBuf.end(), data.begin(), data.end());
}

void
ByteWriter::str(std::string_view s)
{
    u32(static_cast<uint32_t>(s.size()));
    raw({reinterpret_cast<const uint8_t*>(s.data()), s.size()});
}

void
ByteWriter::blob(std::span<const uint8_t> data)
{
    u32(static_cast<uint32_t>(data.size()));
    raw(data);
}

void
ByteReader::need(size_t n) const
{
    if (mPos + n > mData.size())
        fail(Errc::parse_error, "truncated input");
}

uint8_t
ByteReader::u8()
{
    need(1);
    return mData[mPos++];
}

uint16_t
ByteReader::u16()
{
    need(2);
    uint16_t v = static_cast<uint16_t>(mData[mPos] | (mData[mPos + 1] << 8));
    mPos += 2;
    return v;
}

uint32_t
ByteReader::u32()
{
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<uint32_t>(mData[mPos + i]) << (8 * i);
    mPos += 4;
    return v;
}

uint64_t
ByteReader::u64()
{
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<uint64_t>(mData[mPos + i]) << (8 * i);
    mPos += 8;
    return v;
}

void
ByteReader::raw(std::span<uint8_t> out)
{
    need(out.size());
    std::memcpy(out.data(), mData.data() + mPos, out.size());
    mPos += out.size();
}

std::string
ByteReader::str()
{
    uint32_t len = u32();
    need(len);
    std::string s(reinterpret_cast<const char*>(mData.data() + mPos), len);
    mPos += len;
    return s;
}

Bytes
ByteReader::blob()
{
    uint32_t len = u32();
    need(len);
    Bytes b(mData.begin() + mPos, mData.begin() + mPos + len);
    mPos += len;
    return b;
}

void
ByteReader::expect_done() const
{
    if (!done())
        fail(Errc::parse_error, "trailing bytes after record");
}

} // namespace lyquor
