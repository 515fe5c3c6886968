// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/runtime/containers.hpp"

#include <cstring>

namespace lyquor::runtime {

namespace {

uint32_t
rd_u32(dma::MemIo& io, uint32_t addr)
{
    Bytes b = io.read(addr, 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

void
wr_u32(dma::MemIo& io, uint32_t addr, uint32_t v)
{
    uint8_t raw[4];
    for (int i = 0; i < 4; ++i)
        raw[i] = static_cast<uint8_t>(v >> (8 * i));
    io.write(addr, raw);
}

} // namespace

// ---------------------------------------------------------------------------
// U256Cell

uint32_t
U256Cell::create(dma::MemIo& io, dma::Region region)
{
    uint32_t addr = io.alloc(region, 32, 8);
    U256Cell(io, addr).set(0);
    return addr;
}

U256
U256Cell::get() const
{
    return u256_from_le(mIo.read(mAddr, 32));
}

void
U256Cell::set(const U256& v)
{
    mIo.write(mAddr, u256_to_le(v));
}

// ---------------------------------------------------------------------------
// ValueCell

uint32_t
ValueCell::create(dma::MemIo& io, dma::Region region)
{
    uint32_t addr = io.alloc(region, 8, 8);
    wr_u32(io, addr, 0);
    wr_u32(io, addr + 4, 0);
    return addr;
}

Value
ValueCell::get() const
{
    uint32_t len = rd_u32(mIo, mAddr);
    uint32_t data = rd_u32(mIo, mAddr + 4);
    if (len == 0)
        fail(Errc::bad_request, "value cell is empty");
    return Value::decode(mIo.read(data, len));
}

void
ValueCell::set(const Value& v)
{
    uint32_t old_data = rd_u32(mIo, mAddr + 4);
    Bytes enc = v.encode();
    dma::Region region = dma::region_of(mAddr);
    uint32_t data = mIo.alloc(region, static_cast<uint32_t>(enc.size()), 8);
    mIo.write(data, enc);
    wr_u32(mIo, mAddr, static_cast<uint32_t>(enc.size()));
    wr_u32(mIo, mAddr + 4, data);
    if (old_data != 0)
        mIo.free_block(region, old_data);
}

// ---------------------------------------------------------------------------
// AddrU256Map

uint32_t
AddrU256Map::create(dma::MemIo& io, dma::Region region)
{
    uint32_t addr = io.alloc(region, 12, 8);
    wr_u32(io, addr, 0);
    wr_u32(io, addr + 4, 0);
    wr_u32(io, addr + 8, 0);
    return addr;
}

uint32_t
AddrU256Map::size() const
{
    return rd_u32(mIo, mAddr);
}

std::optional<uint32_t>
AddrU256Map::find_index(const Address& key) const
{
    uint32_t count = rd_u32(mIo, mAddr);
    uint32_t data = rd_u32(mIo, mAddr + 8);
    uint32_t lo = 0, hi = count;
    while (lo < hi)
    {
        uint32_t mid = lo + (hi - lo) / 2;
        Bytes k = mIo.read(data + mid * kEntrySize, 20);
        int cmp = std::memcmp(k.data(), key.bytes.data(), 20);
        if (cmp == 0)
            return mid;
        if (cmp < 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    return std::nullopt;
}

U256
AddrU256Map::get(const Address& key) const
{
    auto idx = find_index(key);
    if (!idx)
        return 0;
    uint32_t data = rd_u32(mIo, mAddr + 8);
    return u256_from_le(mIo.read(data + *idx * kEntrySize + 20, 32));
}

bool
AddrU256Map::contains(const Address& key) const
{
    return find_index(key).has_value();
}

void
AddrU256Map::set(const Address& key, const U256& v)
{
    auto le = u256_to_le(v);
    if (auto idx = find_index(key))
    {
        uint32_t data = rd_u32(mIo, mAddr + 8);
        mIo.write(data + *idx * kEntrySize + 20, le);
        return;
    }

    uint32_t count = rd_u32(mIo, mAddr);
    uint32_t cap = rd_u32(mIo, mAddr + 4);
    uint32_t data = rd_u32(mIo, mAddr + 8);
    dma::Region region = dma::region_of(mAddr);

    if (count == cap)
    {
        uint32_t new_cap = cap == 0 ? 4 : cap * 2;
        uint32_t new_data = mIo.alloc(region, new_cap * kEntrySize, 8);
        if (count > 0)
            mIo.write(new_data, mIo.read(data, count * kEntrySize));
        if (data != 0)
            mIo.free_block(region, data);
        data = new_data;
        wr_u32(mIo, mAddr + 4, new_cap);
        wr_u32(mIo, mAddr + 8, new_data);
    }

    // insertion sort step: shift the tail one slot up
    uint32_t pos = 0;
    while (pos < count)
    {
        Bytes k = mIo.read(data + pos * kEntrySize, 20);
        if (std::memcmp(k.data(), key.bytes.data(), 20) > 0)
            break;
        ++pos;
    }
    if (pos < count)
    {
        Bytes tail = mIo.read(data + pos * kEntrySize, (count - pos) * kEntrySize);
        mIo.write(data + (pos + 1) * kEntrySize, tail);
    }
    Bytes entry(kEntrySize);
    std::memcpy(entry.data(), key.bytes.data(), 20);
    std::memcpy(entry.data() + 20, le.data(), 32);
    mIo.write(data + pos * kEntrySize, entry);
    wr_u32(mIo, mAddr, count + 1);
}

Value
AddrU256Map::to_value() const
{
    uint32_t count = rd_u32(mIo, mAddr);
    uint32_t data = rd_u32(mIo, mAddr + 8);
    Value::Map entries;
    entries.reserve(count);
    for (uint32_t i = 0; i < count; ++i)
    {
        Bytes raw = mIo.read(data + i * kEntrySize, kEntrySize);
        Address a;
        std::memcpy(a.bytes.data(), raw.data(), 20);
        entries.emplace_back(Value(a),
                             Value(u256_from_le(std::span(raw).subspan(20, 32))));
    }
    return Value::map(std::move(entries));
}

// ---------------------------------------------------------------------------
// ValueList

uint32_t
ValueList::create(dma::MemIo& io, dma::Region region)
{
    uint32_t addr = io.alloc(region, 12, 8);
    wr_u32(io, addr, 0);
    wr_u32(io, addr + 4, 0);
    wr_u32(io, addr + 8, 0);
    return addr;
}

uint32_t
ValueList::size() const
{
    return rd_u32(mIo, mAddr);
}

Value
ValueList::at(uint32_t index) const
{
    uint32_t count = rd_u32(mIo, mAddr);
    if (index >= count)
        fail(Errc::out_of_range, "list index out of range");
    uint32_t data = rd_u32(mIo, mAddr + 8);
    uint32_t item = rd_u32(mIo, data + index * 4);
    uint32_t len = rd_u32(mIo, item);
    return Value::decode(mIo.read(item + 4, len));
}

void
ValueList::push(const Value& v)
{
    uint32_t count = rd_u32(mIo, mAddr);
    uint32_t cap = rd_u32(mIo, mAddr + 4);
    uint32_t data = rd_u32(mIo, mAddr + 8);
    dma::Region region = dma::region_of(mAddr);

    if (count == cap)
    {
        uint32_t new_cap = cap == 0 ? 4 : cap * 2;
        uint32_t new_data = mIo.alloc(region, new_cap * 4, 8);
        if (count > 0)
            mIo.write(new_data, mIo.read(data, count * 4));
        if (data != 0)
            mIo.free_block(region, data);
        data = new_data;
        wr_u32(mIo, mAddr + 4, new_cap);
        wr_u32(mIo, mAddr + 8, new_data);
    }

    Bytes enc = v.encode();
    uint32_t item = mIo.alloc(region, 4 + static_cast<uint32_t>(enc.size()), 8);
    wr_u32(mIo, item, static_cast<uint32_t>(enc.size()));
    mIo.write(item + 4, enc);
    wr_u32(mIo, data + count * 4, item);
    wr_u32(mIo, mAddr, count + 1);
}

Value
ValueList::to_value() const
{
    uint32_t count = size();
    Value::List items;
    items.reserve(count);
    for (uint32_t i = 0; i < count; ++i)
        items.push_back(at(i));
    return Value(std::move(items));
}

// ---------------------------------------------------------------------------
// root plumbing

uint32_t
init_root_container(dma::MemIo& io, dma::Region region, uint32_t type_tag, const Value& init)
{
    switch (type_tag)
    {
    case kRootU256:
    {
        uint32_t addr = U256Cell::create(io, region);
        U256Cell(io, addr).set(init.as_u256());
        return addr;
    }
    case kRootValue:
    {
        uint32_t addr = ValueCell::create(io, region);
        ValueCell(io, addr).set(init);
        return addr;
    }
    case kRootAddrMap:
    {
        uint32_t addr = AddrU256Map::create(io, region);
        AddrU256Map map(io, addr);
        for (const auto& [k, v] : init.as_map())
            map.set(k.as_address(), v.as_u256());
        return addr;
    }
    case kRootValueList:
    {
        uint32_t addr = ValueList::create(io, region);
        ValueList list(io, addr);
        for (const auto& v : init.as_list())
            list.push(v);
        return addr;
    }
    default:
        fail(Errc::bad_request, "unknown root type tag");
    }
}

Value
read_root_container(dma::MemIo& io, uint32_t type_tag, uint32_t addr)
{
    switch (type_tag)
    {
    case kRootU256:
        return Value(U256Cell(io, addr).get());
    case kRootValue:
        return ValueCell(io, addr).get();
    case kRootAddrMap:
        return AddrU256Map(io, addr).to_value();
    case kRootValueList:
        return ValueList(io, addr).to_value();
    default:
        fail(Errc::bad_request, "unknown root type tag");
    }
}

} // namespace lyquor::runtime
