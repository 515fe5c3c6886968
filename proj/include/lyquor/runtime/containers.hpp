// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/dma/memory_space.hpp"
#include "lyquor/value.hpp"

#include <cstdint>
#include <optional>

namespace lyquor::runtime {

// Root type tags stored in the DMA root table.
constexpr uint32_t kRootU256 = 1;
constexpr uint32_t kRootValue = 2;
constexpr uint32_t kRootAddrMap = 3;
constexpr uint32_t kRootValueList = 4;

// Offset-based containers living entirely inside a service's memory space.
// Layouts are fixed and writes go through the space's gated path, so two
// replicas driving identical operation sequences produce identical bytes.

// 32 bytes, little-endian.
class U256Cell {
  public:
    U256Cell(dma::MemIo& io, uint32_t addr) : mIo(io), mAddr(addr) {}
    static uint32_t create(dma::MemIo& io, dma::Region region);

    U256 get() const;
    void set(const U256& v);

  private:
    dma::MemIo& mIo;
    uint32_t mAddr;
};

// Header {u32 len, u32 data_addr}; payload is a canonical value encoding in
// a heap block that is reallocated on size change.
class ValueCell {
  public:
    ValueCell(dma::MemIo& io, uint32_t addr) : mIo(io), mAddr(addr) {}
    static uint32_t create(dma::MemIo& io, dma::Region region);

    Value get() const;
    void set(const Value& v);

  private:
    dma::MemIo& mIo;
    uint32_t mAddr;
};

// Sorted fixed-width entries (20-byte address key, 32-byte value), binary
// searched; header {u32 count, u32 cap, u32 data_addr} with doubling growth.
class AddrU256Map {
  public:
    AddrU256Map(dma::MemIo& io, uint32_t addr) : mIo(io), mAddr(addr) {}
    static uint32_t create(dma::MemIo& io, dma::Region region);

    U256 get(const Address& key) const; // zero when absent
    bool contains(const Address& key) const;
    void set(const Address& key, const U256& v);
    uint32_t size() const;
    Value to_value() const;

  private:
    static constexpr uint32_t kEntrySize = 52;
    std::optional<uint32_t> find_index(const Address& key) const;

    dma::MemIo& mIo;
    uint32_t mAddr;
};

// Append-only list of canonical-encoded values; items are u32 addresses of
// {u32 len, bytes} blocks. Header {u32 count, u32 cap, u32 data_addr}.
class ValueList {
  public:
    ValueList(dma::MemIo& io, uint32_t addr) : mIo(io), mAddr(addr) {}
    static uint32_t create(dma::MemIo& io, dma::Region region);

    uint32_t size() const;
    Value at(uint32_t index) const;
    void push(const Value& v);
    Value to_value() const;

  private:
    dma::MemIo& mIo;
    uint32_t mAddr;
};

// Allocates and initializes a root container of the given type tag from an
// initializer value; returns the container address for the root table.
uint32_t init_root_container(dma::MemIo& io, dma::Region region, uint32_t type_tag,
                             const Value& init);

// Reads any root container back out as a plain value.
Value read_root_container(dma::MemIo& io, uint32_t type_tag, uint32_t addr);

} // namespace lyquor::runtime
