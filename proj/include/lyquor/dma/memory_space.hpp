// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/bytes.hpp"
#include "lyquor/common.hpp"
#include "lyquor/hashing.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace lyquor::dma {

constexpr uint32_t kPageSize = 4096;
constexpr uint32_t kPageShift = 12;

// The 32-bit space is split in half: replicated network state below,
// node-local instance state above. Addresses never translate through any
// key or hash; a root address plus offset arithmetic reaches every byte.
enum class Region : uint8_t { Network = 0, Instance = 1 };

constexpr uint32_t kInstanceBase = 0x8000'0000u;
constexpr uint32_t kNetworkLast = kInstanceBase - 1;
constexpr uint32_t kInstanceLast = 0xFFFF'FFFFu;

// In-region layout: header page(s) hold the allocator state and root table,
// the heap starts at a fixed offset.
constexpr uint32_t kRootTableOffset = 64;
constexpr uint32_t kRootSlotSize = 64;
constexpr uint32_t kRootNameMax = 48;
constexpr uint32_t kHeapOffset = 0x4000;
constexpr uint32_t kMaxRoots = (kHeapOffset - kRootTableOffset) / kRootSlotSize;

constexpr uint32_t
region_base(Region r)
{
    return r == Region::Network ? 0 : kInstanceBase;
}

constexpr uint32_t
region_last(Region r)
{
    return r == Region::Network ? kNetworkLast : kInstanceLast;
}

inline Region
region_of(uint32_t addr)
{
    return addr < kInstanceBase ? Region::Network : Region::Instance;
}

// What the current execution context is allowed to do with this space.
// The runtime swaps policies around method execution; a bare space is
// unrestricted so that tooling and tests can poke it directly.
struct AccessPolicy {
    bool network_write = true;
    bool instance_write = true;
    bool instance_read = true;

    static AccessPolicy unrestricted() { return {true, true, true}; }
    // Sequenced network execution: instance bytes are invisible.
    static AccessPolicy network_exec() { return {true, false, false}; }
    // Off-sequence instance execution: network state is read-only.
    static AccessPolicy instance_exec() { return {false, true, true}; }
    static AccessPolicy read_only() { return {false, false, true}; }
};

struct Stats {
    uint64_t pages_loaded = 0; // unloaded -> loaded transitions
    uint64_t pages_copied = 0; // copy-on-write captures
    uint64_t pages_touched = 0;
};

struct RootEntry {
    std::string name;
    uint32_t addr = 0;
    uint32_t type_tag = 0;
};

enum class PageState { Unloaded, LoadedClean, LoadedDirty };

enum class PersistFailpoint { None, CrashBeforeChecksum };

// Byte-level access surface shared by the live space and read-only views
// (snapshots, persisted-image inspection). In-space containers are written
// against this so the same code reads live state and historical state.
class MemIo {
  public:
    virtual ~MemIo() = default;
    virtual Bytes read(uint32_t addr, uint32_t len) = 0;
    virtual void write(uint32_t addr, std::span<const uint8_t> data) = 0;
    virtual uint32_t alloc(Region region, uint32_t size, uint32_t align) = 0;
    virtual void free_block(Region region, uint32_t addr) = 0;
};

class MemorySpace;

// Read-only view of the network region as of a snapshot position.
class SnapshotView : public MemIo {
  public:
    SnapshotView(const MemorySpace& space, Position position)
        : mSpace(space), mPosition(position)
    {
    }

    Bytes read(uint32_t addr, uint32_t len) override;
    void write(uint32_t, std::span<const uint8_t>) override
    {
        fail(Errc::region_violation, "snapshot views are read-only");
    }
    uint32_t alloc(Region, uint32_t, uint32_t) override
    {
        fail(Errc::region_violation, "snapshot views are read-only");
    }
    void free_block(Region, uint32_t) override
    {
        fail(Errc::region_violation, "snapshot views are read-only");
    }

  private:
    const MemorySpace& mSpace;
    Position mPosition;
};

// Non-mutating view of current content (no demand loading, no gas, no
// policy checks); used by dumps, digests and the gateway read path.
class InspectView : public MemIo {
  public:
    explicit InspectView(const MemorySpace& space) : mSpace(space) {}

    Bytes read(uint32_t addr, uint32_t len) override;
    void write(uint32_t, std::span<const uint8_t>) override
    {
        fail(Errc::region_violation, "inspect views are read-only");
    }
    uint32_t alloc(Region, uint32_t, uint32_t) override
    {
        fail(Errc::region_violation, "inspect views are read-only");
    }
    void free_block(Region, uint32_t) override
    {
        fail(Errc::region_violation, "inspect views are read-only");
    }

  private:
    const MemorySpace& mSpace;
};

// A service's persistent, demand-paged, byte-addressable 32-bit space.
//
// Pages move from the backing image into the live table on first touch.
// Writes feed three bookkeeping layers in order: demand load, copy-on-write
// into the newest snapshot epoch, and the entry journal used for rollback.
class MemorySpace : public MemIo {
  public:
    // Fresh in-memory space (no backing store until persist_to is set).
    static MemorySpace create(ServiceId service);
    // Opens <dir>/<service>.img if present (CorruptImage on damage),
    // otherwise creates a fresh space backed by that directory.
    static MemorySpace open(const std::filesystem::path& dir, const ServiceId& service);
    // Replaces a damaged image with the shadow copy kept by persist().
    static MemorySpace recover_from_shadow(const std::filesystem::path& dir,
                                           const ServiceId& service);

    MemorySpace(MemorySpace&&) = default;
    MemorySpace& operator=(MemorySpace&&) = default;

    const ServiceId& service() const { return mService; }

    // -- raw byte access -------------------------------------------------
    Bytes read(uint32_t addr, uint32_t len) override;
    void write(uint32_t addr, std::span<const uint8_t> data) override;
    // Content without any state change; zero for untouched bytes.
    Bytes peek(uint32_t addr, uint32_t len) const;

    // -- in-space allocator ----------------------------------------------
    uint32_t alloc(Region region, uint32_t size, uint32_t align) override;
    void free_block(Region region, uint32_t addr) override;

    // -- root table --------------------------------------------------------
    uint32_t add_root(Region region, const std::string& name, uint32_t addr, uint32_t type_tag);
    std::optional<RootEntry> find_root(Region region, const std::string& name) const;
    std::vector<RootEntry> roots(Region region) const;
    static std::vector<RootEntry> parse_roots(MemIo& view, Region region);

    // -- execution support --------------------------------------------------
    void set_policy(AccessPolicy p) { mPolicy = p; }
    AccessPolicy policy() const { return mPolicy; }
    void set_gas_hook(std::function<void(uint64_t)> hook) { mGasHook = std::move(hook); }
    const std::function<void(uint64_t)>& gas_hook() const { return mGasHook; }
    size_t journal_top_size() const
    {
        return mJournals.empty() ? 0 : mJournals.back().size();
    }

    void begin_entry();
    void commit_entry();
    void abort_entry();
    size_t journal_depth() const { return mJournals.size(); }

    // -- versioning --------------------------------------------------------
    Position snapshot(Position position);
    Bytes read_at(Position position, uint32_t addr, uint32_t len) const;
    std::vector<Position> snapshot_positions() const;
    bool has_snapshot(Position position) const;

    // -- durability ----------------------------------------------------------
    void set_store(const std::filesystem::path& dir) { mDir = dir; }
    void persist();
    void set_persist_failpoint(PersistFailpoint fp) { mFailpoint = fp; }
    uint64_t persist_stamp() const { return mStamp; }

    // -- inspection ----------------------------------------------------------
    PageState page_state(uint32_t page_no) const;
    Digest region_digest(Region region) const;
    const Stats& stats() const { return mStats; }
    void reset_stats();

  private:
    friend class SnapshotView;
    friend class InspectView;

    using PageData = std::array<uint8_t, kPageSize>;
    using PagePtr = std::unique_ptr<PageData>;

    struct LivePage {
        PagePtr data;
        bool dirty = false;
    };

    struct SnapshotEpoch {
        Position position = 0;
        std::map<uint32_t, PagePtr> pages; // pre-images of pages changed after this epoch
    };

    MemorySpace() = default;

    void init_fresh_region(Region region);
    void check_span(uint32_t addr, uint32_t len) const;
    PageData& ensure_loaded(uint32_t page_no);
    const PageData* peek_page(uint32_t page_no) const; // nullptr means zero page
    void before_page_write(uint32_t page_no);
    const PageData* snapshot_page(size_t epoch_idx, uint32_t page_no) const;

    uint32_t hdr_u32(Region region, uint32_t offset) const;
    void hdr_set_u32(Region region, uint32_t offset, uint32_t v);

    Bytes build_image(bool zero_checksum) const;
    void load_image(const Bytes& file, const std::filesystem::path& dir);
    std::map<uint32_t, const PageData*> merged_pages() const;

    ServiceId mService;
    std::optional<std::filesystem::path> mDir;

    std::map<uint32_t, PageData> mBacking; // persisted pages not yet loaded
    std::map<uint32_t, LivePage> mLive;

    std::vector<SnapshotEpoch> mSnapshots;
    std::vector<std::map<uint32_t, PagePtr>> mJournals;

    AccessPolicy mPolicy = AccessPolicy::unrestricted();
    std::function<void(uint64_t)> mGasHook;

    uint64_t mStamp = 0;
    PersistFailpoint mFailpoint = PersistFailpoint::None;

    Stats mStats;
    std::set<uint32_t> mTouched;
};

} // namespace lyquor::dma
