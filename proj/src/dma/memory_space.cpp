// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/dma/memory_space.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace lyquor::dma {

namespace {

constexpr uint32_t kRegionMagic = 0x4C595152; // "RQYL" little-endian
constexpr uint32_t kTagAllocated = 0xA110C8ED;
constexpr uint32_t kTagFree = 0xF7EEB10C;

constexpr uint32_t kHdrRootCount = 4;
constexpr uint32_t kHdrFrontier = 8;
constexpr uint32_t kHdrFreeHeads = 12;

constexpr uint32_t kSizeClasses[] = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
constexpr size_t kClassCount = std::size(kSizeClasses);

constexpr char kImageMagic[8] = {'L', 'Y', 'Q', 'I', 'M', 'G', '0', '1'};
constexpr char kSnapMagic[8] = {'L', 'Y', 'Q', 'S', 'N', 'P', '0', '1'};
constexpr size_t kStampOffset = 16;
constexpr size_t kChecksumOffset = 24;

int
class_index(uint32_t payload)
{
    for (size_t i = 0; i < kClassCount; ++i)
        if (kSizeClasses[i] == payload)
            return static_cast<int>(i);
    return -1;
}

uint32_t
round_payload(uint32_t size)
{
    for (uint32_t c : kSizeClasses)
        if (size <= c)
            return c;
    return (size + 15u) & ~15u;
}

bool
page_is_zero(const std::array<uint8_t, kPageSize>& p)
{
    for (uint8_t b : p)
        if (b)
            return false;
    return true;
}

uint32_t
le32(const uint8_t* p)
{
    return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
           static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

void
put_le32(uint8_t* p, uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        p[i] = static_cast<uint8_t>(v >> (8 * i));
}

} // namespace

// ---------------------------------------------------------------------------
// construction

MemorySpace
MemorySpace::create(ServiceId service)
{
    MemorySpace s;
    s.mService = std::move(service);
    s.init_fresh_region(Region::Network);
    s.init_fresh_region(Region::Instance);
    s.reset_stats();
    return s;
}

void
MemorySpace::init_fresh_region(Region region)
{
    uint32_t base = region_base(region);
    hdr_set_u32(region, 0, kRegionMagic);
    hdr_set_u32(region, kHdrRootCount, 0);
    hdr_set_u32(region, kHdrFrontier, base + kHeapOffset);
    for (size_t i = 0; i < kClassCount; ++i)
        hdr_set_u32(region, kHdrFreeHeads + 4 * static_cast<uint32_t>(i), 0);
}

MemorySpace
MemorySpace::open(const std::filesystem::path& dir, const ServiceId& service)
{
    auto img = dir / (service + ".img");
    if (!std::filesystem::exists(img))
    {
        MemorySpace s = create(service);
        s.mDir = dir;
        return s;
    }
    std::ifstream in(img, std::ios::binary);
    if (!in)
        fail(Errc::store_unavailable, "cannot open " + img.string());
    Bytes file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    MemorySpace s;
    s.mService = service;
    s.load_image(file, dir);
    s.mDir = dir;
    s.reset_stats();
    return s;
}

MemorySpace
MemorySpace::recover_from_shadow(const std::filesystem::path& dir, const ServiceId& service)
{
    auto img = dir / (service + ".img");
    auto shadow = dir / (service + ".img.shadow");
    if (!std::filesystem::exists(shadow))
        fail(Errc::store_unavailable, "no shadow image for " + service);
    std::filesystem::rename(shadow, img);
    return open(dir, service);
}

// ---------------------------------------------------------------------------
// paging

void
MemorySpace::check_span(uint32_t addr, uint32_t len) const
{
    if (len == 0)
        return;
    uint64_t end = static_cast<uint64_t>(addr) + len - 1;
    if (end > kInstanceLast)
        fail(Errc::out_of_range, "span runs past the end of the address space");
    if (region_of(addr) != region_of(static_cast<uint32_t>(end)))
        fail(Errc::out_of_range, "span crosses the region boundary");
}

MemorySpace::PageData&
MemorySpace::ensure_loaded(uint32_t page_no)
{
    auto it = mLive.find(page_no);
    if (it != mLive.end())
        return *it->second.data;

    LivePage page;
    page.data = std::make_unique<PageData>();
    auto bit = mBacking.find(page_no);
    if (bit != mBacking.end())
        *page.data = bit->second;
    else
        page.data->fill(0);
    ++mStats.pages_loaded;
    auto [pos, _] = mLive.emplace(page_no, std::move(page));
    return *pos->second.data;
}

const MemorySpace::PageData*
MemorySpace::peek_page(uint32_t page_no) const
{
    auto it = mLive.find(page_no);
    if (it != mLive.end())
        return it->second.data.get();
    auto bit = mBacking.find(page_no);
    if (bit != mBacking.end())
        return &bit->second;
    return nullptr;
}

void
MemorySpace::before_page_write(uint32_t page_no)
{
    uint32_t addr = page_no << kPageShift;
    if (region_of(addr) == Region::Network && !mSnapshots.empty())
    {
        auto& epoch = mSnapshots.back();
        if (!epoch.pages.count(page_no))
        {
            auto copy = std::make_unique<PageData>(*mLive.at(page_no).data);
            epoch.pages.emplace(page_no, std::move(copy));
            ++mStats.pages_copied;
        }
    }
    if (!mJournals.empty())
    {
        auto& journal = mJournals.back();
        if (!journal.count(page_no))
            journal.emplace(page_no, std::make_unique<PageData>(*mLive.at(page_no).data));
    }
}

Bytes
MemorySpace::read(uint32_t addr, uint32_t len)
{
    check_span(addr, len);
    if (len == 0)
        return {};
    if (region_of(addr) == Region::Instance && !mPolicy.instance_read)
        fail(Errc::region_violation, "instance bytes are invisible to network execution");
    if (mGasHook)
        mGasHook(len);

    Bytes out(len);
    uint32_t done = 0;
    while (done < len)
    {
        uint32_t cur = addr + done;
        uint32_t page_no = cur >> kPageShift;
        uint32_t off = cur & (kPageSize - 1);
        uint32_t chunk = std::min(len - done, kPageSize - off);
        mTouched.insert(page_no);
        PageData& page = ensure_loaded(page_no);
        std::memcpy(out.data() + done, page.data() + off, chunk);
        done += chunk;
    }
    mStats.pages_touched = mTouched.size();
    return out;
}

void
MemorySpace::write(uint32_t addr, std::span<const uint8_t> data)
{
    check_span(addr, static_cast<uint32_t>(data.size()));
    if (data.empty())
        return;
    Region region = region_of(addr);
    if (region == Region::Network && !mPolicy.network_write)
        fail(Errc::region_violation, "network write outside sequenced execution");
    if (region == Region::Instance && !mPolicy.instance_write)
        fail(Errc::region_violation, "instance write from network execution");
    if (mGasHook)
        mGasHook(data.size());

    uint32_t len = static_cast<uint32_t>(data.size());
    uint32_t done = 0;
    while (done < len)
    {
        uint32_t cur = addr + done;
        uint32_t page_no = cur >> kPageShift;
        uint32_t off = cur & (kPageSize - 1);
        uint32_t chunk = std::min(len - done, kPageSize - off);
        mTouched.insert(page_no);
        ensure_loaded(page_no);
        before_page_write(page_no);
        LivePage& page = mLive.at(page_no);
        std::memcpy(page.data->data() + off, data.data() + done, chunk);
        page.dirty = true;
        done += chunk;
    }
    mStats.pages_touched = mTouched.size();
}

Bytes
MemorySpace::peek(uint32_t addr, uint32_t len) const
{
    check_span(addr, len);
    Bytes out(len, 0);
    uint32_t done = 0;
    while (done < len)
    {
        uint32_t cur = addr + done;
        uint32_t page_no = cur >> kPageShift;
        uint32_t off = cur & (kPageSize - 1);
        uint32_t chunk = std::min(len - done, kPageSize - off);
        if (const PageData* page = peek_page(page_no))
            std::memcpy(out.data() + done, page->data() + off, chunk);
        done += chunk;
    }
    return out;
}

// ---------------------------------------------------------------------------
// allocator

uint32_t
MemorySpace::hdr_u32(Region region, uint32_t offset) const
{
    Bytes b = peek(region_base(region) + offset, 4);
    return le32(b.data());
}

void
MemorySpace::hdr_set_u32(Region region, uint32_t offset, uint32_t v)
{
    uint8_t raw[4];
    put_le32(raw, v);
    write(region_base(region) + offset, raw);
}

uint32_t
MemorySpace::alloc(Region region, uint32_t size, uint32_t align)
{
    if (size == 0)
        fail(Errc::bad_request, "zero-size allocation");
    if (align == 0 || (align & (align - 1)) != 0 || align > kPageSize)
        fail(Errc::bad_request, "alignment must be a power of two <= page size");

    uint32_t payload = round_payload(size);
    int cls = class_index(payload);

    if (cls >= 0 && align <= 8)
    {
        uint32_t head = hdr_u32(region, kHdrFreeHeads + 4 * static_cast<uint32_t>(cls));
        if (head != 0)
        {
            Bytes next = read(head, 4);
            hdr_set_u32(region, kHdrFreeHeads + 4 * static_cast<uint32_t>(cls), le32(next.data()));
            uint8_t tag[4];
            put_le32(tag, kTagAllocated);
            write(head - 4, tag);
            return head;
        }
    }

    uint64_t frontier = hdr_u32(region, kHdrFrontier);
    uint64_t a = std::max<uint64_t>(align, 8);
    uint64_t payload_addr = (frontier + 8 + a - 1) & ~(a - 1);
    uint64_t end = payload_addr + payload;
    if (end - 1 > region_last(region))
        fail(Errc::out_of_memory, "region heap exhausted");

    uint8_t hdr[8];
    put_le32(hdr, payload);
    put_le32(hdr + 4, kTagAllocated);
    write(static_cast<uint32_t>(payload_addr - 8), hdr);
    hdr_set_u32(region, kHdrFrontier, static_cast<uint32_t>(end));
    return static_cast<uint32_t>(payload_addr);
}

void
MemorySpace::free_block(Region region, uint32_t addr)
{
    uint64_t heap_base = static_cast<uint64_t>(region_base(region)) + kHeapOffset;
    if (addr < heap_base + 8 || addr > region_last(region))
        fail(Errc::bad_free, "address outside region heap");

    Bytes hdr = peek(addr - 8, 8);
    uint32_t payload = le32(hdr.data());
    uint32_t tag = le32(hdr.data() + 4);
    if (tag != kTagAllocated || payload == 0)
        fail(Errc::bad_free, "address is not a live block");

    uint8_t tagbuf[4];
    put_le32(tagbuf, kTagFree);
    write(addr - 4, tagbuf);

    int cls = class_index(payload);
    if (cls >= 0)
    {
        uint32_t head = hdr_u32(region, kHdrFreeHeads + 4 * static_cast<uint32_t>(cls));
        uint8_t next[4];
        put_le32(next, head);
        write(addr, next);
        hdr_set_u32(region, kHdrFreeHeads + 4 * static_cast<uint32_t>(cls), addr);
    }
}

// ---------------------------------------------------------------------------
// root table

uint32_t
MemorySpace::add_root(Region region, const std::string& name, uint32_t addr, uint32_t type_tag)
{
    if (name.empty() || name.size() > kRootNameMax)
        fail(Errc::bad_request, "root name must be 1..48 bytes");
    if (find_root(region, name))
        fail(Errc::duplicate_name, "root already declared: " + name);

    uint32_t count = hdr_u32(region, kHdrRootCount);
    if (count >= kMaxRoots)
        fail(Errc::out_of_memory, "root table full");

    Bytes slot(kRootSlotSize, 0);
    slot[0] = static_cast<uint8_t>(name.size());
    slot[1] = static_cast<uint8_t>(name.size() >> 8);
    std::memcpy(slot.data() + 2, name.data(), name.size());
    put_le32(slot.data() + 2 + kRootNameMax, addr);
    put_le32(slot.data() + 2 + kRootNameMax + 4, type_tag);

    write(region_base(region) + kRootTableOffset + count * kRootSlotSize, slot);
    hdr_set_u32(region, kHdrRootCount, count + 1);
    return count;
}

std::vector<RootEntry>
MemorySpace::parse_roots(MemIo& view, Region region)
{
    uint32_t base = region_base(region);
    Bytes cnt = view.read(base + kHdrRootCount, 4);
    uint32_t count = le32(cnt.data());
    if (count > kMaxRoots)
        fail(Errc::corrupt_image, "root count out of range");

    std::vector<RootEntry> out;
    out.reserve(count);
    for (uint32_t i = 0; i < count; ++i)
    {
        Bytes slot = view.read(base + kRootTableOffset + i * kRootSlotSize, kRootSlotSize);
        uint16_t len = static_cast<uint16_t>(slot[0] | slot[1] << 8);
        if (len == 0 || len > kRootNameMax)
            fail(Errc::corrupt_image, "root slot name length out of range");
        RootEntry e;
        e.name.assign(reinterpret_cast<const char*>(slot.data() + 2), len);
        e.addr = le32(slot.data() + 2 + kRootNameMax);
        e.type_tag = le32(slot.data() + 2 + kRootNameMax + 4);
        out.push_back(std::move(e));
    }
    return out;
}

std::optional<RootEntry>
MemorySpace::find_root(Region region, const std::string& name) const
{
    for (auto& e : roots(region))
        if (e.name == name)
            return e;
    return std::nullopt;
}

std::vector<RootEntry>
MemorySpace::roots(Region region) const
{
    InspectView view(*this);
    return parse_roots(view, region);
}

// ---------------------------------------------------------------------------
// entry journal

void
MemorySpace::begin_entry()
{
    mJournals.emplace_back();
}

void
MemorySpace::commit_entry()
{
    if (mJournals.empty())
        fail(Errc::bad_request, "no open entry journal");
    mJournals.pop_back();
}

void
MemorySpace::abort_entry()
{
    if (mJournals.empty())
        fail(Errc::bad_request, "no open entry journal");
    auto journal = std::move(mJournals.back());
    mJournals.pop_back();
    for (auto& [page_no, preimage] : journal)
    {
        auto it = mLive.find(page_no);
        if (it == mLive.end())
        {
            LivePage page;
            page.data = std::move(preimage);
            page.dirty = true;
            mLive.emplace(page_no, std::move(page));
        }
        else
        {
            *it->second.data = *preimage;
            it->second.dirty = true;
        }
    }
}

// ---------------------------------------------------------------------------
// snapshots

Position
MemorySpace::snapshot(Position position)
{
    if (!mSnapshots.empty() && position <= mSnapshots.back().position)
        fail(Errc::non_monotonic_position, "snapshot position must increase");
    SnapshotEpoch epoch;
    epoch.position = position;
    mSnapshots.push_back(std::move(epoch));
    return position;
}

bool
MemorySpace::has_snapshot(Position position) const
{
    for (const auto& s : mSnapshots)
        if (s.position == position)
            return true;
    return false;
}

std::vector<Position>
MemorySpace::snapshot_positions() const
{
    std::vector<Position> out;
    out.reserve(mSnapshots.size());
    for (const auto& s : mSnapshots)
        out.push_back(s.position);
    return out;
}

const MemorySpace::PageData*
MemorySpace::snapshot_page(size_t epoch_idx, uint32_t page_no) const
{
    for (size_t i = epoch_idx; i < mSnapshots.size(); ++i)
    {
        auto it = mSnapshots[i].pages.find(page_no);
        if (it != mSnapshots[i].pages.end())
            return it->second.get();
    }
    return nullptr;
}

Bytes
MemorySpace::read_at(Position position, uint32_t addr, uint32_t len) const
{
    size_t idx = mSnapshots.size();
    for (size_t i = 0; i < mSnapshots.size(); ++i)
        if (mSnapshots[i].position == position)
        {
            idx = i;
            break;
        }
    if (idx == mSnapshots.size())
        fail(Errc::unknown_snapshot, "no snapshot at that position");

    check_span(addr, len);
    if (len != 0 && region_of(addr) == Region::Instance)
        fail(Errc::region_violation, "instance region is not versioned");

    Bytes out(len, 0);
    uint32_t done = 0;
    while (done < len)
    {
        uint32_t cur = addr + done;
        uint32_t page_no = cur >> kPageShift;
        uint32_t off = cur & (kPageSize - 1);
        uint32_t chunk = std::min(len - done, kPageSize - off);
        const PageData* page = snapshot_page(idx, page_no);
        if (!page)
            page = peek_page(page_no);
        if (page)
            std::memcpy(out.data() + done, page->data() + off, chunk);
        done += chunk;
    }
    return out;
}

Bytes
SnapshotView::read(uint32_t addr, uint32_t len)
{
    return mSpace.read_at(mPosition, addr, len);
}

Bytes
InspectView::read(uint32_t addr, uint32_t len)
{
    return mSpace.peek(addr, len);
}

// ---------------------------------------------------------------------------
// durability

std::map<uint32_t, const MemorySpace::PageData*>
MemorySpace::merged_pages() const
{
    std::map<uint32_t, const PageData*> merged;
    for (const auto& [page_no, data] : mBacking)
        merged[page_no] = &data;
    for (const auto& [page_no, page] : mLive)
        merged[page_no] = page.data.get();
    return merged;
}

Bytes
MemorySpace::build_image(bool zero_checksum) const
{
    std::vector<std::pair<uint32_t, const PageData*>> pages;
    for (const auto& [page_no, data] : merged_pages())
        if (!page_is_zero(*data))
            pages.emplace_back(page_no, data);

    ByteWriter w;
    w.raw({reinterpret_cast<const uint8_t*>(kImageMagic), 8});
    w.u32(1); // version
    w.u32(kPageSize);
    w.u64(mStamp);
    w.u32(0); // checksum patched below
    w.u32(2); // region count
    w.u32(0);
    w.u32(kNetworkLast);
    w.u32(kInstanceBase);
    w.u32(kInstanceLast);
    w.u32(kRootTableOffset);
    w.u32(kHeapOffset);
    w.u64(mSnapshots.size());
    w.u64(pages.size());
    for (const auto& [page_no, _] : pages)
        w.u32(page_no);
    for (const auto& [_, data] : pages)
        w.raw(*data);
    for (const auto& s : mSnapshots)
        w.u64(s.position);

    Bytes file = w.take();
    if (!zero_checksum)
    {
        Bytes masked = file;
        std::fill(masked.begin() + kStampOffset, masked.begin() + kStampOffset + 8, 0);
        put_le32(file.data() + kChecksumOffset, crc32c(masked));
    }
    return file;
}

void
MemorySpace::persist()
{
    if (!mDir)
        fail(Errc::store_unavailable, "space has no backing store");
    std::filesystem::create_directories(*mDir);
    auto img = *mDir / (mService + ".img");
    auto shadow = *mDir / (mService + ".img.shadow");

    ++mStamp;
    bool crash = mFailpoint == PersistFailpoint::CrashBeforeChecksum;
    Bytes file = build_image(crash);

    if (std::filesystem::exists(img))
        std::filesystem::rename(img, shadow);
    {
        std::ofstream out(img, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(Errc::store_unavailable, "cannot write " + img.string());
        out.write(reinterpret_cast<const char*>(file.data()),
                  static_cast<std::streamsize>(file.size()));
    }
    if (crash)
        return; // simulated kill: checksum never written, side files untouched

    for (const auto& s : mSnapshots)
    {
        std::vector<std::pair<uint32_t, const PageData*>> pages;
        for (const auto& [page_no, data] : s.pages)
            pages.emplace_back(page_no, data.get());

        ByteWriter w;
        w.raw({reinterpret_cast<const uint8_t*>(kSnapMagic), 8});
        w.u32(1);
        w.u64(s.position);
        w.u32(0); // checksum patched below
        w.u64(pages.size());
        for (const auto& [page_no, _] : pages)
            w.u32(page_no);
        for (const auto& [_, data] : pages)
            w.raw(*data);
        Bytes sf = w.take();
        Bytes masked = sf;
        put_le32(masked.data() + 20, 0);
        put_le32(sf.data() + 20, crc32c(masked));
        // checksum field sits after magic+version+position
        auto path = *mDir / (mService + ".snap." + std::to_string(s.position));
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(Errc::store_unavailable, "cannot write " + path.string());
        out.write(reinterpret_cast<const char*>(sf.data()),
                  static_cast<std::streamsize>(sf.size()));
    }

    // flush: backing now mirrors disk, live pages are clean
    std::map<uint32_t, PageData> fresh;
    for (const auto& [page_no, data] : merged_pages())
        if (!page_is_zero(*data))
            fresh[page_no] = *data;
    mBacking = std::move(fresh);
    for (auto& [_, page] : mLive)
        page.dirty = false;
}

void
MemorySpace::load_image(const Bytes& file, const std::filesystem::path& dir)
{
    try
    {
        if (file.size() < 72)
            fail(Errc::corrupt_image, "image too small");
        if (std::memcmp(file.data(), kImageMagic, 8) != 0)
            fail(Errc::corrupt_image, "bad image magic");

        Bytes masked = file;
        std::fill(masked.begin() + kStampOffset, masked.begin() + kStampOffset + 8, 0);
        put_le32(masked.data() + kChecksumOffset, 0);
        uint32_t want = le32(file.data() + kChecksumOffset);
        if (want != crc32c(masked))
            fail(Errc::corrupt_image, "image checksum mismatch");

        ByteReader r(file);
        uint8_t magic[8];
        r.raw(magic);
        uint32_t version = r.u32();
        uint32_t page_size = r.u32();
        if (version != 1 || page_size != kPageSize)
            fail(Errc::corrupt_image, "unsupported image version or page size");
        mStamp = r.u64();
        r.u32(); // checksum, already verified
        uint32_t regions = r.u32();
        if (regions != 2)
            fail(Errc::corrupt_image, "unexpected region count");
        r.u32();
        r.u32();
        r.u32();
        r.u32();
        r.u32(); // root table offset
        r.u32(); // heap offset
        uint64_t snap_count = r.u64();
        uint64_t page_count = r.u64();
        if (page_count > file.size() / kPageSize + 1 || snap_count > file.size())
            fail(Errc::corrupt_image, "image counts out of range");

        std::vector<uint32_t> index(page_count);
        for (auto& p : index)
            p = r.u32();
        for (uint64_t i = 0; i < page_count; ++i)
        {
            PageData data;
            r.raw(data);
            mBacking.emplace(index[i], data);
        }
        std::vector<Position> positions(snap_count);
        for (auto& p : positions)
            p = r.u64();
        r.expect_done();

        for (Position pos : positions)
        {
            auto path = dir / (mService + ".snap." + std::to_string(pos));
            std::ifstream in(path, std::ios::binary);
            if (!in)
                fail(Errc::corrupt_image, "missing snapshot file " + path.string());
            Bytes sf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            if (sf.size() < 32 || std::memcmp(sf.data(), kSnapMagic, 8) != 0)
                fail(Errc::corrupt_image, "bad snapshot file " + path.string());
            Bytes smasked = sf;
            put_le32(smasked.data() + 20, 0);
            if (le32(sf.data() + 20) != crc32c(smasked))
                fail(Errc::corrupt_image, "snapshot checksum mismatch");

            ByteReader sr(sf);
            uint8_t smagic[8];
            sr.raw(smagic);
            sr.u32();
            Position got = sr.u64();
            sr.u32();
            if (got != pos)
                fail(Errc::corrupt_image, "snapshot position mismatch");
            uint64_t n = sr.u64();
            if (n > sf.size() / kPageSize + 1)
                fail(Errc::corrupt_image, "snapshot page count out of range");
            std::vector<uint32_t> sindex(n);
            for (auto& p : sindex)
                p = sr.u32();
            SnapshotEpoch epoch;
            epoch.position = pos;
            for (uint64_t i = 0; i < n; ++i)
            {
                auto data = std::make_unique<PageData>();
                sr.raw(*data);
                epoch.pages.emplace(sindex[i], std::move(data));
            }
            sr.expect_done();
            mSnapshots.push_back(std::move(epoch));
        }
    }
    catch (const Error& e)
    {
        if (e.code() == Errc::parse_error)
            fail(Errc::corrupt_image, "truncated image");
        throw;
    }
}

// ---------------------------------------------------------------------------
// inspection

PageState
MemorySpace::page_state(uint32_t page_no) const
{
    auto it = mLive.find(page_no);
    if (it == mLive.end())
        return PageState::Unloaded;
    return it->second.dirty ? PageState::LoadedDirty : PageState::LoadedClean;
}

Digest
MemorySpace::region_digest(Region region) const
{
    ByteWriter w;
    for (const auto& [page_no, data] : merged_pages())
    {
        if (region_of(page_no << kPageShift) != region)
            continue;
        if (page_is_zero(*data))
            continue;
        w.u64(page_no);
        w.raw(*data);
    }
    return sha256(w.bytes());
}

void
MemorySpace::reset_stats()
{
    mStats = {};
    mTouched.clear();
}

} // namespace lyquor::dma
