// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/fco/log.hpp"
#include "lyquor/hashing.hpp"

#include <fstream>

namespace lyquor::fco {

void
CallIntent::encode(ByteWriter& w) const
{
    w.raw(caller.bytes);
    w.str(target);
    w.str(method);
    w.u64(gas_limit);
    w.u32(static_cast<uint32_t>(args.size()));
    for (const auto& a : args)
        a.encode(w);
}

CallIntent
CallIntent::decode(ByteReader& r)
{
    CallIntent in;
    r.raw(in.caller.bytes);
    in.target = r.str();
    in.method = r.str();
    in.gas_limit = r.u64();
    uint32_t n = r.u32();
    in.args.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
        in.args.push_back(Value::decode(r));
    return in;
}

Bytes
LogEntry::encode() const
{
    ByteWriter w;
    w.u64(position);
    w.u64(batch);
    intent.encode(w);
    return w.take();
}

LogEntry
LogEntry::decode(std::span<const uint8_t> data)
{
    ByteReader r(data);
    LogEntry e;
    e.position = r.u64();
    e.batch = r.u64();
    e.intent = CallIntent::decode(r);
    r.expect_done();
    return e;
}

void
Sequencer::register_service(const ServiceId& id)
{
    if (!mServices.insert(id).second)
        fail(Errc::duplicate_name, "service already registered: " + id);
}

Position
Sequencer::submit(const CallIntent& intent)
{
    if (intent.method.empty())
        fail(Errc::bad_request, "intent method is empty");
    if (intent.gas_limit > mConfig.max_gas_limit)
        fail(Errc::gas_limit_exceeded, "gas limit above global maximum");
    if (!knows_service(intent.target))
        fail(Errc::unknown_service, "target not deployed: " + intent.target);

    LogEntry e;
    e.position = next_position();
    e.batch = open_batch_number();
    e.intent = intent;
    mEntries.push_back(std::move(e));
    return mEntries.back().position;
}

BatchInfo
Sequencer::seal_batch()
{
    BatchInfo b;
    b.number = open_batch_number();
    b.first = mSealedFrontier + 1;
    b.last = static_cast<Position>(mEntries.size());
    b.sealed = true;
    mBatches.push_back(b);
    mSealedFrontier = b.empty() ? mSealedFrontier : b.last;
    return b;
}

void
Sequencer::check_sealed_range(Position lo, Position hi) const
{
    if (lo < 1 || lo > hi)
        fail(Errc::out_of_range, "bad position interval");
    if (hi > mSealedFrontier)
        fail(Errc::unsealed_range, "range extends past sealed frontier");
}

std::vector<LogEntry>
Sequencer::read(Position lo, Position hi) const
{
    check_sealed_range(lo, hi);
    return {mEntries.begin() + static_cast<ptrdiff_t>(lo - 1),
            mEntries.begin() + static_cast<ptrdiff_t>(hi)};
}

std::vector<LogEntry>
Sequencer::subsequence(const std::set<ServiceId>& targets, Position lo, Position hi) const
{
    check_sealed_range(lo, hi);
    std::vector<LogEntry> out;
    for (Position p = lo; p <= hi; ++p)
    {
        const auto& e = mEntries[p - 1];
        if (targets.count(e.intent.target))
            out.push_back(e);
    }
    return out;
}

namespace {

constexpr char kLogMagic[8] = {'L', 'Y', 'Q', 'L', 'O', 'G', '0', '1'};
constexpr char kIdxMagic[8] = {'L', 'Y', 'Q', 'I', 'D', 'X', '0', '1'};

void
write_record(std::ofstream& out, std::span<const uint8_t> payload)
{
    ByteWriter w;
    w.u32(static_cast<uint32_t>(payload.size()));
    w.raw(payload);
    w.u32(crc32c(payload));
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
}

Bytes
read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        fail(Errc::io_error, "cannot open " + p.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Bytes
next_record(ByteReader& r)
{
    uint32_t len = r.u32();
    Bytes payload(len);
    r.raw(payload);
    uint32_t crc = r.u32();
    if (crc != crc32c(payload))
        fail(Errc::corrupt_image, "log record checksum mismatch");
    return payload;
}

} // namespace

void
Sequencer::persist(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "entries.log", std::ios::binary | std::ios::trunc);
        if (!out)
            fail(Errc::store_unavailable, "cannot write log file");
        out.write(kLogMagic, sizeof kLogMagic);
        for (const auto& e : mEntries)
            write_record(out, e.encode());
    }
    {
        std::ofstream out(dir / "batches.idx", std::ios::binary | std::ios::trunc);
        if (!out)
            fail(Errc::store_unavailable, "cannot write batch index");
        out.write(kIdxMagic, sizeof kIdxMagic);
        for (const auto& b : mBatches)
        {
            ByteWriter w;
            w.u64(b.number);
            w.u64(b.first);
            w.u64(b.last);
            write_record(out, w.bytes());
        }
    }
    {
        std::ofstream out(dir / "services.idx", std::ios::binary | std::ios::trunc);
        for (const auto& s : mServices)
        {
            ByteWriter w;
            w.str(s);
            write_record(out, w.bytes());
        }
    }
}

Sequencer
Sequencer::load(const std::filesystem::path& dir, SequencerConfig cfg)
{
    Sequencer seq(cfg);

    Bytes logBytes = read_file(dir / "entries.log");
    ByteReader lr(logBytes);
    char magic[8];
    lr.raw({reinterpret_cast<uint8_t*>(magic), 8});
    if (std::memcmp(magic, kLogMagic, 8) != 0)
        fail(Errc::corrupt_image, "bad log magic");
    while (!lr.done())
    {
        LogEntry e = LogEntry::decode(next_record(lr));
        if (e.position != seq.mEntries.size() + 1)
            fail(Errc::corrupt_image, "non-contiguous positions in log file");
        seq.mEntries.push_back(std::move(e));
    }

    Bytes idxBytes = read_file(dir / "batches.idx");
    ByteReader ir(idxBytes);
    ir.raw({reinterpret_cast<uint8_t*>(magic), 8});
    if (std::memcmp(magic, kIdxMagic, 8) != 0)
        fail(Errc::corrupt_image, "bad batch index magic");
    while (!ir.done())
    {
        Bytes rec = next_record(ir);
        ByteReader rr(rec);
        BatchInfo b;
        b.number = rr.u64();
        b.first = rr.u64();
        b.last = rr.u64();
        b.sealed = true;
        seq.mBatches.push_back(b);
        if (!b.empty())
            seq.mSealedFrontier = b.last;
    }

    if (std::filesystem::exists(dir / "services.idx"))
    {
        Bytes svcBytes = read_file(dir / "services.idx");
        ByteReader sr(svcBytes);
        while (!sr.done())
        {
            Bytes rec = next_record(sr);
            ByteReader rr(rec);
            seq.mServices.insert(rr.str());
        }
    }
    return seq;
}

} // namespace lyquor::fco
