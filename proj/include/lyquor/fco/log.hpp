// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/common.hpp"
#include "lyquor/value.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <vector>

namespace lyquor::fco {

// One globally sequenced call intent. The sequencer orders these before any
// execution happens; it never looks at service state.
struct CallIntent {
    Address caller;
    ServiceId target;
    std::string method;
    std::vector<Value> args;
    uint64_t gas_limit = 0;

    void encode(ByteWriter& w) const;
    static CallIntent decode(ByteReader& r);
    bool operator==(const CallIntent&) const = default;
};

struct LogEntry {
    Position position = 0; // contiguous, starting at 1
    uint64_t batch = 0;
    CallIntent intent;

    Bytes encode() const;
    static LogEntry decode(std::span<const uint8_t> data);
    bool operator==(const LogEntry&) const = default;
};

struct BatchInfo {
    uint64_t number = 0;
    Position first = 1; // inclusive
    Position last = 0;  // inclusive; last < first means the batch is empty
    bool sealed = false;

    bool empty() const { return last < first; }
};

struct SequencerConfig {
    uint64_t max_gas_limit = 1'000'000;
};

// Single trusted in-process orderer. Appends entries to the open batch,
// seals batches on request, and serves reads of the sealed prefix. Has no
// access to any MemorySpace by construction.
class Sequencer {
  public:
    explicit Sequencer(SequencerConfig cfg = {}) : mConfig(cfg) {}

    void register_service(const ServiceId& id);
    bool knows_service(const ServiceId& id) const { return mServices.count(id) > 0; }

    Position submit(const CallIntent& intent);
    BatchInfo seal_batch();

    std::vector<LogEntry> read(Position lo, Position hi) const;
    std::vector<LogEntry> subsequence(const std::set<ServiceId>& targets, Position lo,
                                      Position hi) const;

    Position sealed_frontier() const { return mSealedFrontier; }
    Position next_position() const { return static_cast<Position>(mEntries.size()) + 1; }
    const std::vector<BatchInfo>& batches() const { return mBatches; }
    uint64_t open_batch_number() const { return mBatches.size() + 1; }

    // Append-only record file plus a sidecar batch index, both checksummed
    // per record and bit-exact across platforms.
    void persist(const std::filesystem::path& dir) const;
    static Sequencer load(const std::filesystem::path& dir, SequencerConfig cfg = {});

  private:
    void check_sealed_range(Position lo, Position hi) const;

    SequencerConfig mConfig;
    std::set<ServiceId> mServices;
    std::vector<LogEntry> mEntries; // position p at index p-1
    std::vector<BatchInfo> mBatches;
    Position mSealedFrontier = 0;
};

} // namespace lyquor::fco
