// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/runtime/effect.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace lyquor::node {

using runtime::EffectRecord;

// Archival-side store of every cross-service call observed while executing
// the full sequence, keyed by (position, emission index).
class EffectStore {
  public:
    void add(Position position, std::vector<EffectRecord> records);
    std::vector<EffectRecord> query(const std::set<ServiceId>& targets, Position lo,
                                    Position hi) const;
    std::vector<EffectRecord> at(Position position) const;

  private:
    std::map<Position, std::vector<EffectRecord>> mByPosition;
};

// Per-entry working set a selective node builds from fetched records:
// resolve queues for calls into non-hosted services, plus consumption
// marks so each recorded effect is applied exactly once.
struct EntryRecordPlan {
    std::vector<EffectRecord> records; // ascending emission index
    std::map<std::pair<ServiceId, ServiceId>, std::deque<size_t>> queues;
    std::set<uint32_t> consumed;

    static EntryRecordPlan build(std::vector<EffectRecord> records);
    std::optional<size_t> pop_queue(const ServiceId& source, const ServiceId& target);
};

} // namespace lyquor::node
