// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/runtime/gas.hpp"
#include "lyquor/value.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lyquor::runtime {

enum class EffectKind : uint8_t {
    InnerCall = 0,
    StateWriteSummary = 1,
    Event = 2,
};

// One deterministic observation made while executing a log entry. Inner
// calls are numbered in initiation (pre-order) sequence; parent_index links
// a call to the frame that issued it.
struct Effect {
    EffectKind kind = EffectKind::InnerCall;
    Position position = 0;
    ServiceId source;
    ServiceId target;
    std::string method; // event name for Event effects
    std::vector<Value> args;
    CallOutcome result;
    uint32_t emission_index = 0;
    int32_t parent_index = -1;
    // Emission index right after this call's subtree completed. Pre-order
    // numbering makes [emission_index, subtree_end) the subtree interval.
    uint32_t subtree_end = 0;
    uint64_t gas_used = 0; // subtree consumption, excluding the caller's call fee

    std::string trace_line() const;
};

// The terminating cross-service effect archival nodes hand to selective
// hosts: the k-th call from `source` into `target` at `position`, with the
// outcome and gas the call's subtree consumed. `committed` tells whether the
// surrounding entry committed; only committed effects are applied to state.
struct EffectRecord {
    Position position = 0;
    uint32_t emission_index = 0;
    int32_t parent_index = -1;
    uint32_t subtree_end = 0;
    ServiceId source;
    ServiceId target;
    std::string method;
    std::vector<Value> args;
    CallOutcome outcome;
    uint64_t gas_used = 0;
    bool committed = false;

    void encode(ByteWriter& w) const;
    static EffectRecord decode(ByteReader& r);
};

Bytes encode_records(const std::vector<EffectRecord>& records);
std::vector<EffectRecord> decode_records(std::span<const uint8_t> data);

} // namespace lyquor::runtime
