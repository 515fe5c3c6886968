// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/value.hpp"

#include <cstdint>
#include <string>

namespace lyquor::runtime {

enum class CallStatus : uint8_t {
    Ok = 0,
    MethodError = 1,
    GasExhausted = 2,
    MethodNotFound = 3,
};

std::string_view call_status_name(CallStatus s);

struct CallOutcome {
    CallStatus status = CallStatus::Ok;
    Value value;
    std::string error_code;

    bool ok() const { return status == CallStatus::Ok; }
    std::string to_text() const;
};

// Thrown inside method execution to unwind the current entry; caught at the
// exec boundary where it turns into a failed result plus a rollback.
struct MethodAbort {
    CallStatus status;
    std::string code;
};

// Abstract step counter. Memory traffic is charged per started 32-byte
// word, calls cost a flat fee, and arithmetic helpers charge single units,
// so every network execution terminates within its intent's gas_limit.
class GasMeter {
  public:
    static constexpr uint64_t kCallFee = 100;
    static constexpr uint64_t kBytesPerUnit = 32;

    explicit GasMeter(uint64_t limit) : mLimit(limit) {}

    void charge(uint64_t units)
    {
        if (units > mLimit - mUsed)
        {
            mUsed = mLimit;
            throw MethodAbort{CallStatus::GasExhausted, "out_of_gas"};
        }
        mUsed += units;
    }

    void charge_memory(uint64_t bytes) { charge((bytes + kBytesPerUnit - 1) / kBytesPerUnit); }
    void charge_call() { charge(kCallFee); }

    uint64_t used() const { return mUsed; }
    uint64_t limit() const { return mLimit; }

  private:
    uint64_t mLimit;
    uint64_t mUsed = 0;
};

} // namespace lyquor::runtime
