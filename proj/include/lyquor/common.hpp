// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lyquor {

using ServiceId = std::string;
using NodeId = uint32_t;
using Position = uint64_t; // 1-based global sequence position; 0 = genesis
using Step = uint64_t;     // simulated time

// 20-byte account identifier. Fixture addresses are derived from short
// human-readable names (ASCII, zero-padded) so scenario files stay legible.
struct Address {
    std::array<uint8_t, 20> bytes{};

    static Address from_name(std::string_view name);
    static Address from_service(const ServiceId& id) { return from_name(id); }

    bool is_zero() const;
    // "@name" when the byte pattern is a padded printable name, else "@0x<hex40>".
    std::string to_text() const;

    auto operator<=>(const Address&) const = default;
};

enum class Errc {
    unknown_service,
    gas_limit_exceeded,
    unsealed_range,
    corrupt_image,
    region_violation,
    out_of_range,
    out_of_memory,
    bad_free,
    non_monotonic_position,
    unknown_snapshot,
    store_unavailable,
    duplicate_name,
    method_not_found,
    gas_exhausted,
    method_error,
    unresolved_effect,
    effect_gap,
    frontier_behind,
    unknown_root,
    not_hosted,
    quorum_not_met,
    no_eligible_nodes,
    depth_exceeded,
    past_step,
    step_limit_exceeded,
    parse_error,
    bad_request,
    io_error,
};

std::string_view errc_name(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, std::string detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail)
        , mCode(code)
        , mDetail(std::move(detail))
    {
    }

    Errc code() const { return mCode; }
    const std::string& detail() const { return mDetail; }

  private:
    Errc mCode;
    std::string mDetail;
};

[[noreturn]] inline void
fail(Errc code, std::string detail)
{
    throw Error(code, std::move(detail));
}

} // namespace lyquor
