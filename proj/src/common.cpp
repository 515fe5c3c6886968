// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/common.hpp"
#include "lyquor/bytes.hpp"

#include <cctype>

namespace lyquor {

Address
Address::from_name(std::string_view name)
{
    if (name.empty() || name.size() > 20)
        fail(Errc::parse_error, "address name must be 1..20 bytes");
    Address a;
    for (size_t i = 0; i < name.size(); ++i)
        a.bytes[i] = static_cast<uint8_t>(name[i]);
    return a;
}

bool
Address::is_zero() const
{
    for (auto b : bytes)
        if (b)
            return false;
    return true;
}

std::string
Address::to_text() const
{
    size_t len = bytes.size();
    while (len > 0 && bytes[len - 1] == 0)
        --len;
    bool printable = len > 0;
    for (size_t i = 0; i < len; ++i)
    {
        uint8_t c = bytes[i];
        if (!(std::isalnum(c) || c == '_' || c == '-' || c == '.'))
        {
            printable = false;
            break;
        }
    }
    if (printable)
        return "@" + std::string(reinterpret_cast<const char*>(bytes.data()), len);
    return "@0x" + to_hex(bytes);
}

std::string_view
errc_name(Errc c)
{
    switch (c)
    {
    case Errc::unknown_service:
        return "UnknownService";
    case Errc::gas_limit_exceeded:
        return "GasLimitExceeded";
    case Errc::unsealed_range:
        return "UnsealedRange";
    case Errc::corrupt_image:
        return "CorruptImage";
    case Errc::region_violation:
        return "RegionViolation";
    case Errc::out_of_range:
        return "OutOfRange";
    case Errc::out_of_memory:
        return "OutOfMemory";
    case Errc::bad_free:
        return "BadFree";
    case Errc::non_monotonic_position:
        return "NonMonotonicPosition";
    case Errc::unknown_snapshot:
        return "UnknownSnapshot";
    case Errc::store_unavailable:
        return "StoreUnavailable";
    case Errc::duplicate_name:
        return "DuplicateName";
    case Errc::method_not_found:
        return "MethodNotFound";
    case Errc::gas_exhausted:
        return "GasExhausted";
    case Errc::method_error:
        return "MethodError";
    case Errc::unresolved_effect:
        return "UnresolvedEffect";
    case Errc::effect_gap:
        return "EffectGap";
    case Errc::frontier_behind:
        return "FrontierBehind";
    case Errc::unknown_root:
        return "UnknownRoot";
    case Errc::not_hosted:
        return "NotHosted";
    case Errc::quorum_not_met:
        return "QuorumNotMet";
    case Errc::no_eligible_nodes:
        return "NoEligibleNodes";
    case Errc::depth_exceeded:
        return "DepthExceeded";
    case Errc::past_step:
        return "PastStep";
    case Errc::step_limit_exceeded:
        return "StepLimitExceeded";
    case Errc::parse_error:
        return "ParseError";
    case Errc::bad_request:
        return "BadRequest";
    case Errc::io_error:
        return "IoError";
    }
    return "UnknownError";
}

} // namespace lyquor
