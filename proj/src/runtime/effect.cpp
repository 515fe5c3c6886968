// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/runtime/effect.hpp"

namespace lyquor::runtime {

std::string_view
call_status_name(CallStatus s)
{
    switch (s)
    {
    case CallStatus::Ok:
        return "ok";
    case CallStatus::MethodError:
        return "error";
    case CallStatus::GasExhausted:
        return "gas_exhausted";
    case CallStatus::MethodNotFound:
        return "method_not_found";
    }
    return "unknown";
}

std::string
CallOutcome::to_text() const
{
    switch (status)
    {
    case CallStatus::Ok:
        return "ok:" + value.to_text();
    case CallStatus::MethodError:
        return "error:" + error_code;
    case CallStatus::GasExhausted:
        return "gas_exhausted";
    case CallStatus::MethodNotFound:
        return "method_not_found";
    }
    return "unknown";
}

namespace {
std::string_view
kind_name(EffectKind k)
{
    switch (k)
    {
    case EffectKind::InnerCall:
        return "inner-call";
    case EffectKind::StateWriteSummary:
        return "write-summary";
    case EffectKind::Event:
        return "event";
    }
    return "unknown";
}
} // namespace

std::string
Effect::trace_line() const
{
    std::string line = "pos=" + std::to_string(position);
    line += " kind=";
    line += kind_name(kind);
    line += " src=" + source + " dst=" + target + " method=" + method;
    line += " args=" + Value(args).to_text();
    line += " result=" + result.to_text();
    return line;
}

void
EffectRecord::encode(ByteWriter& w) const
{
    w.u64(position);
    w.u32(emission_index);
    w.u32(static_cast<uint32_t>(parent_index));
    w.u32(subtree_end);
    w.str(source);
    w.str(target);
    w.str(method);
    w.u32(static_cast<uint32_t>(args.size()));
    for (const auto& a : args)
        a.encode(w);
    w.u8(static_cast<uint8_t>(outcome.status));
    outcome.value.encode(w);
    w.str(outcome.error_code);
    w.u64(gas_used);
    w.u8(committed ? 1 : 0);
}

EffectRecord
EffectRecord::decode(ByteReader& r)
{
    EffectRecord rec;
    rec.position = r.u64();
    rec.emission_index = r.u32();
    rec.parent_index = static_cast<int32_t>(r.u32());
    rec.subtree_end = r.u32();
    rec.source = r.str();
    rec.target = r.str();
    rec.method = r.str();
    uint32_t n = r.u32();
    rec.args.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
        rec.args.push_back(Value::decode(r));
    rec.outcome.status = static_cast<CallStatus>(r.u8());
    rec.outcome.value = Value::decode(r);
    rec.outcome.error_code = r.str();
    rec.gas_used = r.u64();
    rec.committed = r.u8() == 1;
    return rec;
}

Bytes
encode_records(const std::vector<EffectRecord>& records)
{
    ByteWriter w;
    w.u32(static_cast<uint32_t>(records.size()));
    for (const auto& r : records)
        r.encode(w);
    return w.take();
}

std::vector<EffectRecord>
decode_records(std::span<const uint8_t> data)
{
    ByteReader r(data);
    uint32_t n = r.u32();
    std::vector<EffectRecord> out;
    out.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
        out.push_back(EffectRecord::decode(r));
    r.expect_done();
    return out;
}

} // namespace lyquor::runtime
