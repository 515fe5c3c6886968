// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/node/effects.hpp"

#include <algorithm>

namespace lyquor::node {

void
EffectStore::add(Position position, std::vector<EffectRecord> records)
{
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.emission_index < b.emission_index; });
    mByPosition[position] = std::move(records);
}

std::vector<EffectRecord>
EffectStore::query(const std::set<ServiceId>& targets, Position lo, Position hi) const
{
    std::vector<EffectRecord> out;
    for (auto it = mByPosition.lower_bound(lo); it != mByPosition.end() && it->first <= hi; ++it)
        for (const auto& rec : it->second)
            if (targets.count(rec.target))
                out.push_back(rec);
    return out;
}

std::vector<EffectRecord>
EffectStore::at(Position position) const
{
    auto it = mByPosition.find(position);
    return it == mByPosition.end() ? std::vector<EffectRecord>{} : it->second;
}

EntryRecordPlan
EntryRecordPlan::build(std::vector<EffectRecord> records)
{
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.emission_index < b.emission_index; });
    EntryRecordPlan plan;
    plan.records = std::move(records);
    for (size_t i = 0; i < plan.records.size(); ++i)
        plan.queues[{plan.records[i].source, plan.records[i].target}].push_back(i);
    return plan;
}

std::optional<size_t>
EntryRecordPlan::pop_queue(const ServiceId& source, const ServiceId& target)
{
    auto it = queues.find({source, target});
    if (it == queues.end())
        return std::nullopt;
    while (!it->second.empty())
    {
        size_t idx = it->second.front();
        it->second.pop_front();
        if (!consumed.count(records[idx].emission_index))
            return idx;
    }
    return std::nullopt;
}

} // namespace lyquor::node
