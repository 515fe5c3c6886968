// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/upc/upc.hpp"

#include <algorithm>
#include <map>

namespace lyquor::upc {

const Reducer&
find_reducer(const std::string& name)
{
    static const std::map<std::string, Reducer> kReducers = {
        {"sum",
         [](const std::vector<Value>& vs) {
             U256 acc = 0;
             for (const auto& v : vs)
                 acc += v.as_u256();
             return Value(acc);
         }},
        {"min",
         [](const std::vector<Value>& vs) {
             if (vs.empty())
                 fail(Errc::bad_request, "min over empty response set");
             U256 best = vs[0].as_u256();
             for (const auto& v : vs)
                 best = std::min(best, v.as_u256());
             return Value(best);
         }},
        {"max",
         [](const std::vector<Value>& vs) {
             if (vs.empty())
                 fail(Errc::bad_request, "max over empty response set");
             U256 best = vs[0].as_u256();
             for (const auto& v : vs)
                 best = std::max(best, v.as_u256());
             return Value(best);
         }},
        {"count", [](const std::vector<Value>& vs) { return Value(U256(vs.size())); }},
    };
    auto it = kReducers.find(name);
    if (it == kReducers.end())
        fail(Errc::bad_request, "unknown reducer: " + name);
    return it->second;
}

std::vector<NodeId>
select_nodes(const SelectionPolicy& policy, const std::vector<NodeId>& cluster_sorted,
             const std::function<Value(const std::string&)>& read_network_root)
{
    switch (policy.kind)
    {
    case SelectionKind::AllMembers:
        return cluster_sorted;
    case SelectionKind::FirstK:
    {
        std::vector<NodeId> out = cluster_sorted;
        if (out.size() > policy.k)
            out.resize(policy.k);
        return out;
    }
    case SelectionKind::MembershipRoot:
    {
        if (!read_network_root)
            fail(Errc::bad_request, "membership selection needs network state access");
        Value members = read_network_root(policy.membership_root);
        std::set<NodeId> allowed;
        for (const auto& v : members.as_list())
            allowed.insert(static_cast<NodeId>(v.as_u256()));
        std::vector<NodeId> out;
        for (NodeId n : cluster_sorted)
            if (allowed.count(n))
                out.push_back(n);
        return out;
    }
    }
    fail(Errc::bad_request, "unknown selection policy");
}

AggregationState::AggregationState(Aggregator agg, uint32_t quorum, std::vector<NodeId> selected)
    : mAgg(std::move(agg)), mQuorum(quorum), mSelected(std::move(selected))
{
}

bool
AggregationState::response_valid(const UpcResponse& r) const
{
    if (!r.has_payload)
        return false;
    if (mAgg.kind == AggregationKind::FirstValid && mAgg.expected_digest)
    {
        Bytes enc = r.payload.encode();
        return sha256(enc) == *mAgg.expected_digest;
    }
    return true;
}

bool
AggregationState::feed(const UpcResponse& r)
{
    if (mDone)
        return false;
    if (!mResponded.insert(r.responder).second)
        return false; // one response per selected node
    if (response_valid(r))
        mValid.push_back(r.payload);
    maybe_complete();
    return true;
}

void
AggregationState::maybe_complete()
{
    size_t quorum = std::max<size_t>(1, mQuorum);
    switch (mAgg.kind)
    {
    case AggregationKind::FirstValid:
    case AggregationKind::SingleNode:
        if (mValid.size() >= quorum)
        {
            mResult = mValid.front();
            mDone = true;
        }
        break;
    case AggregationKind::ThresholdShares:
        if (mValid.size() >= std::max<size_t>(mAgg.k, quorum))
        {
            std::vector<Value> shares(mValid.begin(), mValid.begin() + mAgg.k);
            mResult = find_reducer(mAgg.reducer)(shares);
            mDone = true;
        }
        break;
    case AggregationKind::CollectAll:
        if (all_accounted() && mValid.size() >= quorum)
        {
            mResult = find_reducer(mAgg.reducer)(mValid);
            mDone = true;
        }
        break;
    }
}

Value
AggregationState::finalize()
{
    if (mDone && mResult)
        return *mResult;
    // deadline settlement
    if (mAgg.kind == AggregationKind::CollectAll && mValid.size() >= std::max<size_t>(1, mQuorum))
    {
        mResult = find_reducer(mAgg.reducer)(mValid);
        mDone = true;
        return *mResult;
    }
    mDone = true;
    fail(Errc::quorum_not_met,
         "deadline reached with " + std::to_string(mValid.size()) + " valid responses");
}

} // namespace lyquor::upc
