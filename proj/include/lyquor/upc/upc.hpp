// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/hashing.hpp"
#include "lyquor/value.hpp"

#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace lyquor::upc {

// Which nodes of a service's hosting cluster execute the handler. Selection
// is a pure function of the sorted cluster, call parameters and (for the
// membership policy) a network-state root at the origin's latest position.
enum class SelectionKind : uint8_t { AllMembers = 0, FirstK = 1, MembershipRoot = 2 };

struct SelectionPolicy {
    SelectionKind kind = SelectionKind::AllMembers;
    uint32_t k = 0;              // FirstK
    std::string membership_root; // MembershipRoot: network list root of node ids

    static SelectionPolicy all() { return {}; }
    static SelectionPolicy first_k(uint32_t k) { return {SelectionKind::FirstK, k, ""}; }
    static SelectionPolicy membership(std::string root)
    {
        return {SelectionKind::MembershipRoot, 0, std::move(root)};
    }
};

enum class AggregationKind : uint8_t {
    FirstValid = 0,
    ThresholdShares = 1,
    CollectAll = 2,
    SingleNode = 3,
};

struct Aggregator {
    AggregationKind kind = AggregationKind::FirstValid;
    uint32_t k = 0;            // ThresholdShares
    std::string reducer;       // named commutative-associative reducer
    std::optional<Digest> expected_digest; // FirstValid validator parameter

    static Aggregator first_valid(std::optional<Digest> digest = {})
    {
        Aggregator a;
        a.kind = AggregationKind::FirstValid;
        a.expected_digest = digest;
        return a;
    }
    static Aggregator threshold_shares(uint32_t k, std::string reducer)
    {
        Aggregator a;
        a.kind = AggregationKind::ThresholdShares;
        a.k = k;
        a.reducer = std::move(reducer);
        return a;
    }
    static Aggregator collect_all(std::string reducer)
    {
        Aggregator a;
        a.kind = AggregationKind::CollectAll;
        a.reducer = std::move(reducer);
        return a;
    }
    static Aggregator single_node()
    {
        Aggregator a;
        a.kind = AggregationKind::SingleNode;
        return a;
    }
};

// A multicast invocation of an instance-level handler.
struct UpcSpec {
    ServiceId service;
    std::string handler;
    std::vector<Value> args;
    SelectionPolicy selector;
    Aggregator aggregator;
    uint32_t quorum = 1;
    uint64_t deadline = 10; // sim-step budget, must be positive
};

enum class FaultMarker : uint8_t { None = 0, Timeout = 1, Crash = 2, Invalid = 3 };

struct UpcResponse {
    NodeId responder = 0;
    bool has_payload = false;
    Value payload;
    FaultMarker fault = FaultMarker::None;
};

using Reducer = std::function<Value(const std::vector<Value>&)>;
const Reducer& find_reducer(const std::string& name); // sum, min, max, count

std::vector<NodeId>
select_nodes(const SelectionPolicy& policy, const std::vector<NodeId>& cluster_sorted,
             const std::function<Value(const std::string&)>& read_network_root);

// Origin-side aggregation over the multiset of responses. The caller feeds
// same-step arrivals in ascending node-id order, making ties deterministic.
class AggregationState {
  public:
    AggregationState(Aggregator agg, uint32_t quorum, std::vector<NodeId> selected);

    // false = discarded (duplicate responder, or aggregation already done)
    bool feed(const UpcResponse& r);
    bool done() const { return mDone; }
    size_t valid_count() const { return mValid.size(); }
    bool all_accounted() const { return mResponded.size() == mSelected.size(); }

    // Final aggregate; at the deadline this settles collect_all and raises
    // QuorumNotMet for anything still unsatisfied.
    Value finalize();

  private:
    bool response_valid(const UpcResponse& r) const;
    void maybe_complete();

    Aggregator mAgg;
    uint32_t mQuorum;
    std::vector<NodeId> mSelected;
    std::set<NodeId> mResponded;
    std::vector<Value> mValid; // arrival order
    bool mDone = false;
    std::optional<Value> mResult;
};

} // namespace lyquor::upc
