// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/fco/log.hpp"
#include "lyquor/node/effects.hpp"
#include "lyquor/node/gateway.hpp"
#include "lyquor/runtime/engine.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>

namespace lyquor::node {

struct HostingProfile {
    std::set<ServiceId> hosted;
    bool archival = false;

    bool hosts(const ServiceId& s) const { return archival || hosted.count(s) > 0; }
};

struct ExecutionFrontier {
    std::map<ServiceId, Position> per_service;
    Position global = 0;
};

// How an entry's effect reached a hosted service on this node.
enum class ApplyMode { Local, Inline, Record };

struct ExecEvent {
    Position position = 0;
    ServiceId service;
    ApplyMode mode = ApplyMode::Local;
    runtime::CallStatus status = runtime::CallStatus::Ok;
    std::string code;
};

std::string_view apply_mode_name(ApplyMode m);

// Pull interface a selective node uses to obtain archival records; returns
// nullopt when the source cannot serve the range yet.
class EffectSource {
  public:
    virtual ~EffectSource() = default;
    virtual std::optional<std::vector<EffectRecord>>
    fetch(const std::set<ServiceId>& targets, Position lo, Position hi) = 0;
};

// What a stalled node needs next: archival records covering one batch.
struct FetchRequest {
    std::set<ServiceId> targets;
    uint64_t batch = 0;
    Position lo = 0;
    Position hi = 0;
};

// A Lyquor node: replicates the sealed log, executes the subsequence for
// its hosted services, applies recorded effects from services it does not
// host, and (in archival mode) serves effects and historical state.
class Node {
  public:
    Node(NodeId id, HostingProfile profile,
         std::optional<std::filesystem::path> data_dir = {});

    NodeId id() const { return mId; }
    const HostingProfile& profile() const { return mProfile; }
    runtime::Engine& engine() { return mEngine; }
    const runtime::Engine& engine() const { return mEngine; }
    bool hosts(const ServiceId& s) const { return mProfile.hosts(s); }

    // Deploys a bundle if this node hosts it; records deploy order either way
    // so archival replay stays deterministic.
    void deploy(const runtime::LyquidBundle& bundle);
    void snapshot_genesis(); // archival: position-0 snapshot after deploys

    void set_effect_source(EffectSource* src) { mSource = src; }
    void set_exec_observer(std::function<void(const ExecEvent&)> fn)
    {
        mObserver = std::move(fn);
    }

    // -- log feed ---------------------------------------------------------
    void on_batch(const fco::BatchInfo& batch, std::vector<fco::LogEntry> entries);
    Position known_sealed() const { return mSealed; }

    // -- execution ----------------------------------------------------------
    // Executes everything it can up to `bound`; a FetchRequest means the node
    // is stalled waiting for archival records (stall, never skip).
    std::optional<FetchRequest> advance(Position bound);
    void supply_effects(uint64_t batch, std::vector<EffectRecord> records);
    bool has_effects_for(uint64_t batch) const { return mCache.count(batch) > 0; }

    // Synchronous drive using the configured effect source; EffectGap when
    // records are unavailable.
    ExecutionFrontier run_until(Position position);

    // Executes one sealed batch with wave-parallel scheduling of entries
    // whose touch sets are disjoint; byte-identical result to run_until.
    ExecutionFrontier parallel_apply(const fco::BatchInfo& batch, uint64_t schedule_seed);

    ExecutionFrontier frontier() const;
    Position applied() const { return mFrontier; }

    // -- archival serving ------------------------------------------------
    std::vector<EffectRecord> serve_effects(const std::set<ServiceId>& targets, Position lo,
                                            Position hi) const;
    Value serve_state(const ServiceId& service, const std::string& root,
                      Position position) const;

    // -- gateway ---------------------------------------------------------------
    using SubmitFn = std::function<Position(const fco::CallIntent&)>;
    GatewayResponse gateway_call(const GatewayRequest& req, const SubmitFn& submit);
    std::string gateway_line(const std::string& request_line, const SubmitFn& submit);

    // -- inspection -------------------------------------------------------------
    Digest network_digest(const ServiceId& s) const { return mEngine.network_digest(s); }
    const std::vector<ExecEvent>& exec_events() const { return mEvents; }
    void persist_all();

  private:
    const fco::LogEntry& entry_at(Position p) const;
    bool batch_needs_records(const fco::BatchInfo& b) const;
    std::set<ServiceId> fetch_targets() const;
    void exec_entry(const fco::LogEntry& entry);
    void apply_foreign_entry(const fco::LogEntry& entry);
    void note_event(ExecEvent ev);
    void snapshot_batch_end(const fco::BatchInfo& b);
    std::optional<runtime::ResolvedCall> resolve(const ServiceId& source,
                                                 const ServiceId& target,
                                                 const std::string& method,
                                                 const std::vector<Value>& args);
    void apply_interval(const fco::LogEntry& entry, uint32_t lo, uint32_t hi);
    void harvest_records(const fco::LogEntry& entry, const runtime::ExecResult& res);
    std::set<ServiceId> touch_set(const fco::LogEntry& entry) const;

    NodeId mId;
    HostingProfile mProfile;
    runtime::Engine mEngine;

    std::vector<fco::LogEntry> mLog;
    std::vector<fco::BatchInfo> mBatches;
    std::map<uint64_t, std::pair<fco::BatchInfo, std::vector<fco::LogEntry>>> mPending;
    Position mSealed = 0;
    Position mFrontier = 0;

    EffectStore mRecords; // archival production
    std::map<uint64_t, std::vector<EffectRecord>> mCache;
    EntryRecordPlan* mPlan = nullptr;
    const fco::LogEntry* mPlanEntry = nullptr;

    EffectSource* mSource = nullptr;
    std::function<void(const ExecEvent&)> mObserver;
    std::vector<ExecEvent> mEvents;
    std::vector<ServiceId> mDeployOrder;
    std::vector<runtime::LyquidBundle> mDeployedBundles; // archival replay
    Position mLastSnapshot = 0;
    bool mGenesisSnapshotted = false;
};

// Direct in-process pull from an archival node (unit tests, oracle runs).
class DirectEffectSource : public EffectSource {
  public:
    explicit DirectEffectSource(Node& archival) : mArchival(archival) {}

    std::optional<std::vector<EffectRecord>> fetch(const std::set<ServiceId>& targets,
                                                   Position lo, Position hi) override;

  private:
    Node& mArchival;
};

} // namespace lyquor::node
