// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/node/node.hpp"

#include <algorithm>
#include <random>

namespace lyquor::node {

using runtime::CallStatus;
using runtime::ExecResult;

std::string_view
apply_mode_name(ApplyMode m)
{
    switch (m)
    {
    case ApplyMode::Local:
        return "local";
    case ApplyMode::Inline:
        return "inline";
    case ApplyMode::Record:
        return "record";
    }
    return "unknown";
}

Node::Node(NodeId id, HostingProfile profile, std::optional<std::filesystem::path> data_dir)
    : mId(id)
    , mProfile(std::move(profile))
    , mEngine(data_dir ? runtime::Engine(*data_dir) : runtime::Engine())
{
    mEngine.set_effect_resolver(
        [this](const ServiceId& src, const ServiceId& tgt, const std::string& method,
               const std::vector<Value>& args) { return resolve(src, tgt, method, args); });
}

void
Node::deploy(const runtime::LyquidBundle& bundle)
{
    mDeployOrder.push_back(bundle.name);
    if (hosts(bundle.name))
        mEngine.deploy(bundle);
}

void
Node::snapshot_genesis()
{
    if (!mProfile.archival || mGenesisSnapshotted)
        return;
    for (const auto& s : mEngine.services())
        mEngine.space(s).snapshot(0);
    mGenesisSnapshotted = true;
}

// ---------------------------------------------------------------------------
// log feed

void
Node::on_batch(const fco::BatchInfo& batch, std::vector<fco::LogEntry> entries)
{
    if (batch.number <= mBatches.size())
        return; // duplicate notify
    if (batch.number != mBatches.size() + 1)
    {
        // out-of-order delivery: stash until the gap fills
        mPending.emplace(batch.number, std::make_pair(batch, std::move(entries)));
        return;
    }
    mBatches.push_back(batch);
    for (auto& e : entries)
    {
        if (e.position != mLog.size() + 1)
            fail(Errc::bad_request, "non-contiguous batch feed");
        mLog.push_back(std::move(e));
    }
    if (!batch.empty())
        mSealed = batch.last;

    auto it = mPending.find(mBatches.size() + 1);
    while (it != mPending.end())
    {
        auto [b, es] = std::move(it->second);
        mPending.erase(it);
        mBatches.push_back(b);
        for (auto& e : es)
        {
            if (e.position != mLog.size() + 1)
                fail(Errc::bad_request, "non-contiguous batch feed");
            mLog.push_back(std::move(e));
        }
        if (!b.empty())
            mSealed = b.last;
        it = mPending.find(mBatches.size() + 1);
    }
}

const fco::LogEntry&
Node::entry_at(Position p) const
{
    if (p == 0 || p > mLog.size())
        fail(Errc::out_of_range, "position not in local log");
    return mLog[p - 1];
}

// ---------------------------------------------------------------------------
// record demand

bool
Node::batch_needs_records(const fco::BatchInfo& b) const
{
    if (mProfile.archival || b.empty())
        return false;
    for (Position p = b.first; p <= b.last; ++p)
    {
        const auto& e = entry_at(p);
        if (!hosts(e.intent.target))
            return true;
        // transitive declared callees must all be hosted, else some call
        // may need a recorded outcome
        std::vector<ServiceId> stack{e.intent.target};
        std::set<ServiceId> seen{e.intent.target};
        while (!stack.empty())
        {
            ServiceId s = stack.back();
            stack.pop_back();
            if (!hosts(s))
                return true;
            for (const auto& c : mEngine.bundle(s).declared_callees)
                if (seen.insert(c).second)
                    stack.push_back(c);
        }
    }
    return false;
}

std::set<ServiceId>
Node::fetch_targets() const
{
    std::set<ServiceId> targets;
    for (const auto& s : mEngine.services())
    {
        targets.insert(s);
        for (const auto& c : mEngine.bundle(s).declared_callees)
            targets.insert(c);
    }
    return targets;
}

void
Node::supply_effects(uint64_t batch, std::vector<EffectRecord> records)
{
    mCache.emplace(batch, std::move(records));
}

// ---------------------------------------------------------------------------
// execution

void
Node::note_event(ExecEvent ev)
{
    if (mObserver)
        mObserver(ev);
    mEvents.push_back(std::move(ev));
}

void
Node::harvest_records(const fco::LogEntry& entry, const ExecResult& res)
{
    std::vector<EffectRecord> recs;
    for (const auto& e : res.effects)
    {
        if (e.kind != runtime::EffectKind::InnerCall)
            continue;
        EffectRecord r;
        r.position = entry.position;
        r.emission_index = e.emission_index;
        r.parent_index = e.parent_index;
        r.subtree_end = e.subtree_end;
        r.source = e.source;
        r.target = e.target;
        r.method = e.method;
        r.args = e.args;
        r.outcome = e.result;
        r.gas_used = e.gas_used;
        r.committed = res.outcome.ok();
        recs.push_back(std::move(r));
    }
    mRecords.add(entry.position, std::move(recs));
}

std::optional<runtime::ResolvedCall>
Node::resolve(const ServiceId& source, const ServiceId& target, const std::string& method,
              const std::vector<Value>& args)
{
    if (!mPlan)
        return std::nullopt;
    auto idx = mPlan->pop_queue(source, target);
    if (!idx)
        return std::nullopt;
    const EffectRecord rec = mPlan->records[*idx];
    if (rec.method != method || Value(rec.args) != Value(args))
        fail(Errc::unresolved_effect,
             "archival record does not match local call " + source + " -> " + target);
    mPlan->consumed.insert(rec.emission_index);

    // Effects nested under the recorded call whose issuing frame never runs
    // here land on hosted services now, in original order.
    apply_interval(*mPlanEntry, rec.emission_index + 1, rec.subtree_end);
    return runtime::ResolvedCall{rec.outcome, rec.gas_used};
}

void
Node::apply_interval(const fco::LogEntry& entry, uint32_t lo, uint32_t hi)
{
    if (!mPlan)
        return;
    for (size_t i = 0; i < mPlan->records.size(); ++i)
    {
        const auto& rec = mPlan->records[i];
        if (rec.emission_index < lo || rec.emission_index >= hi)
            continue;
        if (mPlan->consumed.count(rec.emission_index))
            continue;
        if (hosts(rec.source) || !hosts(rec.target))
            continue;
        mPlan->consumed.insert(rec.emission_index);
        ExecResult res = mEngine.apply_recorded_call(entry, rec);
        note_event({entry.position, rec.target, ApplyMode::Record, res.outcome.status,
                    res.outcome.error_code});
    }
}

void
Node::apply_foreign_entry(const fco::LogEntry& entry)
{
    auto cache_it = mCache.find(entry.batch);
    std::vector<EffectRecord> recs;
    if (cache_it != mCache.end())
        for (const auto& r : cache_it->second)
            if (r.position == entry.position)
                recs.push_back(r);

    EntryRecordPlan plan = EntryRecordPlan::build(std::move(recs));
    mPlan = &plan;
    mPlanEntry = &entry;
    for (size_t i = 0; i < plan.records.size(); ++i)
    {
        const auto& rec = plan.records[i];
        if (plan.consumed.count(rec.emission_index))
            continue;
        if (!rec.committed || hosts(rec.source) || !hosts(rec.target))
            continue;
        plan.consumed.insert(rec.emission_index);
        ExecResult res = mEngine.apply_recorded_call(entry, rec);
        note_event({entry.position, rec.target, ApplyMode::Record, res.outcome.status,
                    res.outcome.error_code});
    }
    mPlan = nullptr;
    mPlanEntry = nullptr;
}

void
Node::exec_entry(const fco::LogEntry& entry)
{
    if (!hosts(entry.intent.target))
    {
        apply_foreign_entry(entry);
        return;
    }

    std::vector<EffectRecord> recs;
    if (auto it = mCache.find(entry.batch); it != mCache.end())
        for (const auto& r : it->second)
            if (r.position == entry.position)
                recs.push_back(r);
    EntryRecordPlan plan = EntryRecordPlan::build(std::move(recs));
    mPlan = &plan;
    mPlanEntry = &entry;

    ExecResult res;
    try
    {
        res = mEngine.exec_network(entry);
    }
    catch (...)
    {
        mPlan = nullptr;
        mPlanEntry = nullptr;
        throw;
    }
    mPlan = nullptr;
    mPlanEntry = nullptr;

    note_event({entry.position, entry.intent.target, ApplyMode::Local, res.outcome.status,
                res.outcome.error_code});
    for (const auto& e : res.effects)
        if (e.kind == runtime::EffectKind::InnerCall && hosts(e.source) && hosts(e.target))
            note_event({entry.position, e.target, ApplyMode::Inline, e.result.status,
                        e.result.error_code});

    if (mProfile.archival)
        harvest_records(entry, res);
}

void
Node::snapshot_batch_end(const fco::BatchInfo& b)
{
    if (!mProfile.archival || b.empty() || b.last <= mLastSnapshot)
        return;
    for (const auto& s : mEngine.services())
        mEngine.space(s).snapshot(b.last);
    mLastSnapshot = b.last;
}

std::optional<FetchRequest>
Node::advance(Position bound)
{
    bound = std::min(bound, mSealed);
    while (mFrontier < bound)
    {
        Position pos = mFrontier + 1;
        const auto& entry = entry_at(pos);
        const auto& batch = mBatches.at(entry.batch - 1);
        if (batch_needs_records(batch) && !mCache.count(batch.number))
            return FetchRequest{fetch_targets(), batch.number, batch.first, batch.last};
        exec_entry(entry);
        mFrontier = pos;
        if (pos == batch.last)
            snapshot_batch_end(batch);
    }
    return std::nullopt;
}

ExecutionFrontier
Node::run_until(Position position)
{
    if (position > mSealed)
        fail(Errc::unsealed_range, "run_until past sealed frontier");
    while (true)
    {
        auto req = advance(position);
        if (!req)
            break;
        if (!mSource)
            fail(Errc::effect_gap, "no effect source configured");
        auto recs = mSource->fetch(req->targets, req->lo, req->hi);
        if (!recs)
            fail(Errc::effect_gap,
                 "archival records unavailable for batch " + std::to_string(req->batch));
        supply_effects(req->batch, std::move(*recs));
    }
    return frontier();
}

ExecutionFrontier
Node::frontier() const
{
    ExecutionFrontier f;
    f.global = mFrontier;
    for (const auto& s : mEngine.services())
        f.per_service[s] = mFrontier;
    return f;
}

// ---------------------------------------------------------------------------
// parallel batch application

std::set<ServiceId>
Node::touch_set(const fco::LogEntry& entry) const
{
    std::set<ServiceId> touch{entry.intent.target};
    if (hosts(entry.intent.target))
    {
        std::vector<ServiceId> stack{entry.intent.target};
        while (!stack.empty())
        {
            ServiceId s = stack.back();
            stack.pop_back();
            if (!hosts(s))
                continue;
            for (const auto& c : mEngine.bundle(s).declared_callees)
                if (touch.insert(c).second)
                    stack.push_back(c);
        }
        return touch;
    }
    if (auto it = mCache.find(entry.batch); it != mCache.end())
        for (const auto& r : it->second)
            if (r.position == entry.position)
            {
                touch.insert(r.source);
                touch.insert(r.target);
            }
    return touch;
}

ExecutionFrontier
Node::parallel_apply(const fco::BatchInfo& batch, uint64_t schedule_seed)
{
    if (batch.number > mBatches.size() || !mBatches.at(batch.number - 1).sealed)
        fail(Errc::unsealed_range, "batch not sealed locally");
    if (batch.empty())
        return frontier();
    if (mFrontier + 1 != batch.first)
        fail(Errc::bad_request, "parallel_apply must start at the execution frontier");

    if (batch_needs_records(batch) && !mCache.count(batch.number))
    {
        if (!mSource)
            fail(Errc::effect_gap, "no effect source configured");
        auto recs = mSource->fetch(fetch_targets(), batch.first, batch.last);
        if (!recs)
            fail(Errc::effect_gap, "archival records unavailable");
        supply_effects(batch.number, std::move(*recs));
    }

    // wave construction: an entry lands one wave after the last conflicting
    // entry; disjoint touch sets share a wave
    std::map<ServiceId, uint64_t> last_wave;
    std::map<uint64_t, std::vector<Position>> waves;
    std::map<Position, std::set<ServiceId>> touches;
    for (Position p = batch.first; p <= batch.last; ++p)
    {
        auto t = touch_set(entry_at(p));
        uint64_t w = 1;
        for (const auto& s : t)
            if (auto it = last_wave.find(s); it != last_wave.end())
                w = std::max(w, it->second + 1);
        for (const auto& s : t)
            last_wave[s] = w;
        waves[w].push_back(p);
        touches[p] = std::move(t);
    }

    auto services = mEngine.services();
    std::mt19937_64 rng(schedule_seed);
    bool serial_fallback = false;
    Position fallback_from = batch.first;

    for (auto& [w, positions] : waves)
    {
        if (serial_fallback)
            break;
        std::shuffle(positions.begin(), positions.end(), rng);

        for (const auto& s : services)
            mEngine.space(s).begin_entry();
        try
        {
            for (Position p : positions)
            {
                const auto& guard = touches.at(p);
                mEngine.set_touch_guard(&guard);
                exec_entry(entry_at(p));
            }
            mEngine.set_touch_guard(nullptr);
            for (const auto& s : services)
                mEngine.space(s).commit_entry();
        }
        catch (const runtime::TouchGuardBreach&)
        {
            // undeclared inner call: roll the wave back, finish serially
            mEngine.set_touch_guard(nullptr);
            for (const auto& s : services)
                mEngine.space(s).abort_entry();
            serial_fallback = true;
            fallback_from = positions.empty() ? batch.first : *std::min_element(positions.begin(), positions.end());
            // all earlier waves committed; serial rerun starts at this wave's
            // earliest position, which no committed wave can precede
            for (auto& [w2, ps2] : waves)
                for (Position p2 : ps2)
                    if (w2 >= w)
                        fallback_from = std::min(fallback_from, p2);
        }
        catch (...)
        {
            mEngine.set_touch_guard(nullptr);
            for (const auto& s : services)
                mEngine.space(s).abort_entry();
            throw;
        }
    }

    if (serial_fallback)
    {
        for (Position p = fallback_from; p <= batch.last; ++p)
            exec_entry(entry_at(p));
    }

    mFrontier = batch.last;
    snapshot_batch_end(batch);
    return frontier();
}

// ---------------------------------------------------------------------------
// archival serving

std::vector<EffectRecord>
Node::serve_effects(const std::set<ServiceId>& targets, Position lo, Position hi) const
{
    if (!mProfile.archival)
        fail(Errc::bad_request, "serve_effects on a non-archival node");
    if (hi > mFrontier)
        fail(Errc::frontier_behind, "archival frontier behind requested range");
    return mRecords.query(targets, lo, hi);
}

Value
Node::serve_state(const ServiceId& service, const std::string& root, Position position) const
{
    if (!mProfile.archival)
        fail(Errc::bad_request, "serve_state on a non-archival node");
    if (position > mFrontier)
        fail(Errc::frontier_behind, "archival frontier behind requested position");

    if (mEngine.space(service).has_snapshot(position))
        return mEngine.read_root_at(service, root, position);
    if (position == mFrontier)
        return mEngine.read_root(service, root);

    // no snapshot at that position: replay the prefix on a scratch engine
    runtime::Engine scratch;
    for (const auto& s : mDeployOrder)
        scratch.deploy(mEngine.bundle(s));
    for (Position p = 1; p <= position; ++p)
        scratch.exec_network(entry_at(p));
    return scratch.read_root(service, root);
}

// ---------------------------------------------------------------------------
// gateway

GatewayResponse
Node::gateway_call(const GatewayRequest& req, const SubmitFn& submit)
{
    try
    {
        if (req.kind == GatewayRequest::Kind::Send)
        {
            if (!submit)
                return GatewayResponse::make_error(Errc::bad_request,
                                                   "node has no sequencer route");
            fco::CallIntent intent{req.caller, req.service, req.method, req.args,
                                   req.gas_limit};
            return GatewayResponse::make_position(submit(intent));
        }
        if (!hosts(req.service) || !mEngine.hosts(req.service))
            return GatewayResponse::make_error(Errc::not_hosted,
                                               "service not hosted: " + req.service);
        if (mEngine.has_instance_method(req.service, req.method))
            return GatewayResponse::make_value(
                mEngine.exec_instance(req.service, req.method, req.args, req.caller));
        if (mEngine.has_view(req.service, req.method))
            return GatewayResponse::make_value(
                mEngine.exec_view(req.service, req.method, req.args, req.caller));
        if (mEngine.has_upc_handler(req.service, req.method))
            return GatewayResponse::make_value(
                mEngine.exec_upc_handler(req.service, req.method, req.args, req.caller, 0, 0));
        return GatewayResponse::make_error(Errc::method_not_found,
                                           "no callable method " + req.method);
    }
    catch (const Error& e)
    {
        return GatewayResponse::make_error(e.code(), e.detail());
    }
}

std::string
Node::gateway_line(const std::string& request_line, const SubmitFn& submit)
{
    try
    {
        return gateway_call(GatewayRequest::parse(request_line), submit).to_line();
    }
    catch (const Error& e)
    {
        return GatewayResponse::make_error(e.code(), e.detail()).to_line();
    }
}

void
Node::persist_all()
{
    for (const auto& s : mEngine.services())
        mEngine.space(s).persist();
}

std::optional<std::vector<EffectRecord>>
DirectEffectSource::fetch(const std::set<ServiceId>& targets, Position lo, Position hi)
{
    try
    {
        return mArchival.serve_effects(targets, lo, hi);
    }
    catch (const Error& e)
    {
        if (e.code() == Errc::frontier_behind)
        {
            // pull what the archival node has not executed yet by advancing it
            mArchival.run_until(hi);
            return mArchival.serve_effects(targets, lo, hi);
        }
        throw;
    }
}

} // namespace lyquor::node
