// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/runtime/engine.hpp"

#include <algorithm>

namespace lyquor::runtime {

namespace {

// Failures that are a deterministic function of the entry and the state it
// runs against; they fail the call identically on every hosting node.
bool
deterministic_method_failure(Errc c)
{
    switch (c)
    {
    case Errc::region_violation:
    case Errc::bad_request:
    case Errc::out_of_range:
    case Errc::out_of_memory:
    case Errc::bad_free:
    case Errc::quorum_not_met:
    case Errc::no_eligible_nodes:
    case Errc::depth_exceeded:
    case Errc::unknown_root:
        return true;
    default:
        return false;
    }
}

// Swaps a space's access policy and gas hook for one frame.
class FrameGuard {
  public:
    FrameGuard(dma::MemorySpace& space, dma::AccessPolicy policy, GasMeter* meter)
        : mSpace(space), mPrevPolicy(space.policy()), mPrevHook(space.gas_hook())
    {
        mSpace.set_policy(policy);
        if (meter)
            mSpace.set_gas_hook([meter](uint64_t bytes) { meter->charge_memory(bytes); });
        else
            mSpace.set_gas_hook(nullptr);
    }

    ~FrameGuard()
    {
        mSpace.set_policy(mPrevPolicy);
        mSpace.set_gas_hook(mPrevHook);
    }

  private:
    dma::MemorySpace& mSpace;
    dma::AccessPolicy mPrevPolicy;
    std::function<void(uint64_t)> mPrevHook;
};

} // namespace

// ---------------------------------------------------------------------------
// deployment

ServiceId
Engine::deploy(const LyquidBundle& b)
{
    b.validate();
    if (mHosted.count(b.name))
        fail(Errc::duplicate_name, "service already deployed: " + b.name);

    Hosted h{b, mDir ? dma::MemorySpace::open(*mDir, b.name) : dma::MemorySpace::create(b.name),
             {}, {}};

    bool fresh = h.space.roots(dma::Region::Network).empty() &&
                 h.space.roots(dma::Region::Instance).empty();
    if (fresh)
    {
        for (const auto& spec : b.roots)
        {
            uint32_t addr = init_root_container(h.space, spec.region, spec.type_tag, spec.init);
            h.space.add_root(spec.region, spec.name, addr, spec.type_tag);
        }
    }
    h.network_roots = h.space.roots(dma::Region::Network);
    h.instance_roots = h.space.roots(dma::Region::Instance);
    mHosted.emplace(b.name, std::move(h));
    return b.name;
}

std::vector<ServiceId>
Engine::services() const
{
    std::vector<ServiceId> out;
    for (const auto& [id, _] : mHosted)
        out.push_back(id);
    return out;
}

Engine::Hosted&
Engine::hosted(const ServiceId& s)
{
    auto it = mHosted.find(s);
    if (it == mHosted.end())
        fail(Errc::unknown_service, "service not hosted: " + s);
    return it->second;
}

const Engine::Hosted&
Engine::hosted(const ServiceId& s) const
{
    auto it = mHosted.find(s);
    if (it == mHosted.end())
        fail(Errc::unknown_service, "service not hosted: " + s);
    return it->second;
}

dma::MemorySpace&
Engine::space(const ServiceId& s)
{
    return hosted(s).space;
}

const dma::MemorySpace&
Engine::space(const ServiceId& s) const
{
    return hosted(s).space;
}

const LyquidBundle&
Engine::bundle(const ServiceId& s) const
{
    return hosted(s).bundle;
}

// ---------------------------------------------------------------------------
// sequenced execution

void
Engine::join_entry_journal(Hosted& h)
{
    if (!mActive || mActive->journaled.count(h.bundle.name))
        return;
    h.space.begin_entry();
    mActive->journaled.insert(h.bundle.name);
}

Value
Engine::run_network_frame(Hosted& h, const std::string& method, const std::vector<Value>& args,
                          const Address& caller, GasMeter& meter, int32_t emission)
{
    auto it = h.bundle.network_methods.find(method);
    if (it == h.bundle.network_methods.end())
        throw MethodAbort{CallStatus::MethodNotFound, "no network method " + method};

    join_entry_journal(h);
    FrameGuard guard(h.space, dma::AccessPolicy::network_exec(), &meter);
    meter.charge_call();

    StateHandle net(h.space, h.network_roots);
    NetworkCtx ctx(*this, h.bundle.name, caller, mActive->origin, mActive->position, meter,
                   std::move(net));
    mFrames.push_back(Frame{h.bundle.name, &meter, emission});
    try
    {
        Value v = it->second(ctx, args);
        mFrames.pop_back();
        return v;
    }
    catch (const Error& e)
    {
        mFrames.pop_back();
        if (deterministic_method_failure(e.code()))
            throw MethodAbort{CallStatus::MethodError, std::string(errc_name(e.code()))};
        throw;
    }
    catch (...)
    {
        mFrames.pop_back();
        throw;
    }
}

void
Engine::finish_scope(bool commit)
{
    if (!mActive)
        return;
    for (const auto& s : mActive->journaled)
    {
        auto& sp = mHosted.at(s).space;
        if (commit)
            sp.commit_entry();
        else
            sp.abort_entry();
    }
    mActive->journaled.clear();
}

ExecResult
Engine::exec_network(const fco::LogEntry& entry)
{
    Hosted& h = hosted(entry.intent.target);
    ExecResult res;
    if (!h.bundle.network_methods.count(entry.intent.method))
    {
        res.outcome = {CallStatus::MethodNotFound, Value(), "no such method"};
        return res;
    }

    ActiveEntry scope;
    scope.position = entry.position;
    scope.origin = entry.intent.caller;
    scope.gas_limit = entry.intent.gas_limit;
    mActive = &scope;
    GasMeter meter(entry.intent.gas_limit);

    try
    {
        Value v = run_network_frame(h, entry.intent.method, entry.intent.args,
                                    entry.intent.caller, meter, -1);
        // summary of network regions this entry wrote
        std::vector<Value> written;
        for (const auto& s : scope.journaled)
            if (mHosted.at(s).space.journal_top_size() > 0)
                written.emplace_back(std::string(s));
        Effect summary;
        summary.kind = EffectKind::StateWriteSummary;
        summary.position = entry.position;
        summary.source = entry.intent.target;
        summary.target = entry.intent.target;
        summary.args = std::move(written);
        summary.emission_index = scope.next_emission++;
        summary.subtree_end = summary.emission_index + 1;
        scope.effects.push_back(std::move(summary));

        finish_scope(true);
        res.outcome = {CallStatus::Ok, v, ""};
    }
    catch (const MethodAbort& a)
    {
        finish_scope(false);
        res.outcome = {a.status, Value(), a.code};
    }
    catch (...)
    {
        finish_scope(false);
        mActive = nullptr;
        mFrames.clear();
        throw;
    }

    res.gas_used = meter.used();
    res.effects = std::move(scope.effects);
    mActive = nullptr;
    return res;
}

ExecResult
Engine::apply_recorded_call(const fco::LogEntry& entry, const EffectRecord& rec)
{
    Hosted& h = hosted(rec.target);
    bool standalone = mActive == nullptr;

    ActiveEntry scope;
    if (standalone)
    {
        scope.position = entry.position;
        scope.origin = entry.intent.caller;
        scope.gas_limit = entry.intent.gas_limit;
        mActive = &scope;
    }

    uint32_t idx = mActive->next_emission++;
    int32_t parent = mFrames.empty() ? -1 : mFrames.back().emission;
    Effect eff;
    eff.kind = EffectKind::InnerCall;
    eff.position = entry.position;
    eff.source = rec.source;
    eff.target = rec.target;
    eff.method = rec.method;
    eff.args = rec.args;
    eff.emission_index = idx;
    eff.parent_index = parent;
    mActive->effects.push_back(std::move(eff));
    size_t eff_i = mActive->effects.size() - 1;

    // Fresh meter: the recorded subtree already consumed its gas inside the
    // original entry; replay just needs headroom for the same operations.
    GasMeter meter(entry.intent.gas_limit);
    ExecResult res;
    try
    {
        Value v = run_network_frame(h, rec.method, rec.args, Address::from_service(rec.source),
                                    meter, static_cast<int32_t>(idx));
        mActive->effects[eff_i].result = {CallStatus::Ok, v, ""};
        mActive->effects[eff_i].gas_used = meter.used();
        mActive->effects[eff_i].subtree_end = mActive->next_emission;
        res.outcome = {CallStatus::Ok, v, ""};
    }
    catch (const MethodAbort& a)
    {
        if (standalone)
        {
            finish_scope(false);
            mActive = nullptr;
        }
        fail(Errc::unresolved_effect,
             "recorded effect diverged on replay: " + rec.target + "." + rec.method + " -> " +
                 a.code);
    }
    catch (...)
    {
        if (standalone)
        {
            finish_scope(false);
            mActive = nullptr;
        }
        throw;
    }

    res.gas_used = meter.used();
    if (standalone)
    {
        finish_scope(true);
        res.effects = std::move(scope.effects);
        mActive = nullptr;
    }
    return res;
}

Value
Engine::inner_call(const ServiceId& target, const std::string& method, std::vector<Value> args)
{
    if (!mActive || mFrames.empty())
        fail(Errc::bad_request, "inner_call outside sequenced execution");
    if (mTouchGuard && !mTouchGuard->count(target))
        throw TouchGuardBreach{target};

    Frame& f = mFrames.back();
    uint32_t idx = mActive->next_emission++;
    Effect eff;
    eff.kind = EffectKind::InnerCall;
    eff.position = mActive->position;
    eff.source = f.service;
    eff.target = target;
    eff.method = method;
    eff.args = args;
    eff.emission_index = idx;
    eff.parent_index = f.emission;
    mActive->effects.push_back(std::move(eff));
    size_t eff_i = mActive->effects.size() - 1;

    GasMeter& meter = *f.meter;
    meter.charge_call();

    if (hosts(target))
    {
        uint64_t before = meter.used();
        try
        {
            Value v = run_network_frame(mHosted.at(target), method, args,
                                        Address::from_service(f.service), meter,
                                        static_cast<int32_t>(idx));
            auto& e = mActive->effects[eff_i];
            e.result = {CallStatus::Ok, v, ""};
            e.gas_used = meter.used() - before;
            e.subtree_end = mActive->next_emission;
            return v;
        }
        catch (const MethodAbort& a)
        {
            auto& e = mActive->effects[eff_i];
            e.result = {a.status, Value(), a.code};
            e.gas_used = meter.used() - before;
            e.subtree_end = mActive->next_emission;
            throw;
        }
    }

    // Foreign target: the node's resolution hook replays the archival record
    // (and applies any hosted effects nested under the recorded call).
    if (!mResolver)
        fail(Errc::unresolved_effect, "no effect resolver for call into " + target);
    auto resolved = mResolver(f.service, target, method, args);
    if (!resolved)
        fail(Errc::unresolved_effect,
             "no effect record for " + f.service + " -> " + target + "." + method);

    meter.charge(resolved->gas_used);
    auto& e = mActive->effects[eff_i];
    e.result = resolved->outcome;
    e.gas_used = resolved->gas_used;
    e.subtree_end = mActive->next_emission;
    if (!resolved->outcome.ok())
        throw MethodAbort{resolved->outcome.status, resolved->outcome.error_code};
    return resolved->outcome.value;
}

void
Engine::emit_event(const std::string& name, std::vector<Value> args)
{
    if (!mActive || mFrames.empty())
        fail(Errc::bad_request, "events can only be emitted during sequenced execution");
    Frame& f = mFrames.back();
    Effect eff;
    eff.kind = EffectKind::Event;
    eff.position = mActive->position;
    eff.source = f.service;
    eff.target = f.service;
    eff.method = name;
    eff.args = std::move(args);
    eff.emission_index = mActive->next_emission++;
    eff.parent_index = f.emission;
    eff.subtree_end = eff.emission_index + 1;
    mActive->effects.push_back(std::move(eff));
}

// ---------------------------------------------------------------------------
// off-sequence execution

Value
Engine::dispatch_instance(Hosted& h, const InstanceFn& fn, const std::vector<Value>& args,
                          const Address& caller, uint32_t depth, uint64_t deadline)
{
    GasMeter meter(mInstanceGasLimit);
    h.space.begin_entry();
    try
    {
        FrameGuard guard(h.space, dma::AccessPolicy::instance_exec(), &meter);
        meter.charge_call();
        StateHandle net(h.space, h.network_roots);
        StateHandle inst(h.space, h.instance_roots);
        InstanceCtx ctx(h.bundle.name, caller, meter, std::move(net), std::move(inst),
                        mUpcInvoker, depth, deadline);
        Value v = fn(ctx, args);
        h.space.commit_entry();
        return v;
    }
    catch (const MethodAbort& a)
    {
        h.space.abort_entry();
        if (a.status == CallStatus::GasExhausted)
            fail(Errc::gas_exhausted, a.code);
        fail(Errc::method_error, a.code);
    }
    catch (const Error& e)
    {
        h.space.abort_entry();
        if (deterministic_method_failure(e.code()))
            fail(Errc::method_error, std::string(errc_name(e.code())));
        throw;
    }
    catch (...)
    {
        h.space.abort_entry();
        throw;
    }
}

Value
Engine::exec_instance(const ServiceId& s, const std::string& method,
                      const std::vector<Value>& args, const Address& caller)
{
    Hosted& h = hosted(s);
    auto it = h.bundle.instance_methods.find(method);
    if (it == h.bundle.instance_methods.end())
        fail(Errc::method_not_found, "no instance method " + method + " on " + s);
    return dispatch_instance(h, it->second, args, caller, 0, 0);
}

Value
Engine::exec_upc_handler(const ServiceId& s, const std::string& handler,
                         const std::vector<Value>& args, const Address& caller, uint32_t depth,
                         uint64_t deadline_step)
{
    Hosted& h = hosted(s);
    auto it = h.bundle.upc_handlers.find(handler);
    if (it == h.bundle.upc_handlers.end())
        fail(Errc::method_not_found, "no upc handler " + handler + " on " + s);
    return dispatch_instance(h, it->second, args, caller, depth, deadline_step);
}

bool
Engine::has_upc_handler(const ServiceId& s, const std::string& handler) const
{
    auto it = mHosted.find(s);
    return it != mHosted.end() && it->second.bundle.upc_handlers.count(handler) > 0;
}

bool
Engine::has_view(const ServiceId& s, const std::string& method) const
{
    auto it = mHosted.find(s);
    return it != mHosted.end() && it->second.bundle.network_views.count(method) > 0;
}

bool
Engine::has_instance_method(const ServiceId& s, const std::string& method) const
{
    auto it = mHosted.find(s);
    return it != mHosted.end() && it->second.bundle.instance_methods.count(method) > 0;
}

Value
Engine::exec_view(const ServiceId& s, const std::string& method, const std::vector<Value>& args,
                  const Address& caller)
{
    Hosted& h = hosted(s);
    auto it = h.bundle.network_views.find(method);
    if (it == h.bundle.network_views.end())
        fail(Errc::method_not_found, "no view method " + method + " on " + s);

    dma::InspectView view(h.space);
    StateHandle net(view, h.network_roots);
    ViewCtx ctx(h.bundle.name, caller, std::move(net));
    try
    {
        return it->second(ctx, args);
    }
    catch (const MethodAbort& a)
    {
        fail(Errc::method_error, a.code);
    }
}

// ---------------------------------------------------------------------------
// inspection

Value
Engine::read_root(const ServiceId& s, const std::string& root) const
{
    const Hosted& h = hosted(s);
    dma::InspectView view(h.space);
    for (const auto& e : h.network_roots)
        if (e.name == root)
            return read_root_container(view, e.type_tag, e.addr);
    for (const auto& e : h.instance_roots)
        if (e.name == root)
            return read_root_container(view, e.type_tag, e.addr);
    fail(Errc::unknown_root, "no root " + root + " on " + s);
}

Value
Engine::read_root_at(const ServiceId& s, const std::string& root, Position position) const
{
    const Hosted& h = hosted(s);
    dma::SnapshotView view(h.space, position);
    for (const auto& e : h.network_roots)
        if (e.name == root)
            return read_root_container(view, e.type_tag, e.addr);
    fail(Errc::unknown_root, "no network root " + root + " on " + s);
}

Digest
Engine::network_digest(const ServiceId& s) const
{
    return hosted(s).space.region_digest(dma::Region::Network);
}

} // namespace lyquor::runtime
