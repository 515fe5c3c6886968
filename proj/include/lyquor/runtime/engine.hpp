// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/dma/memory_space.hpp"
#include "lyquor/fco/log.hpp"
#include "lyquor/runtime/bundle.hpp"
#include "lyquor/runtime/context.hpp"
#include "lyquor/runtime/effect.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>

namespace lyquor::runtime {

struct ExecResult {
    CallOutcome outcome;
    uint64_t gas_used = 0;
    std::vector<Effect> effects;
};

// Outcome of a call into a non-hosted service, supplied by the node's
// effect-resolution hook. gas_used is charged to the calling frame's meter
// so gas trajectories match full replication.
struct ResolvedCall {
    CallOutcome outcome;
    uint64_t gas_used = 0;
};

using EffectResolver =
    std::function<std::optional<ResolvedCall>(const ServiceId& source, const ServiceId& target,
                                              const std::string& method,
                                              const std::vector<Value>& args)>;

// Raised when an inner call leaves the declared touch set supplied by the
// parallel scheduler; the scheduler rolls the entry back and falls back to
// serial execution from there. Not catchable as a method failure.
struct TouchGuardBreach {
    ServiceId target;
};

// Executes deployed bundles against their memory spaces: deterministic
// sequenced network calls with entry-level rollback, off-sequence instance
// calls, and replay of recorded effects from services it does not host.
class Engine {
  public:
    Engine() = default;
    explicit Engine(std::filesystem::path store_dir) : mDir(std::move(store_dir)) {}

    ServiceId deploy(const LyquidBundle& bundle);
    bool hosts(const ServiceId& s) const { return mHosted.count(s) > 0; }
    std::vector<ServiceId> services() const;

    dma::MemorySpace& space(const ServiceId& s);
    const dma::MemorySpace& space(const ServiceId& s) const;
    const LyquidBundle& bundle(const ServiceId& s) const;

    void set_effect_resolver(EffectResolver r) { mResolver = std::move(r); }
    void set_upc_invoker(UpcInvoker* invoker) { mUpcInvoker = invoker; }
    void set_instance_gas_limit(uint64_t limit) { mInstanceGasLimit = limit; }
    void set_touch_guard(const std::set<ServiceId>* guard) { mTouchGuard = guard; }

    // Sequenced execution of one log entry whose target is hosted here.
    // Rolls every touched network region back on failure. Infrastructure
    // errors (e.g. UnresolvedEffect) propagate after rollback.
    ExecResult exec_network(const fco::LogEntry& entry);

    // Replays one committed recorded call (source not hosted, target hosted)
    // at the entry's position. Joins the active entry scope when invoked
    // from inside a resolver, otherwise runs as its own atomic scope.
    ExecResult apply_recorded_call(const fco::LogEntry& entry, const EffectRecord& rec);

    // Off-sequence execution. Throws Error(method_error / gas_exhausted /
    // method_not_found) on failure; instance writes roll back.
    Value exec_instance(const ServiceId& s, const std::string& method,
                        const std::vector<Value>& args, const Address& caller);
    Value exec_upc_handler(const ServiceId& s, const std::string& handler,
                           const std::vector<Value>& args, const Address& caller,
                           uint32_t depth, uint64_t deadline_step);
    bool has_upc_handler(const ServiceId& s, const std::string& handler) const;

    // Read-only network view method (gateway `call` surface).
    Value exec_view(const ServiceId& s, const std::string& method,
                    const std::vector<Value>& args, const Address& caller);
    bool has_view(const ServiceId& s, const std::string& method) const;
    bool has_instance_method(const ServiceId& s, const std::string& method) const;

    // Root inspection: current bytes, or network bytes as of a snapshot.
    Value read_root(const ServiceId& s, const std::string& root) const;
    Value read_root_at(const ServiceId& s, const std::string& root, Position position) const;
    Digest network_digest(const ServiceId& s) const;

    // Used by contexts.
    Value inner_call(const ServiceId& target, const std::string& method,
                     std::vector<Value> args);
    void emit_event(const std::string& name, std::vector<Value> args);
    UpcInvoker* upc_invoker() const { return mUpcInvoker; }

  private:
    struct Hosted {
        LyquidBundle bundle;
        dma::MemorySpace space;
        std::vector<dma::RootEntry> network_roots;
        std::vector<dma::RootEntry> instance_roots;
    };

    struct ActiveEntry {
        Position position = 0;
        Address origin;
        uint64_t gas_limit = 0;
        std::vector<Effect> effects;
        uint32_t next_emission = 0;
        std::set<ServiceId> journaled;
    };

    struct Frame {
        ServiceId service;
        GasMeter* meter = nullptr;
        int32_t emission = -1;
    };

    Hosted& hosted(const ServiceId& s);
    const Hosted& hosted(const ServiceId& s) const;
    void join_entry_journal(Hosted& h);
    Value run_network_frame(Hosted& h, const std::string& method,
                            const std::vector<Value>& args, const Address& caller,
                            GasMeter& meter, int32_t emission);
    void finish_scope(bool commit);
    Value dispatch_instance(Hosted& h, const InstanceFn& fn, const std::vector<Value>& args,
                            const Address& caller, uint32_t depth, uint64_t deadline);

    std::optional<std::filesystem::path> mDir;
    std::map<ServiceId, Hosted> mHosted;
    EffectResolver mResolver;
    UpcInvoker* mUpcInvoker = nullptr;
    const std::set<ServiceId>* mTouchGuard = nullptr;
    uint64_t mInstanceGasLimit = 10'000'000;

    ActiveEntry* mActive = nullptr;
    std::vector<Frame> mFrames;
};

} // namespace lyquor::runtime
