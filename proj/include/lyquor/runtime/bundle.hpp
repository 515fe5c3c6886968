// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/dma/memory_space.hpp"
#include "lyquor/hashing.hpp"
#include "lyquor/value.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace lyquor::runtime {

class NetworkCtx;
class InstanceCtx;
class ViewCtx;

using NetworkFn = std::function<Value(NetworkCtx&, const std::vector<Value>&)>;
using InstanceFn = std::function<Value(InstanceCtx&, const std::vector<Value>&)>;
using ViewFn = std::function<Value(ViewCtx&, const std::vector<Value>&)>;

struct RootSpec {
    dma::Region region = dma::Region::Network;
    std::string name;
    uint32_t type_tag = 0;
    Value init;
};

// A deployable service: named state roots with initializers plus the method
// tables. Bundles are in-process behavior modules keyed by code_tag; nodes
// that do not carry a bundle can still follow its sequenced effects.
struct LyquidBundle {
    ServiceId name;
    Digest code_tag{};
    std::vector<RootSpec> roots;
    std::map<std::string, NetworkFn> network_methods;
    std::map<std::string, ViewFn> network_views; // read-only, callable off-sequence
    std::map<std::string, InstanceFn> instance_methods;
    std::map<std::string, InstanceFn> upc_handlers;
    // Services this bundle may call into; drives effect prefetch and the
    // parallel scheduler's touch sets.
    std::set<ServiceId> declared_callees;

    void validate() const; // DuplicateName on root collisions
    static Digest make_code_tag(const std::string& name, const std::string& version);
};

void register_upc_handler(LyquidBundle& bundle, const std::string& name, InstanceFn fn);

} // namespace lyquor::runtime
