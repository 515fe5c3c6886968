// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/runtime/bundle.hpp"
#include "lyquor/runtime/containers.hpp"
#include "lyquor/runtime/gas.hpp"

#include <string>
#include <vector>

namespace lyquor::upc {
struct UpcSpec;
}

namespace lyquor::runtime {

class Engine;

class UpcInvoker {
  public:
    virtual ~UpcInvoker() = default;
    virtual Value invoke(const upc::UpcSpec& spec, uint32_t caller_depth,
                         uint64_t caller_deadline) = 0;
};

// Typed access to one region's roots through a MemIo. Which operations
// actually succeed is decided by the space's access policy, so a read-only
// binding and a writable one share this surface.
class StateHandle {
  public:
    StateHandle(dma::MemIo& io, const std::vector<dma::RootEntry>& roots);

    U256Cell u256(const std::string& root) const;
    ValueCell value(const std::string& root) const;
    AddrU256Map map(const std::string& root) const;
    ValueList list(const std::string& root) const;
    Value read(const std::string& root) const; // generic, by type tag

  private:
    const dma::RootEntry& find(const std::string& root) const;

    dma::MemIo& mIo;
    const std::vector<dma::RootEntry>& mRoots;
};

// Context for sequenced network functions. Carries no clock, no randomness,
// no node identity and no instance handle; everything observable is a
// function of the log prefix.
class NetworkCtx {
  public:
    NetworkCtx(Engine& engine, const ServiceId& service, Address caller, Address origin,
               Position position, GasMeter& gas, StateHandle network)
        : mEngine(engine)
        , mService(service)
        , mCaller(caller)
        , mOrigin(origin)
        , mPosition(position)
        , mGas(gas)
        , mNetwork(std::move(network))
    {
    }

    const Address& caller() const { return mCaller; }
    const Address& origin() const { return mOrigin; } // top-level intent caller
    const ServiceId& service() const { return mService; }
    Position position() const { return mPosition; }

    StateHandle& network() { return mNetwork; }

    // Cross-service call at the same position. Inline when the target is
    // hosted here, otherwise replayed from an archival effect record.
    Value inner_call(const ServiceId& target, const std::string& method,
                     std::vector<Value> args);

    void emit_event(const std::string& name, std::vector<Value> args);
    void charge(uint64_t arith_units = 1) { mGas.charge(arith_units); }

    [[noreturn]] void abort(std::string code)
    {
        throw MethodAbort{CallStatus::MethodError, std::move(code)};
    }

  private:
    Engine& mEngine;
    const ServiceId& mService;
    Address mCaller;
    Address mOrigin;
    Position mPosition;
    GasMeter& mGas;
    StateHandle mNetwork;
};

// Context for off-sequence instance methods and UPC handlers: writable
// instance state, a read-only view of the latest local network state, and
// (when running under a node) the UPC origin surface.
class InstanceCtx {
  public:
    InstanceCtx(const ServiceId& service, Address caller, GasMeter& gas, StateHandle network,
                StateHandle instance, UpcInvoker* upc, uint32_t upc_depth,
                uint64_t upc_deadline)
        : mService(service)
        , mCaller(caller)
        , mGas(gas)
        , mNetwork(std::move(network))
        , mInstance(std::move(instance))
        , mUpc(upc)
        , mUpcDepth(upc_depth)
        , mUpcDeadline(upc_deadline)
    {
    }

    const Address& caller() const { return mCaller; }
    const ServiceId& service() const { return mService; }

    StateHandle& network() { return mNetwork; } // read-only by policy
    StateHandle& instance() { return mInstance; }

    Value upc(const upc::UpcSpec& spec);
    bool has_upc() const { return mUpc != nullptr; }
    uint32_t upc_depth() const { return mUpcDepth; }
    uint64_t upc_deadline() const { return mUpcDeadline; }

    void charge(uint64_t arith_units = 1) { mGas.charge(arith_units); }

    [[noreturn]] void abort(std::string code)
    {
        throw MethodAbort{CallStatus::MethodError, std::move(code)};
    }

  private:
    const ServiceId& mService;
    Address mCaller;
    GasMeter& mGas;
    StateHandle mNetwork;
    StateHandle mInstance;
    UpcInvoker* mUpc;
    uint32_t mUpcDepth;
    uint64_t mUpcDeadline;
};

// Context for read-only network views (gateway `call` into view methods).
class ViewCtx {
  public:
    ViewCtx(const ServiceId& service, Address caller, StateHandle network)
        : mService(service), mCaller(caller), mNetwork(std::move(network))
    {
    }

    const Address& caller() const { return mCaller; }
    const ServiceId& service() const { return mService; }
    StateHandle& network() { return mNetwork; }

    [[noreturn]] void abort(std::string code)
    {
        throw MethodAbort{CallStatus::MethodError, std::move(code)};
    }

  private:
    const ServiceId& mService;
    Address mCaller;
    StateHandle mNetwork;
};

} // namespace lyquor::runtime
