// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/runtime/context.hpp"
#include "lyquor/runtime/engine.hpp"

namespace lyquor::runtime {

StateHandle::StateHandle(dma::MemIo& io, const std::vector<dma::RootEntry>& roots)
    : mIo(io), mRoots(roots)
{
}

const dma::RootEntry&
StateHandle::find(const std::string& root) const
{
    for (const auto& e : mRoots)
        if (e.name == root)
            return e;
    fail(Errc::unknown_root, "no root named " + root);
}

U256Cell
StateHandle::u256(const std::string& root) const
{
    const auto& e = find(root);
    if (e.type_tag != kRootU256)
        fail(Errc::bad_request, "root " + root + " is not a u256 cell");
    return U256Cell(mIo, e.addr);
}

ValueCell
StateHandle::value(const std::string& root) const
{
    const auto& e = find(root);
    if (e.type_tag != kRootValue)
        fail(Errc::bad_request, "root " + root + " is not a value cell");
    return ValueCell(mIo, e.addr);
}

AddrU256Map
StateHandle::map(const std::string& root) const
{
    const auto& e = find(root);
    if (e.type_tag != kRootAddrMap)
        fail(Errc::bad_request, "root " + root + " is not an address map");
    return AddrU256Map(mIo, e.addr);
}

ValueList
StateHandle::list(const std::string& root) const
{
    const auto& e = find(root);
    if (e.type_tag != kRootValueList)
        fail(Errc::bad_request, "root " + root + " is not a value list");
    return ValueList(mIo, e.addr);
}

Value
StateHandle::read(const std::string& root) const
{
    const auto& e = find(root);
    return read_root_container(mIo, e.type_tag, e.addr);
}

Value
NetworkCtx::inner_call(const ServiceId& target, const std::string& method,
                       std::vector<Value> args)
{
    return mEngine.inner_call(target, method, std::move(args));
}

void
NetworkCtx::emit_event(const std::string& name, std::vector<Value> args)
{
    mEngine.emit_event(name, std::move(args));
}

Value
InstanceCtx::upc(const upc::UpcSpec& spec)
{
    if (!mUpc)
        throw MethodAbort{CallStatus::MethodError, "no_upc_environment"};
    return mUpc->invoke(spec, mUpcDepth, mUpcDeadline);
}

} // namespace lyquor::runtime
