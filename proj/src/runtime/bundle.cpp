// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/runtime/bundle.hpp"

#include <set>

namespace lyquor::runtime {

void
LyquidBundle::validate() const
{
    if (name.empty())
        fail(Errc::bad_request, "bundle needs a name");
    std::set<std::pair<int, std::string>> seen;
    for (const auto& r : roots)
    {
        if (!seen.insert({static_cast<int>(r.region), r.name}).second)
            fail(Errc::duplicate_name, "duplicate root: " + r.name);
    }
}

Digest
LyquidBundle::make_code_tag(const std::string& name, const std::string& version)
{
    std::string blob = name + "\x1f" + version;
    return sha256({reinterpret_cast<const uint8_t*>(blob.data()), blob.size()});
}

void
register_upc_handler(LyquidBundle& bundle, const std::string& name, InstanceFn fn)
{
    if (bundle.upc_handlers.count(name))
        fail(Errc::duplicate_name, "upc handler already registered: " + name);
    bundle.upc_handlers.emplace(name, std::move(fn));
}

} // namespace lyquor::runtime
