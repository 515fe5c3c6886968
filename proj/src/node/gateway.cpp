// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/node/gateway.hpp"

#include <map>

namespace lyquor::node {

std::vector<std::string>
split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    int depth = 0;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i)
    {
        char c = line[i];
        if (quoted)
        {
            cur.push_back(c);
            if (c == '\\' && i + 1 < line.size())
                cur.push_back(line[++i]);
            else if (c == '"')
                quoted = false;
            continue;
        }
        if (c == '"')
        {
            quoted = true;
            cur.push_back(c);
            continue;
        }
        if (c == '[' || c == '{')
            ++depth;
        if (c == ']' || c == '}')
            --depth;
        if (c == ' ' && depth == 0)
        {
            if (!cur.empty())
                fields.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        cur.push_back(c);
    }
    if (!cur.empty())
        fields.push_back(std::move(cur));
    return fields;
}

namespace {

std::map<std::string, std::string>
parse_kv(const std::vector<std::string>& fields, size_t start)
{
    std::map<std::string, std::string> kv;
    for (size_t i = start; i < fields.size(); ++i)
    {
        auto eq = fields[i].find('=');
        if (eq == std::string::npos)
            fail(Errc::parse_error, "expected key=value field: " + fields[i]);
        kv[fields[i].substr(0, eq)] = fields[i].substr(eq + 1);
    }
    return kv;
}

const std::string&
need(const std::map<std::string, std::string>& kv, const std::string& key)
{
    auto it = kv.find(key);
    if (it == kv.end())
        fail(Errc::parse_error, "missing field: " + key);
    return it->second;
}

} // namespace

std::string
GatewayRequest::to_line() const
{
    std::string line = "kind=";
    line += kind == Kind::Send ? "send" : "call";
    line += " service=" + service + " method=" + method;
    line += " caller=" + caller.to_text();
    line += " args=" + Value(args).to_text();
    if (kind == Kind::Send)
        line += " gas=" + std::to_string(gas_limit);
    return line;
}

GatewayRequest
GatewayRequest::parse(const std::string& line)
{
    auto kv = parse_kv(split_fields(line), 0);
    GatewayRequest req;
    const std::string& kind = need(kv, "kind");
    if (kind == "send")
        req.kind = Kind::Send;
    else if (kind == "call")
        req.kind = Kind::Call;
    else
        fail(Errc::parse_error, "unknown request kind: " + kind);
    req.service = need(kv, "service");
    req.method = need(kv, "method");
    req.caller = Value::parse_text(need(kv, "caller")).as_address();
    req.args = Value::parse_text(need(kv, "args")).as_list();
    if (auto it = kv.find("gas"); it != kv.end())
        req.gas_limit = std::stoull(it->second);
    return req;
}

GatewayResponse
GatewayResponse::make_position(Position p)
{
    GatewayResponse r;
    r.ok = true;
    r.position = p;
    return r;
}

GatewayResponse
GatewayResponse::make_value(Value v)
{
    GatewayResponse r;
    r.ok = true;
    r.value = std::move(v);
    return r;
}

GatewayResponse
GatewayResponse::make_error(Errc code, const std::string& detail)
{
    GatewayResponse r;
    r.ok = false;
    r.code = std::string(errc_name(code));
    r.detail = detail;
    return r;
}

std::string
GatewayResponse::to_line() const
{
    if (ok)
    {
        if (position)
            return "ok position=" + std::to_string(*position);
        return "ok value=" + (value ? value->to_text() : std::string("[]"));
    }
    std::string line = "err code=" + code;
    if (!detail.empty())
        line += " detail=" + Value(detail).to_text();
    return line;
}

GatewayResponse
GatewayResponse::parse(const std::string& line)
{
    auto fields = split_fields(line);
    if (fields.empty())
        fail(Errc::parse_error, "empty gateway response");
    GatewayResponse r;
    auto kv = parse_kv(fields, 1);
    if (fields[0] == "ok")
    {
        r.ok = true;
        if (auto it = kv.find("position"); it != kv.end())
            r.position = std::stoull(it->second);
        if (auto it = kv.find("value"); it != kv.end())
            r.value = Value::parse_text(it->second);
        return r;
    }
    if (fields[0] == "err")
    {
        r.ok = false;
        r.code = need(kv, "code");
        if (auto it = kv.find("detail"); it != kv.end())
            r.detail = Value::parse_text(it->second).as_string();
        return r;
    }
    fail(Errc::parse_error, "bad gateway response: " + line);
}

} // namespace lyquor::node
