// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/common.hpp"
#include "lyquor/value.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lyquor::node {

// Line-oriented structured-text protocol: space-separated key=value fields,
// with values in canonical text form (no embedded spaces outside quotes).
//
//   kind=send service=C method=transfer caller=@alice args=[@bob,10] gas=100000
//   kind=call service=C method=balance_of caller=@alice args=[@alice]
//
// Responses:
//   ok position=7
//   ok value=90
//   err code=MethodError detail=insufficient

struct GatewayRequest {
    enum class Kind { Send, Call };
    Kind kind = Kind::Call;
    ServiceId service;
    std::string method;
    Address caller;
    std::vector<Value> args;
    uint64_t gas_limit = 100'000;

    std::string to_line() const;
    static GatewayRequest parse(const std::string& line);
};

struct GatewayResponse {
    bool ok = false;
    std::optional<Position> position;
    std::optional<Value> value;
    std::string code;
    std::string detail;

    static GatewayResponse make_position(Position p);
    static GatewayResponse make_value(Value v);
    static GatewayResponse make_error(Errc code, const std::string& detail);

    std::string to_line() const;
    static GatewayResponse parse(const std::string& line);
};

// Splits a protocol line into fields, honoring quotes and brackets.
std::vector<std::string> split_fields(const std::string& line);

} // namespace lyquor::node
