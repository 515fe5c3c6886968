// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/bytes.hpp"
#include "lyquor/common.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lyquor {

using U256 = boost::multiprecision::uint256_t;
using U512 = boost::multiprecision::uint512_t;

std::array<uint8_t, 32> u256_to_le(const U256& v);
U256 u256_from_le(std::span<const uint8_t> le32);

// Tagged value union shared by log entries, method arguments, state roots,
// effect records and the gateway protocol. The binary encoding is canonical:
// map keys are strictly ascending and every length is an explicit prefix, so
// equal values always encode to identical bytes on every platform.
class Value {
  public:
    enum class Kind : uint8_t {
        U256 = 0,
        Address = 1,
        Bool = 2,
        Bytes = 3,
        String = 4,
        List = 5,
        Map = 6,
    };

    using List = std::vector<Value>;
    using Map = std::vector<std::pair<Value, Value>>; // kept sorted by key

    Value() : mRep(U256(0)) {}
    Value(U256 v) : mRep(std::move(v)) {}
    Value(uint64_t v) : mRep(U256(v)) {}
    Value(int v);
    Value(Address a) : mRep(a) {}
    Value(bool b) : mRep(b) {}
    Value(Bytes b) : mRep(std::move(b)) {}
    Value(std::string s) : mRep(std::move(s)) {}
    Value(const char* s) : mRep(std::string(s)) {}
    Value(List l) : mRep(std::move(l)) {}

    static Value map(Map entries); // sorts and rejects duplicate keys

    Kind kind() const { return static_cast<Kind>(mRep.index()); }

    const U256& as_u256() const { return get<U256>("u256"); }
    const Address& as_address() const { return get<Address>("address"); }
    bool as_bool() const { return get<bool>("bool"); }
    const Bytes& as_bytes() const { return get<Bytes>("bytes"); }
    const std::string& as_string() const { return get<std::string>("string"); }
    const List& as_list() const { return get<List>("list"); }
    const Map& as_map() const { return get<Map>("map"); }

    // Map lookup; returns nullptr when absent.
    const Value* find(const Value& key) const;
    void map_set(Value key, Value val);

    std::strong_ordering operator<=>(const Value& rhs) const;
    bool operator==(const Value& rhs) const { return (*this <=> rhs) == 0; }

    void encode(ByteWriter& w) const;
    Bytes encode() const;
    static Value decode(ByteReader& r);
    static Value decode(std::span<const uint8_t> data);

    // Human-readable round-trip form used by scenario files, the gateway
    // protocol and state dumps. No embedded whitespace.
    std::string to_text() const;
    static Value parse_text(std::string_view text);

  private:
    template <typename T>
    const T& get(const char* what) const
    {
        if (auto* p = std::get_if<T>(&mRep))
            return *p;
        fail(Errc::bad_request, std::string("value is not a ") + what);
    }

    std::variant<U256, Address, bool, Bytes, std::string, List, Map> mRep;
};

} // namespace lyquor
