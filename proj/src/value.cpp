// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/value.hpp"

#include <algorithm>
#include <cctype>

namespace lyquor {

std::array<uint8_t, 32>
u256_to_le(const U256& v)
{
    std::array<uint8_t, 32> out{};
    U256 x = v;
    for (int i = 0; i < 32; ++i)
    {
        out[i] = static_cast<uint8_t>(x & 0xFF);
        x >>= 8;
    }
    return out;
}

U256
u256_from_le(std::span<const uint8_t> le32)
{
    if (le32.size() != 32)
        fail(Errc::parse_error, "u256 needs exactly 32 bytes");
    U256 v = 0;
    for (int i = 31; i >= 0; --i)
    {
        v <<= 8;
        v |= le32[static_cast<size_t>(i)];
    }
    return v;
}

Value::Value(int v) : mRep(U256(0))
{
    if (v < 0)
        fail(Errc::parse_error, "negative integer has no value form");
    mRep = U256(static_cast<unsigned>(v));
}

Value
Value::map(Map entries)
{
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 1; i < entries.size(); ++i)
        if (entries[i - 1].first == entries[i].first)
            fail(Errc::parse_error, "duplicate map key");
    Value v;
    v.mRep = std::move(entries);
    return v;
}

const Value*
Value::find(const Value& key) const
{
    const Map& m = as_map();
    auto it = std::lower_bound(m.begin(), m.end(), key,
                               [](const auto& e, const Value& k) { return e.first < k; });
    if (it != m.end() && it->first == key)
        return &it->second;
    return nullptr;
}

void
Value::map_set(Value key, Value val)
{
    if (kind() != Kind::Map)
        fail(Errc::bad_request, "value is not a map");
    Map& m = std::get<Map>(mRep);
    auto it = std::lower_bound(m.begin(), m.end(), key,
                               [](const auto& e, const Value& k) { return e.first < k; });
    if (it != m.end() && it->first == key)
        it->second = std::move(val);
    else
        m.insert(it, {std::move(key), std::move(val)});
}

std::strong_ordering
Value::operator<=>(const Value& rhs) const
{
    if (auto c = kind() <=> rhs.kind(); c != 0)
        return c;
    switch (kind())
    {
    case Kind::U256:
    {
        const auto& a = std::get<U256>(mRep);
        const auto& b = std::get<U256>(rhs.mRep);
        return a < b ? std::strong_ordering::less
                     : (a == b ? std::strong_ordering::equal : std::strong_ordering::greater);
    }
    case Kind::Address:
        return std::get<Address>(mRep) <=> std::get<Address>(rhs.mRep);
    case Kind::Bool:
        return std::get<bool>(mRep) <=> std::get<bool>(rhs.mRep);
    case Kind::Bytes:
        return std::get<Bytes>(mRep) <=> std::get<Bytes>(rhs.mRep);
    case Kind::String:
        return std::get<std::string>(mRep) <=> std::get<std::string>(rhs.mRep);
    case Kind::List:
    {
        const auto& a = std::get<List>(mRep);
        const auto& b = std::get<List>(rhs.mRep);
        for (size_t i = 0; i < std::min(a.size(), b.size()); ++i)
            if (auto c = a[i] <=> b[i]; c != 0)
                return c;
        return a.size() <=> b.size();
    }
    case Kind::Map:
    {
        const auto& a = std::get<Map>(mRep);
        const auto& b = std::get<Map>(rhs.mRep);
        for (size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        {
            if (auto c = a[i].first <=> b[i].first; c != 0)
                return c;
            if (auto c = a[i].second <=> b[i].second; c != 0)
                return c;
        }
        return a.size() <=> b.size();
    }
    }
    return std::strong_ordering::equal;
}

void
Value::encode(ByteWriter& w) const
{
    w.u8(static_cast<uint8_t>(kind()));
    switch (kind())
    {
    case Kind::U256:
        w.raw(u256_to_le(std::get<U256>(mRep)));
        break;
    case Kind::Address:
        w.raw(std::get<Address>(mRep).bytes);
        break;
    case Kind::Bool:
        w.u8(std::get<bool>(mRep) ? 1 : 0);
        break;
    case Kind::Bytes:
        w.blob(std::get<Bytes>(mRep));
        break;
    case Kind::String:
        w.str(std::get<std::string>(mRep));
        break;
    case Kind::List:
    {
        const auto& l = std::get<List>(mRep);
        w.u32(static_cast<uint32_t>(l.size()));
        for (const auto& v : l)
            v.encode(w);
        break;
    }
    case Kind::Map:
    {
        const auto& m = std::get<Map>(mRep);
        w.u32(static_cast<uint32_t>(m.size()));
        for (const auto& [k, v] : m)
        {
            k.encode(w);
            v.encode(w);
        }
        break;
    }
    }
}

Bytes
Value::encode() const
{
    ByteWriter w;
    encode(w);
    return w.take();
}

Value
Value::decode(ByteReader& r)
{
    auto kind = static_cast<Kind>(r.u8());
    switch (kind)
    {
    case Kind::U256:
    {
        std::array<uint8_t, 32> le{};
        r.raw(le);
        return Value(u256_from_le(le));
    }
    case Kind::Address:
    {
        Address a;
        r.raw(a.bytes);
        return Value(a);
    }
    case Kind::Bool:
    {
        uint8_t b = r.u8();
        if (b > 1)
            fail(Errc::parse_error, "bool byte out of range");
        return Value(b == 1);
    }
    case Kind::Bytes:
        return Value(r.blob());
    case Kind::String:
        return Value(r.str());
    case Kind::List:
    {
        uint32_t n = r.u32();
        List l;
        l.reserve(n);
        for (uint32_t i = 0; i < n; ++i)
            l.push_back(decode(r));
        return Value(std::move(l));
    }
    case Kind::Map:
    {
        uint32_t n = r.u32();
        Map m;
        m.reserve(n);
        for (uint32_t i = 0; i < n; ++i)
        {
            Value k = decode(r);
            Value v = decode(r);
            if (!m.empty() && !(m.back().first < k))
                fail(Errc::parse_error, "map keys not strictly ascending");
            m.emplace_back(std::move(k), std::move(v));
        }
        Value v;
        v.mRep = std::move(m);
        return v;
    }
    }
    fail(Errc::parse_error, "unknown value tag");
}

Value
Value::decode(std::span<const uint8_t> data)
{
    ByteReader r(data);
    Value v = decode(r);
    r.expect_done();
    return v;
}

namespace {

void
append_quoted(std::string& out, const std::string& s)
{
    out.push_back('"');
    for (char c : s)
    {
        switch (c)
        {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        default:
            out.push_back(c);
        }
    }
    out.push_back('"');
}

class TextParser {
  public:
    explicit TextParser(std::string_view text) : mText(text) {}

    Value parse()
    {
        Value v = value();
        skip_ws();
        if (mPos != mText.size())
            fail(Errc::parse_error, "trailing characters in value text");
        return v;
    }

  private:
    void skip_ws()
    {
        while (mPos < mText.size() && std::isspace(static_cast<unsigned char>(mText[mPos])))
            ++mPos;
    }

    char peek()
    {
        if (mPos >= mText.size())
            fail(Errc::parse_error, "unexpected end of value text");
        return mText[mPos];
    }

    void expect(char c)
    {
        if (peek() != c)
            fail(Errc::parse_error, std::string("expected '") + c + "' in value text");
        ++mPos;
    }

    Value value()
    {
        skip_ws();
        char c = peek();
        if (c == '[')
            return list();
        if (c == '{')
            return map();
        if (c == '"')
            return quoted();
        if (c == '@')
            return address();
        if (c == '0' && mPos + 1 < mText.size() && mText[mPos + 1] == 'x')
            return hex_bytes();
        if (std::isdigit(static_cast<unsigned char>(c)))
            return number();
        return word();
    }

    Value list()
    {
        expect('[');
        Value::List items;
        skip_ws();
        if (peek() == ']')
        {
            ++mPos;
            return Value(std::move(items));
        }
        while (true)
        {
            items.push_back(value());
            skip_ws();
            if (peek() == ',')
            {
                ++mPos;
                continue;
            }
            expect(']');
            return Value(std::move(items));
        }
    }

    Value map()
    {
        expect('{');
        Value::Map entries;
        skip_ws();
        if (peek() == '}')
        {
            ++mPos;
            return Value::map(std::move(entries));
        }
        while (true)
        {
            Value k = value();
            skip_ws();
            expect('=');
            Value v = value();
            entries.emplace_back(std::move(k), std::move(v));
            skip_ws();
            if (peek() == ',')
            {
                ++mPos;
                continue;
            }
            expect('}');
            return Value::map(std::move(entries));
        }
    }

    Value quoted()
    {
        expect('"');
        std::string s;
        while (true)
        {
            if (mPos >= mText.size())
                fail(Errc::parse_error, "unterminated string");
            char c = mText[mPos++];
            if (c == '"')
                break;
            if (c == '\\')
            {
                if (mPos >= mText.size())
                    fail(Errc::parse_error, "dangling escape");
                char e = mText[mPos++];
                if (e == 'n')
                    s.push_back('\n');
                else if (e == '"' || e == '\\')
                    s.push_back(e);
                else
                    fail(Errc::parse_error, "unknown escape");
                continue;
            }
            s.push_back(c);
        }
        return Value(std::move(s));
    }

    Value address()
    {
        expect('@');
        if (mPos + 1 < mText.size() && mText[mPos] == '0' && mText[mPos + 1] == 'x')
        {
            mPos += 2;
            std::string hex = take_while([](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
            Bytes raw = from_hex(hex);
            if (raw.size() != 20)
                fail(Errc::parse_error, "address hex must be 20 bytes");
            Address a;
            std::copy(raw.begin(), raw.end(), a.bytes.begin());
            return Value(a);
        }
        std::string name = take_while(
            [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'; });
        if (name.empty())
            fail(Errc::parse_error, "empty address name");
        return Value(Address::from_name(name));
    }

    Value hex_bytes()
    {
        mPos += 2;
        std::string hex = take_while([](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
        return Value(from_hex(hex));
    }

    Value number()
    {
        std::string digits = take_while([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
        U256 v = 0;
        for (char d : digits)
        {
            v *= 10;
            v += static_cast<unsigned>(d - '0');
        }
        return Value(v);
    }

    Value word()
    {
        std::string w = take_while([](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
        if (w == "true")
            return Value(true);
        if (w == "false")
            return Value(false);
        fail(Errc::parse_error, "unrecognized value token: " + w);
    }

    template <typename Pred>
    std::string take_while(Pred p)
    {
        size_t start = mPos;
        while (mPos < mText.size() && p(mText[mPos]))
            ++mPos;
        return std::string(mText.substr(start, mPos - start));
    }

    std::string_view mText;
    size_t mPos = 0;
};

} // namespace

std::string
Value::to_text() const
{
    std::string out;
    switch (kind())
    {
    case Kind::U256:
        out = std::get<U256>(mRep).str();
        break;
    case Kind::Address:
        out = std::get<Address>(mRep).to_text();
        break;
    case Kind::Bool:
        out = std::get<bool>(mRep) ? "true" : "false";
        break;
    case Kind::Bytes:
        out = "0x" + to_hex(std::get<Bytes>(mRep));
        break;
    case Kind::String:
        append_quoted(out, std::get<std::string>(mRep));
        break;
    case Kind::List:
    {
        out.push_back('[');
        const auto& l = std::get<List>(mRep);
        for (size_t i = 0; i < l.size(); ++i)
        {
            if (i)
                out.push_back(',');
            out += l[i].to_text();
        }
        out.push_back(']');
        break;
    }
    case Kind::Map:
    {
        out.push_back('{');
        const auto& m = std::get<Map>(mRep);
        for (size_t i = 0; i < m.size(); ++i)
        {
            if (i)
                out.push_back(',');
            out += m[i].first.to_text();
            out.push_back('=');
            out += m[i].second.to_text();
        }
        out.push_back('}');
        break;
    }
    }
    return out;
}

Value
Value::parse_text(std::string_view text)
{
    return TextParser(text).parse();
}

} // namespace lyquor
