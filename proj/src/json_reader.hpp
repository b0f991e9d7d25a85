#pragma once

// JSON field access with path diagnostics, shared by the document parsers.

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rtc/errors.hpp"

namespace rtc::detail {

inline std::size_t lineOfByte(std::string_view text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

/// Throws ParseError carrying the line of a syntax error.
inline nlohmann::json parseJson(std::string_view text, const std::string& doc)
{
    try {
        return nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t line = lineOfByte(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(doc + ": syntax error at line " + std::to_string(line) + ": " + e.what(), line, "");
    }
}

class Reader
{
public:
    Reader(const nlohmann::json& j, std::string path, std::string doc)
        : j_(j), path_(std::move(path)), doc_(std::move(doc))
    {
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(doc_ + ": field '" + path_ + "': " + what, 0, path_);
    }

    Reader at(const std::string& key) const
    {
        if (!j_.is_object())
            fail("expected an object");
        auto it = j_.find(key);
        const std::string sub = path_.empty() ? key : path_ + "." + key;
        if (it == j_.end())
            throw ParseError(doc_ + ": missing field '" + sub + "'", 0, sub);
        return Reader(*it, sub, doc_);
    }
    bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
    bool isNull() const { return j_.is_null(); }
    const nlohmann::json& raw() const { return j_; }

    double number() const
    {
        if (!j_.is_number())
            fail("expected a number");
        const double v = j_.get<double>();
        if (!std::isfinite(v))
            fail("number is not finite");
        return v;
    }
    double positive() const
    {
        const double v = number();
        if (!(v > 0.0))
            fail("must be positive");
        return v;
    }
    std::string string() const
    {
        if (!j_.is_string())
            fail("expected a string");
        return j_.get<std::string>();
    }
    bool boolean() const
    {
        if (!j_.is_boolean())
            fail("expected a boolean");
        return j_.get<bool>();
    }
    std::uint64_t unsignedInt() const
    {
        if (!j_.is_number_unsigned())
            fail("expected a non-negative integer");
        return j_.get<std::uint64_t>();
    }
    std::size_t size() const
    {
        if (!j_.is_array())
            fail("expected an array");
        return j_.size();
    }
    Reader operator[](std::size_t i) const { return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]", doc_); }

    void expectVersion(int version) const
    {
        const std::uint64_t v = at("version").unsignedInt();
        if (v != static_cast<std::uint64_t>(version))
            at("version").fail("unsupported version " + std::to_string(v));
    }

private:
    const nlohmann::json& j_;
    std::string path_;
    std::string doc_;
};

} // namespace rtc::detail
