#pragma once

#include <stdexcept>
#include <string>

namespace rtc {

/// A caller broke an operation's precondition (out-of-limit control, unknown
/// object id, malformed action).
class ContractError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// A scene violates its structural invariants or could not be generated.
class SceneError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed document. `line` is 0 when the error is structural rather than
/// syntactic; `field` names the offending path when known.
class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& message, std::size_t line, std::string field)
        : std::runtime_error(message), line_(line), field_(std::move(field))
    {
    }
    std::size_t line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

} // namespace rtc
