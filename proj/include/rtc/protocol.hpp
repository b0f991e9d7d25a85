#pragma once

// Session wire protocol. Every message is one JSON object carried as one
// WebSocket text message (the frame length delimits it), with a protocol
// version "v" and a "kind". Schema: docs/protocol.schema.json.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "rtc/benchmark.hpp"
#include "rtc/scene.hpp"
#include "rtc/strategies.hpp"

namespace rtc::proto {

inline constexpr int kVersion = 1;

/// Rejected message. `code` is one of the Error kinds' codes.
class ProtocolError : public std::runtime_error
{
public:
    ProtocolError(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code))
    {
    }
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

enum class SessionStatus
{
    AwaitingInput,
    Planning,
    Executing,
    Succeeded,
    Failed,
};

std::string_view sessionStatusName(SessionStatus s);
bool terminal(SessionStatus s);

// ------------------------------------------------------- client to server

struct Hello
{
    std::string agent;
    int version = kVersion;
    /// Sent by the server only.
    std::optional<int> max_sessions;
};

struct OpenSession
{
    /// Client token echoed in the session's first snapshot.
    std::string ref;
    std::string scene_document;
    SessionMode mode = SessionMode::HITL;
    std::uint64_t seed = 0;
    Budgets budgets;
    /// Required for Scripted sessions.
    std::optional<OperatorScript> script;
};

struct SelectObjectMsg
{
    std::string session;
    std::string object;
};

struct SelectPointMsg
{
    std::string session;
    Vec2 point;
};

struct ReachGoalMsg
{
    std::string session;
};

struct AbortSession
{
    std::string session;
};

using ClientMessage = std::variant<Hello, OpenSession, SelectObjectMsg, SelectPointMsg, ReachGoalMsg, AbortSession>;

// ------------------------------------------------------- server to client

struct StateSnapshot
{
    std::string session;
    std::uint64_t seq = 0;
    /// Present on the first snapshot of a session (seq 0).
    std::optional<std::string> ref;
    std::optional<std::string> scene_document;
    SystemConfiguration state;
    /// Movable ids in the order of `state.objects`.
    std::vector<std::string> object_ids;
};

struct StatusChanged
{
    std::string session;
    std::uint64_t seq = 0;
    SessionStatus status = SessionStatus::Planning;
    double idle_time = 0.0;
    std::string reason;
};

struct ActionOutcome
{
    std::string session;
    std::uint64_t seq = 0;
    std::size_t index = 0;
    ExecutedAction action;
};

struct Closed
{
    std::string session;
    std::uint64_t seq = 0;
    BenchmarkRecord record;
};

struct Error
{
    std::string code;
    std::string message;
    std::optional<std::string> session;
    std::optional<std::string> ref;
};

using ServerMessage = std::variant<Hello, StateSnapshot, StatusChanged, ActionOutcome, Closed, Error>;

std::string encode(const ClientMessage& m);
std::string encode(const ServerMessage& m);

/// Throw ProtocolError ("malformed", "version", "unknown-kind").
ClientMessage decodeClient(std::string_view text);
ServerMessage decodeServer(std::string_view text);

std::string_view kindOf(const ClientMessage& m);
std::string_view kindOf(const ServerMessage& m);

/// Session state from a snapshot, in the scene's movable order.
SystemConfiguration snapshotState(const StateSnapshot& s, const Scene& scene);

} // namespace rtc::proto
