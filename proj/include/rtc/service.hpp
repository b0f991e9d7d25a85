#pragma once

// Live planning sessions behind a WebSocket endpoint. One connection can
// drive many sessions; each session runs its own guided loop on a thread and
// streams events back to the connection that opened it.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "rtc/protocol.hpp"

namespace rtc::service {

inline constexpr int kDefaultMaxSessions = 8;

using EventSink = std::function<void(const proto::ServerMessage&)>;

/// One guided loop. Events go to `sink` from the session thread, in order,
/// each with the next per-session sequence number.
class Session
{
public:
    struct Params
    {
        std::string id;
        /// Client token; doubles as the scene id of the record.
        std::string ref;
        Scene scene;
        SessionMode mode = SessionMode::HITL;
        std::uint64_t seed = 0;
        Budgets budgets;
        std::optional<OperatorScript> script;
    };

    /// Throws ContractError for a Scripted session without a valid script.
    Session(Params params, EventSink sink);
    /// Aborts a running loop and joins it.
    ~Session();
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    void start();
    /// Queues operator input. Returns an error text instead when the session
    /// does not take operator input.
    std::optional<std::string> input(OperatorInput in);
    /// The operator is done: queued input is still used, after which the
    /// session ends as exhausted.
    void endInput() { inbox_->close(); }
    void abort();
    void join();

    const std::string& id() const { return p_.id; }
    bool finished() const { return finished_.load(); }
    proto::SessionStatus status() const;
    double idleTime() const;
    /// Valid once finished.
    const BenchmarkRecord& record() const { return record_; }

private:
    void run();
    void setStatus(proto::SessionStatus s, std::string reason = {});
    void snapshot(const SystemConfiguration& q, bool first);
    std::uint64_t nextSeq() { return seq_++; }

    Params p_;
    EventSink sink_;
    std::shared_ptr<OperatorInbox> inbox_;
    std::atomic<bool> cancel_{false};
    std::atomic<bool> finished_{false};
    std::thread thread_;

    mutable std::mutex mu_;
    proto::SessionStatus status_ = proto::SessionStatus::Planning;
    double idle_ = 0.0;
    std::optional<std::chrono::steady_clock::time_point> waiting_since_;

    std::uint64_t seq_ = 0; // session thread only
    std::size_t action_index_ = 0;
    BenchmarkRecord record_;
};

/// Protocol state of one client connection: handshake, the sessions it
/// opened, routing of operator messages. Transport independent.
class ConnectionHandler
{
public:
    class Registry;

    ConnectionHandler(std::shared_ptr<Registry> registry, EventSink sink);
    /// Aborts and joins this connection's sessions.
    ~ConnectionHandler();

    /// Handles one incoming text message. Replies and events go to the sink.
    void onText(std::string_view text);
    void onMessage(const proto::ClientMessage& m);

    std::size_t liveSessions() const;

private:
    void error(std::string code, std::string message, std::optional<std::string> session = {},
               std::optional<std::string> ref = {});
    Session* find(const std::string& id);
    void reap();

    std::shared_ptr<Registry> registry_;
    EventSink sink_;
    bool greeted_ = false;
    std::map<std::string, std::unique_ptr<Session>> sessions_;
};

/// Session ids and the live-session cap shared by all connections.
class ConnectionHandler::Registry
{
public:
    explicit Registry(int max_sessions = kDefaultMaxSessions) : max_(max_sessions) {}
    int maxSessions() const { return max_; }
    /// Reserves a slot; nullopt when the cap is reached.
    std::optional<std::string> acquire();
    void release();
    int live() const { return live_.load(); }

private:
    int max_;
    std::atomic<int> live_{0};
    std::atomic<std::uint64_t> next_{1};
};

struct ServerConfig
{
    std::string address = "127.0.0.1";
    unsigned short port = 0; ///< 0 picks a free port
    int max_sessions = kDefaultMaxSessions;
};

/// WebSocket endpoint serving ConnectionHandlers on a background I/O thread.
class Server
{
public:
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts accepting. Returns the bound port.
    unsigned short start();
    void stop();
    /// Blocks until stop() (for the CLI).
    void wait();
    unsigned short port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Blocking WebSocket client: messages are received on a background thread
/// and queued.
class Client
{
public:
    Client();
    ~Client();
    Client(const Client&) = delete;
    Client& operator=(const Client&) = delete;

    /// Connects and exchanges Hello. Returns the server's Hello.
    proto::Hello connect(const std::string& host, unsigned short port, const std::string& agent = "rtc-client");
    void send(const proto::ClientMessage& m);
    /// Sends raw text (for malformed-input tests).
    void sendText(const std::string& text);
    /// Next message, or nullopt on timeout or after the connection closed.
    std::optional<proto::ServerMessage> receive(std::chrono::milliseconds timeout);
    /// Raw text of every message received so far.
    std::vector<std::string> transcript() const;
    bool connected() const;
    void close();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace rtc::service
