#include "rtc/errors.hpp"
#include "rtc/service.hpp"

namespace rtc::service {

std::optional<std::string> ConnectionHandler::Registry::acquire()
{
    int live = live_.load();
    do {
        if (live >= max_)
            return std::nullopt;
    } while (!live_.compare_exchange_weak(live, live + 1));
    return "s" + std::to_string(next_.fetch_add(1));
}

void ConnectionHandler::Registry::release() { live_.fetch_sub(1); }

ConnectionHandler::ConnectionHandler(std::shared_ptr<Registry> registry, EventSink sink)
    : registry_(std::move(registry)), sink_(std::move(sink))
{
}

ConnectionHandler::~ConnectionHandler()
{
    for (auto& [id, s] : sessions_)
        s->abort();
    sessions_.clear();
}

std::size_t ConnectionHandler::liveSessions() const
{
    std::size_t n = 0;
    for (const auto& [id, s] : sessions_)
        n += s->finished() ? 0 : 1;
    return n;
}

void ConnectionHandler::error(std::string code, std::string message, std::optional<std::string> session,
                              std::optional<std::string> ref)
{
    sink_(proto::Error{std::move(code), std::move(message), std::move(session), std::move(ref)});
}

Session* ConnectionHandler::find(const std::string& id)
{
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        error("unknown-session", "no session '" + id + "' on this connection", id);
        return nullptr;
    }
    return it->second.get();
}

// Finished sessions stay addressable until the next OpenSession so late
// operator messages get a clear "finished" reply.
void ConnectionHandler::reap()
{
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (it->second->finished()) {
            it->second->join();
            it = sessions_.erase(it);
        } else {
            ++it;
        }
    }
}

void ConnectionHandler::onText(std::string_view text)
{
    try {
        onMessage(proto::decodeClient(text));
    } catch (const proto::ProtocolError& e) {
        error(e.code(), e.what());
    }
}

void ConnectionHandler::onMessage(const proto::ClientMessage& m)
{
    if (const auto* hello = std::get_if<proto::Hello>(&m)) {
        if (hello->version != proto::kVersion) {
            error("version", "server speaks protocol version " + std::to_string(proto::kVersion));
            return;
        }
        greeted_ = true;
        sink_(proto::Hello{"rtc-server", proto::kVersion, registry_->maxSessions()});
        return;
    }
    if (!greeted_) {
        error("handshake", "send Hello first");
        return;
    }

    if (const auto* open = std::get_if<proto::OpenSession>(&m)) {
        reap();
        std::optional<Scene> scene;
        try {
            scene = parseScene(open->scene_document);
        } catch (const std::exception& e) {
            error("bad-scene", e.what(), std::nullopt, open->ref);
            return;
        }
        const std::optional<std::string> id = registry_->acquire();
        if (!id) {
            error("session-limit", "at most " + std::to_string(registry_->maxSessions()) + " live sessions",
                  std::nullopt, open->ref);
            return;
        }
        // The slot frees as the session's Closed event goes out.
        auto registry = registry_;
        EventSink sink = [registry, out = sink_](const proto::ServerMessage& msg) {
            if (std::holds_alternative<proto::Closed>(msg))
                registry->release();
            out(msg);
        };
        try {
            auto session = std::make_unique<Session>(
                Session::Params{*id, open->ref, std::move(*scene), open->mode, open->seed, open->budgets, open->script},
                std::move(sink));
            session->start();
            sessions_.emplace(*id, std::move(session));
        } catch (const std::exception& e) {
            registry_->release();
            error("bad-request", e.what(), std::nullopt, open->ref);
        }
        return;
    }

    auto route = [&](const std::string& id, OperatorInput in) {
        if (Session* s = find(id))
            if (auto why = s->input(std::move(in)))
                error("rejected-input", *why, id);
    };
    if (const auto* sel = std::get_if<proto::SelectObjectMsg>(&m))
        route(sel->session, SelectObject{sel->object});
    else if (const auto* pt = std::get_if<proto::SelectPointMsg>(&m))
        route(pt->session, SelectPoint{pt->point});
    else if (const auto* goal = std::get_if<proto::ReachGoalMsg>(&m))
        route(goal->session, ReachGoal{});
    else if (const auto* ab = std::get_if<proto::AbortSession>(&m)) {
        if (Session* s = find(ab->session)) {
            if (s->finished())
                error("rejected-input", "session has finished", ab->session);
            else
                s->abort();
        }
    }
}

} // namespace rtc::service
