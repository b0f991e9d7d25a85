#include "rtc/protocol.hpp"

#include <algorithm>

#include "codec.hpp"
#include "rtc/errors.hpp"
#include "rtc/formats.hpp"

namespace rtc::proto {

using detail::Reader;
using nlohmann::json;

namespace {

constexpr std::pair<SessionStatus, std::string_view> kStatusNames[] = {
    {SessionStatus::AwaitingInput, "AwaitingInput"}, {SessionStatus::Planning, "Planning"},
    {SessionStatus::Executing, "Executing"},         {SessionStatus::Succeeded, "Succeeded"},
    {SessionStatus::Failed, "Failed"},
};

SessionStatus parseStatus(const Reader& r)
{
    const std::string name = r.string();
    for (const auto& [s, n] : kStatusNames)
        if (n == name)
            return s;
    r.fail("unknown status '" + name + "'");
}

PlanStatus parsePlanStatus(const Reader& r)
{
    const std::string name = r.string();
    for (PlanStatus s : {PlanStatus::Solved, PlanStatus::TimedOut, PlanStatus::Infeasible})
        if (planStatusName(s) == name)
            return s;
    r.fail("unknown plan status '" + name + "'");
}

json header(std::string_view kind) { return {{"v", kVersion}, {"kind", kind}}; }

json scriptToJson(const OperatorScript& s) { return json::parse(serializeScript(s)); }

// ---------------------------------------------------------------- encoders

struct ClientEncoder
{
    json operator()(const Hello& m) const
    {
        json j = header("Hello");
        j["agent"] = m.agent;
        j["version"] = m.version;
        if (m.max_sessions)
            j["max_sessions"] = *m.max_sessions;
        return j;
    }
    json operator()(const OpenSession& m) const
    {
        json j = header("OpenSession");
        j["ref"] = m.ref;
        j["scene"] = detail::parseJson(m.scene_document, "scene document");
        j["mode"] = sessionModeName(m.mode);
        j["seed"] = m.seed;
        j["budgets"] = detail::budgetsToJson(m.budgets);
        if (m.script)
            j["script"] = scriptToJson(*m.script);
        return j;
    }
    json operator()(const SelectObjectMsg& m) const
    {
        json j = header("SelectObject");
        j["session"] = m.session;
        j["object"] = m.object;
        return j;
    }
    json operator()(const SelectPointMsg& m) const
    {
        json j = header("SelectPoint");
        j["session"] = m.session;
        j["point"] = {m.point.x, m.point.y};
        return j;
    }
    json operator()(const ReachGoalMsg& m) const
    {
        json j = header("ReachGoal");
        j["session"] = m.session;
        return j;
    }
    json operator()(const AbortSession& m) const
    {
        json j = header("AbortSession");
        j["session"] = m.session;
        return j;
    }
};

struct ServerEncoder
{
    json operator()(const Hello& m) const { return ClientEncoder{}(m); }
    json operator()(const StateSnapshot& m) const
    {
        json j = header("StateSnapshot");
        j["session"] = m.session;
        j["seq"] = m.seq;
        if (m.ref)
            j["ref"] = *m.ref;
        if (m.scene_document)
            j["scene"] = json::parse(*m.scene_document);
        j["robot"] = detail::poseToJson(m.state.robot);
        json objects = json::object();
        for (std::size_t i = 0; i < m.object_ids.size(); ++i)
            objects[m.object_ids[i]] = detail::poseToJson(m.state.objects.at(i));
        j["objects"] = objects;
        return j;
    }
    json operator()(const StatusChanged& m) const
    {
        json j = header("StatusChanged");
        j["session"] = m.session;
        j["seq"] = m.seq;
        j["status"] = sessionStatusName(m.status);
        j["idle_time"] = m.idle_time;
        j["reason"] = m.reason;
        return j;
    }
    json operator()(const ActionOutcome& m) const
    {
        json j = header("ActionOutcome");
        j["session"] = m.session;
        j["seq"] = m.seq;
        j["index"] = m.index;
        const ExecutedAction& e = m.action;
        j["object"] = e.action.object;
        j["centroid"] = e.action.centroid ? json::array({e.action.centroid->x, e.action.centroid->y}) : json(nullptr);
        j["success"] = e.success;
        j["plan_time"] = e.plan_time;
        j["guidance_time"] = e.guidance_time;
        j["approach"] = planStatusName(e.approach_status);
        j["push"] = e.push_status ? json(planStatusName(*e.push_status)) : json(nullptr);
        return j;
    }
    json operator()(const Closed& m) const
    {
        json j = header("Closed");
        j["session"] = m.session;
        j["seq"] = m.seq;
        j["record"] = recordToJson(m.record);
        return j;
    }
    json operator()(const Error& m) const
    {
        json j = header("Error");
        j["code"] = m.code;
        j["message"] = m.message;
        if (m.session)
            j["session"] = *m.session;
        if (m.ref)
            j["ref"] = *m.ref;
        return j;
    }
};

// ---------------------------------------------------------------- decoders

std::pair<json, std::string> open(std::string_view text)
{
    json doc;
    try {
        doc = detail::parseJson(text, "message");
    } catch (const ParseError& e) {
        throw ProtocolError("malformed", e.what());
    }
    if (!doc.is_object())
        throw ProtocolError("malformed", "message must be a JSON object");
    const auto v = doc.find("v");
    if (v == doc.end() || !v->is_number_unsigned())
        throw ProtocolError("malformed", "message lacks protocol version 'v'");
    if (v->get<std::uint64_t>() != static_cast<std::uint64_t>(kVersion))
        throw ProtocolError("version", "unsupported protocol version " + v->dump());
    const auto kind = doc.find("kind");
    if (kind == doc.end() || !kind->is_string())
        throw ProtocolError("malformed", "message lacks 'kind'");
    std::string k = kind->get<std::string>();
    return {std::move(doc), std::move(k)};
}

// Field errors surface as "malformed" with the offending path.
template <typename F>
auto guarded(F&& f)
{
    try {
        return f();
    } catch (const ParseError& e) {
        throw ProtocolError("malformed", e.what());
    } catch (const SceneError& e) {
        throw ProtocolError("malformed", e.what());
    } catch (const ContractError& e) {
        throw ProtocolError("malformed", e.what());
    }
}

Hello decodeHello(const Reader& r)
{
    Hello h;
    h.agent = r.at("agent").string();
    h.version = static_cast<int>(r.at("version").unsignedInt());
    if (r.has("max_sessions"))
        h.max_sessions = static_cast<int>(r.at("max_sessions").unsignedInt());
    return h;
}

} // namespace

std::string_view sessionStatusName(SessionStatus s)
{
    for (const auto& [st, n] : kStatusNames)
        if (st == s)
            return n;
    return "Unknown";
}

bool terminal(SessionStatus s) { return s == SessionStatus::Succeeded || s == SessionStatus::Failed; }

std::string encode(const ClientMessage& m) { return std::visit(ClientEncoder{}, m).dump(); }
std::string encode(const ServerMessage& m) { return std::visit(ServerEncoder{}, m).dump(); }

std::string_view kindOf(const ClientMessage& m)
{
    static constexpr std::string_view names[] = {"Hello",     "OpenSession", "SelectObject",
                                                 "SelectPoint", "ReachGoal",   "AbortSession"};
    return names[m.index()];
}

std::string_view kindOf(const ServerMessage& m)
{
    static constexpr std::string_view names[] = {"Hello",         "StateSnapshot", "StatusChanged",
                                                 "ActionOutcome", "Closed",        "Error"};
    return names[m.index()];
}

ClientMessage decodeClient(std::string_view text)
{
    auto [doc, kind] = open(text);
    const Reader r(doc, "", "message");
    return guarded([&]() -> ClientMessage {
        if (kind == "Hello")
            return decodeHello(r);
        if (kind == "OpenSession") {
            OpenSession m;
            m.ref = r.at("ref").string();
            const Reader scene = r.at("scene");
            if (!scene.raw().is_object())
                scene.fail("expected a scene document object");
            m.scene_document = scene.raw().dump();
            try {
                m.mode = parseSessionMode(r.at("mode").string());
            } catch (const ContractError& e) {
                r.at("mode").fail(e.what());
            }
            m.seed = r.at("seed").unsignedInt();
            if (r.has("budgets"))
                m.budgets = detail::budgetsFromJson(r.at("budgets"));
            if (r.has("script") && !r.at("script").isNull())
                m.script = parseScript(r.at("script").raw().dump());
            return m;
        }
        if (kind == "SelectObject")
            return SelectObjectMsg{r.at("session").string(), r.at("object").string()};
        if (kind == "SelectPoint")
            return SelectPointMsg{r.at("session").string(), detail::pointFromJson(r.at("point"))};
        if (kind == "ReachGoal")
            return ReachGoalMsg{r.at("session").string()};
        if (kind == "AbortSession")
            return AbortSession{r.at("session").string()};
        throw ProtocolError("unknown-kind", "unknown client message kind '" + kind + "'");
    });
}

ServerMessage decodeServer(std::string_view text)
{
    auto [doc, kind] = open(text);
    const Reader r(doc, "", "message");
    return guarded([&]() -> ServerMessage {
        if (kind == "Hello")
            return decodeHello(r);
        if (kind == "StateSnapshot") {
            StateSnapshot m;
            m.session = r.at("session").string();
            m.seq = r.at("seq").unsignedInt();
            if (r.has("ref"))
                m.ref = r.at("ref").string();
            if (r.has("scene"))
                m.scene_document = r.at("scene").raw().dump();
            m.state.robot = detail::poseFromJson(r.at("robot"));
            const Reader objects = r.at("objects");
            if (!objects.raw().is_object())
                objects.fail("expected an object keyed by id");
            for (const auto& [id, pose] : objects.raw().items()) {
                m.object_ids.push_back(id);
                m.state.objects.push_back(detail::poseFromJson(objects.at(id)));
            }
            return m;
        }
        if (kind == "StatusChanged") {
            StatusChanged m;
            m.session = r.at("session").string();
            m.seq = r.at("seq").unsignedInt();
            m.status = parseStatus(r.at("status"));
            m.idle_time = r.at("idle_time").number();
            m.reason = r.at("reason").string();
            return m;
        }
        if (kind == "ActionOutcome") {
            ActionOutcome m;
            m.session = r.at("session").string();
            m.seq = r.at("seq").unsignedInt();
            m.index = r.at("index").unsignedInt();
            m.action.action.object = r.at("object").string();
            if (!r.at("centroid").isNull())
                m.action.action.centroid = detail::pointFromJson(r.at("centroid"));
            m.action.success = r.at("success").boolean();
            m.action.plan_time = r.at("plan_time").number();
            m.action.guidance_time = r.at("guidance_time").number();
            m.action.approach_status = parsePlanStatus(r.at("approach"));
            if (!r.at("push").isNull())
                m.action.push_status = parsePlanStatus(r.at("push"));
            return m;
        }
        if (kind == "Closed") {
            Closed m;
            m.session = r.at("session").string();
            m.seq = r.at("seq").unsignedInt();
            m.record = recordFromJson(r.at("record").raw());
            return m;
        }
        if (kind == "Error") {
            Error m;
            m.code = r.at("code").string();
            m.message = r.at("message").string();
            if (r.has("session"))
                m.session = r.at("session").string();
            if (r.has("ref"))
                m.ref = r.at("ref").string();
            return m;
        }
        throw ProtocolError("unknown-kind", "unknown server message kind '" + kind + "'");
    });
}

SystemConfiguration snapshotState(const StateSnapshot& s, const Scene& scene)
{
    SystemConfiguration q;
    q.robot = s.state.robot;
    const auto movables = scene.movables();
    q.objects.resize(movables.size());
    std::vector<char> seen(movables.size(), 0);
    for (std::size_t k = 0; k < s.object_ids.size(); ++k) {
        const auto i = scene.movableIndex(s.object_ids[k]);
        if (!i)
            throw ProtocolError("malformed", "snapshot names unknown object '" + s.object_ids[k] + "'");
        q.objects[*i] = s.state.objects[k];
        seen[*i] = 1;
    }
    if (std::count(seen.begin(), seen.end(), 0) != 0)
        throw ProtocolError("malformed", "snapshot misses objects");
    return q;
}

} // namespace rtc::proto
