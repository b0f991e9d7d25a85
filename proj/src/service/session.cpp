#include <utility>

#include "rtc/errors.hpp"
#include "rtc/service.hpp"

namespace rtc::service {

using proto::SessionStatus;
using Clock = std::chrono::steady_clock;

Session::Session(Params params, EventSink sink)
    : p_(std::move(params)), sink_(std::move(sink)), inbox_(std::make_shared<OperatorInbox>())
{
    validateBudgets(p_.budgets);
    if (p_.mode == SessionMode::Scripted) {
        if (!p_.script)
            throw ContractError("Scripted session needs a script");
        validateScript(*p_.script, p_.scene);
    }
}

Session::~Session()
{
    abort();
    join();
}

void Session::start()
{
    if (thread_.joinable())
        throw ContractError("session already started");
    thread_ = std::thread([this] { run(); });
}

std::optional<std::string> Session::input(OperatorInput in)
{
    if (p_.mode != SessionMode::HITL)
        return "session mode " + std::string(sessionModeName(p_.mode)) + " takes no operator input";
    if (finished_ || inbox_->closed())
        return "session has finished";
    inbox_->push(std::move(in));
    return std::nullopt;
}

void Session::abort()
{
    cancel_.store(true);
    inbox_->close();
}

void Session::join()
{
    if (thread_.joinable() && thread_.get_id() != std::this_thread::get_id())
        thread_.join();
}

SessionStatus Session::status() const
{
    std::lock_guard lock(mu_);
    return status_;
}

double Session::idleTime() const
{
    std::lock_guard lock(mu_);
    double idle = idle_;
    if (waiting_since_)
        idle += std::chrono::duration<double>(Clock::now() - *waiting_since_).count();
    return idle;
}

void Session::setStatus(SessionStatus s, std::string reason)
{
    double idle = 0.0;
    {
        std::lock_guard lock(mu_);
        if (s == status_ && reason.empty())
            return;
        status_ = s;
        idle = idle_;
    }
    sink_(proto::StatusChanged{p_.id, nextSeq(), s, idle, std::move(reason)});
}

void Session::snapshot(const SystemConfiguration& q, bool first)
{
    proto::StateSnapshot m;
    m.session = p_.id;
    m.seq = nextSeq();
    if (first) {
        m.ref = p_.ref;
        m.scene_document = serializeScene(p_.scene);
    }
    m.state = q;
    for (const BodySpec& b : p_.scene.movables())
        m.object_ids.push_back(b.id);
    sink_(m);
}

void Session::run()
{
    std::string reason;
    try {
        snapshot(p_.scene.initialConfiguration(), true);
        setStatus(SessionStatus::Planning, "started");

        PlannerConfig config = plannerFor(p_.mode, p_.seed);
        config.cancel = &cancel_;

        std::unique_ptr<HighLevelStrategy> strategy;
        if (p_.mode == SessionMode::HITL) {
            HumanBridgeStrategy::Hooks bridge;
            bridge.awaiting = [this](bool waiting) {
                {
                    std::lock_guard lock(mu_);
                    if (waiting) {
                        waiting_since_ = Clock::now();
                    } else if (waiting_since_) {
                        idle_ += std::chrono::duration<double>(Clock::now() - *waiting_since_).count();
                        waiting_since_.reset();
                    }
                }
                if (!cancel_.load())
                    setStatus(waiting ? SessionStatus::AwaitingInput : SessionStatus::Planning);
            };
            bridge.rejected = [this](const std::string& why) {
                sink_(proto::Error{"rejected-input", why, p_.id, std::nullopt});
            };
            strategy = std::make_unique<HumanBridgeStrategy>(inbox_, std::move(bridge));
        } else {
            strategy = makeStrategy(p_.mode, p_.seed, p_.budgets, p_.script, &cancel_);
        }

        GrtcHooks hooks;
        hooks.planning = [this](const HighLevelAction&) { setStatus(SessionStatus::Planning); };
        hooks.executed = [this](const ExecutedAction& e, const SystemConfiguration& q) {
            if (e.success)
                setStatus(SessionStatus::Executing);
            sink_(proto::ActionOutcome{p_.id, nextSeq(), action_index_++, e});
            if (e.success)
                snapshot(q, false);
        };

        const GrtcOutcome out = runGRTC(p_.scene, *strategy, p_.budgets, config, hooks);
        record_ = makeRecord(p_.ref, p_.mode, p_.seed, out);
        reason = std::string(grtcStatusName(out.status));
    } catch (const std::exception& e) {
        record_ = BenchmarkRecord{};
        record_.scene_id = p_.ref;
        record_.mode = p_.mode;
        record_.seed = p_.seed;
        record_.status = "Crashed";
        record_.controls_digest = controlsDigest({});
        record_.diagnostic = e.what();
        reason = "Crashed: " + std::string(e.what());
    }
    record_.idle_time = idleTime();
    {
        std::lock_guard lock(mu_);
        idle_ = record_.idle_time;
        waiting_since_.reset();
    }
    inbox_->close();
    setStatus(record_.success ? SessionStatus::Succeeded : SessionStatus::Failed, reason);
    finished_.store(true);
    sink_(proto::Closed{p_.id, nextSeq(), record_});
}

} // namespace rtc::service
