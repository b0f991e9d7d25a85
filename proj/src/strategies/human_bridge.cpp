#include <cmath>

#include "rtc/strategies.hpp"

namespace rtc {

void OperatorInbox::push(OperatorInput in)
{
    {
        std::lock_guard lock(mu_);
        if (closed_)
            return;
        items_.push_back(std::move(in));
    }
    cv_.notify_one();
}

void OperatorInbox::close()
{
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool OperatorInbox::closed() const
{
    std::lock_guard lock(mu_);
    return closed_;
}

std::optional<OperatorInput> OperatorInbox::pop(std::optional<std::chrono::steady_clock::time_point> deadline)
{
    std::unique_lock lock(mu_);
    auto ready = [this] { return closed_ || !items_.empty(); };
    if (deadline) {
        if (!cv_.wait_until(lock, *deadline, ready))
            return std::nullopt;
    } else {
        cv_.wait(lock, ready);
    }
    if (items_.empty())
        return std::nullopt;
    OperatorInput in = std::move(items_.front());
    items_.pop_front();
    return in;
}

std::optional<HighLevelAction> HumanBridgeStrategy::next(const SystemConfiguration&, const StrategyContext& ctx)
{
    const Scene& scene = ctx.scene;
    auto reject = [this](const std::string& why) {
        if (hooks_.rejected)
            hooks_.rejected(why);
    };
    if (hooks_.awaiting)
        hooks_.awaiting(true);

    std::optional<std::string> selected;
    std::optional<HighLevelAction> result;
    for (;;) {
        const std::optional<OperatorInput> in = inbox_->pop(ctx.deadline);
        if (!in)
            break;
        if (std::holds_alternative<ReachGoal>(*in)) {
            result = goalAction(scene);
            break;
        }
        if (const auto* sel = std::get_if<SelectObject>(&*in)) {
            if (!scene.movableIndex(sel->object)) {
                reject("unknown object '" + sel->object + "'");
                continue;
            }
            if (sel->object == scene.goalObject().id) {
                result = goalAction(scene);
                break;
            }
            selected = sel->object;
            continue;
        }
        const Vec2 p = std::get<SelectPoint>(*in).point;
        if (!selected) {
            reject("point selected before an object");
            continue;
        }
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            reject("point must be finite");
            continue;
        }
        result = HighLevelAction{*selected, p};
        break;
    }
    if (hooks_.awaiting)
        hooks_.awaiting(false);
    return result;
}

} // namespace rtc
