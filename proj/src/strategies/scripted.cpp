#include "rtc/errors.hpp"
#include "rtc/strategies.hpp"

namespace rtc {

void validateScript(const OperatorScript& s, const Scene& scene)
{
    if (s.entries.empty())
        throw ContractError("operator script is empty");
    for (const HighLevelAction& a : s.entries)
        validateAction(a, scene);
    if (!isGoalAction(s.entries.back(), scene))
        throw ContractError("operator script must end with the goal-object action");
}

ScriptedStrategy::ScriptedStrategy(OperatorScript script) : script_(std::move(script))
{
    if (script_.entries.empty())
        throw ContractError("operator script is empty");
}

std::optional<HighLevelAction> ScriptedStrategy::next(const SystemConfiguration&, const StrategyContext&)
{
    ++calls_;
    if (cursor_ + 1 < script_.entries.size())
        return script_.entries[cursor_++];
    cursor_ = script_.entries.size() - 1;
    return script_.entries.back();
}

} // namespace rtc
