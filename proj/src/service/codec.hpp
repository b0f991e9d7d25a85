#pragma once

// JSON pieces shared by the protocol, the benchmark config and the records.

#include <nlohmann/json.hpp>

#include "../json_reader.hpp"
#include "rtc/grtc.hpp"

namespace rtc::detail {

inline nlohmann::json budgetsToJson(const Budgets& b)
{
    return {{"t_overall", b.t_overall},
            {"t_pushing", b.t_pushing},
            {"overall_iterations", b.overall_iterations},
            {"pushing_iterations", b.pushing_iterations},
            {"max_actions", b.max_actions}};
}

/// Missing fields keep their defaults.
inline Budgets budgetsFromJson(const Reader& r)
{
    Budgets b;
    if (r.has("t_overall"))
        b.t_overall = r.at("t_overall").positive();
    if (r.has("t_pushing"))
        b.t_pushing = r.at("t_pushing").positive();
    if (r.has("overall_iterations"))
        b.overall_iterations = r.at("overall_iterations").unsignedInt();
    if (r.has("pushing_iterations"))
        b.pushing_iterations = r.at("pushing_iterations").unsignedInt();
    if (r.has("max_actions"))
        b.max_actions = r.at("max_actions").unsignedInt();
    try {
        validateBudgets(b);
    } catch (const ContractError& e) {
        r.fail(e.what());
    }
    return b;
}

inline nlohmann::json poseToJson(const Pose2& p) { return nlohmann::json::array({p.x, p.y, p.theta}); }

inline Pose2 poseFromJson(const Reader& r)
{
    if (r.size() != 3)
        r.fail("pose must be [x, y, theta]");
    Pose2 p;
    p.x = r[0].number();
    p.y = r[1].number();
    p.theta = r[2].number();
    return p;
}

inline Vec2 pointFromJson(const Reader& r)
{
    if (r.size() != 2)
        r.fail("point must be [x, y]");
    return {r[0].number(), r[1].number()};
}

} // namespace rtc::detail
