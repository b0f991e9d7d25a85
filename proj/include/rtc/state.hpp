#pragma once

#include <vector>

#include "rtc/geometry.hpp"

namespace rtc {

/// Full system state: robot pose plus one pose per movable object. `objects`
/// is parallel to Scene::movables(), which is sorted by id.
struct SystemConfiguration
{
    Pose2 robot;
    std::vector<Pose2> objects;

    friend bool operator==(const SystemConfiguration&, const SystemConfiguration&) = default;
};

} // namespace rtc
