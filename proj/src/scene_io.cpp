#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "json_reader.hpp"
#include "rtc/errors.hpp"
#include "rtc/scene.hpp"

namespace rtc {

using nlohmann::json;

using detail::Reader;

namespace {

constexpr int kSceneFormatVersion = 1;

json num(double v) { return roundSignificant9(v); }

json rectToJson(const Rect& r)
{
    return {{"x_min", num(r.x_min)}, {"y_min", num(r.y_min)}, {"x_max", num(r.x_max)}, {"y_max", num(r.y_max)}};
}

json shapeToJson(const ConvexShape& s)
{
    if (s.isDisk())
        return {{"type", "disk"}, {"radius", num(s.disk().radius)}};
    return {{"type", "box"}, {"half_extent_x", num(s.box().half_extent_x)},
            {"half_extent_y", num(s.box().half_extent_y)}};
}

Rect readRect(const Reader& r)
{
    Rect rect{r.at("x_min").number(), r.at("y_min").number(), r.at("x_max").number(), r.at("y_max").number()};
    if (!(rect.x_max > rect.x_min) || !(rect.y_max > rect.y_min))
        r.fail("rectangle is empty");
    return rect;
}

ConvexShape readShape(const Reader& r)
{
    const std::string type = r.at("type").string();
    if (type == "disk")
        return Disk{r.at("radius").positive()};
    if (type == "box")
        return Box{r.at("half_extent_x").positive(), r.at("half_extent_y").positive()};
    r.at("type").fail("unknown shape type '" + type + "' (expected disk or box)");
}

Role readRole(const Reader& r)
{
    const std::string s = r.string();
    for (Role role : {Role::Robot, Role::Movable, Role::GoalObject, Role::Static})
        if (roleName(role) == s)
            return role;
    r.fail("unknown role '" + s + "' (expected robot, movable, goal or static)");
}

Pose2 readPose(const Reader& r)
{
    if (r.size() != 3)
        r.fail("pose must be [x, y, theta]");
    return Pose2(r[0].number(), r[1].number(), r[2].number());
}

} // namespace

std::string serializeScene(const Scene& s)
{
    json bodies = json::array();
    for (const BodySpec& b : s.bodies()) {
        bodies.push_back({{"id", b.id},
                          {"role", roleName(b.role)},
                          {"shape", shapeToJson(b.shape)},
                          {"pose", {num(b.initial_pose.x), num(b.initial_pose.y), num(b.initial_pose.theta)}}});
    }
    const PhysicsParams& p = s.physics();
    json doc = {
        {"version", kSceneFormatVersion},
        {"seed", s.seed()},
        {"workspace", rectToJson(s.workspace())},
        {"gripper_pocket", rectToJson(s.gripperPocket())},
        {"region_diameter", num(s.regionDiameter())},
        {"physics",
         {{"dt", num(p.dt)},
          {"tol_pen", num(p.tol_pen)},
          {"kappa", num(p.kappa)},
          {"v_max", num(p.v_max)},
          {"omega_max", num(p.omega_max)},
          {"d_max", num(p.d_max)},
          {"max_projection_iterations", p.max_projection_iterations}}},
        {"bodies", bodies},
    };
    return doc.dump(2) + "\n";
}

Scene parseScene(std::string_view text)
{
    const json doc = detail::parseJson(text, "scene document");
    const Reader root(doc, "", "scene document");
    const std::uint64_t version = root.at("version").unsignedInt();
    if (version != kSceneFormatVersion)
        root.at("version").fail("unsupported version " + std::to_string(version));

    PhysicsParams phys;
    const Reader pr = root.at("physics");
    phys.dt = pr.at("dt").positive();
    phys.tol_pen = pr.at("tol_pen").positive();
    phys.kappa = pr.at("kappa").number();
    phys.v_max = pr.at("v_max").positive();
    phys.omega_max = pr.at("omega_max").positive();
    phys.d_max = pr.at("d_max").positive();
    if (pr.has("max_projection_iterations"))
        phys.max_projection_iterations = static_cast<int>(pr.at("max_projection_iterations").unsignedInt());

    const Reader br = root.at("bodies");
    std::vector<BodySpec> bodies;
    int robots = 0, goals = 0;
    for (std::size_t i = 0; i < br.size(); ++i) {
        const Reader b = br[i];
        BodySpec spec{b.at("id").string(), readShape(b.at("shape")), readRole(b.at("role")), readPose(b.at("pose"))};
        robots += spec.role == Role::Robot;
        goals += spec.role == Role::GoalObject;
        bodies.push_back(std::move(spec));
    }
    if (robots != 1)
        br.fail("document must contain exactly one body with role 'robot' (found " + std::to_string(robots) + ")");
    if (goals != 1)
        br.fail("document must contain exactly one body with role 'goal' (found " + std::to_string(goals) + ")");

    try {
        return Scene(std::move(bodies), readRect(root.at("workspace")), readRect(root.at("gripper_pocket")),
                     root.at("region_diameter").positive(), phys, root.at("seed").unsignedInt());
    } catch (const SceneError& e) {
        throw ParseError(std::string("scene document: ") + e.what(), 0, "");
    }
}

Scene loadSceneFile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scene file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parseScene(ss.str());
}

void saveSceneFile(const Scene& s, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write scene file '" + path + "'");
    out << serializeScene(s);
}

} // namespace rtc
