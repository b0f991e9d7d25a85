#include "rtc/formats.hpp"

#include <fstream>
#include <sstream>

#include "json_reader.hpp"

namespace rtc {

using detail::Reader;
using nlohmann::json;

std::string serializeControls(const std::vector<Control>& controls)
{
    json list = json::array();
    for (const Control& u : controls)
        list.push_back({u.vx, u.vy, u.omega, u.duration});
    return json{{"version", kControlsFormatVersion}, {"controls", list}}.dump(1) + "\n";
}

std::vector<Control> parseControls(std::string_view text)
{
    const json doc = detail::parseJson(text, "controls document");
    const Reader root(doc, "", "controls document");
    root.expectVersion(kControlsFormatVersion);
    const Reader list = root.at("controls");
    std::vector<Control> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const Reader c = list[i];
        if (c.size() != 4)
            c.fail("control must be [vx, vy, omega, duration]");
        out.push_back({c[0].number(), c[1].number(), c[2].number(), c[3].number()});
    }
    return out;
}

std::string serializeScript(const OperatorScript& script)
{
    json list = json::array();
    for (const HighLevelAction& a : script.entries) {
        json e{{"object", a.object}};
        if (a.centroid)
            e["centroid"] = {a.centroid->x, a.centroid->y};
        list.push_back(e);
    }
    return json{{"version", kScriptFormatVersion}, {"actions", list}}.dump(2) + "\n";
}

OperatorScript parseScript(std::string_view text)
{
    const json doc = detail::parseJson(text, "operator script");
    const Reader root(doc, "", "operator script");
    root.expectVersion(kScriptFormatVersion);
    const Reader list = root.at("actions");
    OperatorScript out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const Reader e = list[i];
        HighLevelAction a{e.at("object").string(), std::nullopt};
        if (e.has("centroid") && !e.at("centroid").isNull()) {
            const Reader c = e.at("centroid");
            if (c.size() != 2)
                c.fail("centroid must be [x, y]");
            a.centroid = Vec2{c[0].number(), c[1].number()};
        }
        out.entries.push_back(std::move(a));
    }
    if (out.entries.empty())
        list.fail("script has no actions");
    if (out.entries.back().centroid)
        list.fail("last action must be the goal object (no centroid)");
    return out;
}

std::string readTextFile(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeTextFile(const std::string& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace rtc
