#include <cstring>
#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "rtc/errors.hpp"
#include "rtc/formats.hpp"
#include "support/scenarios.hpp"

using namespace rtc;

TEST_CASE("controls round-trip bit-exactly")
{
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> v(-0.2, 0.2), w(-0.5, 0.5), d(0.0, 3.0);
    std::vector<Control> controls;
    for (int i = 0; i < 200; ++i)
        controls.push_back({v(gen), v(gen), w(gen), d(gen)});
    const auto back = parseControls(serializeControls(controls));
    REQUIRE(back.size() == controls.size());
    CHECK(std::memcmp(back.data(), controls.data(), controls.size() * sizeof(Control)) == 0);
    CHECK(parseControls(serializeControls({})).empty());
}

TEST_CASE("controls document errors")
{
    auto field = [](const char* text) {
        try {
            parseControls(text);
        } catch (const ParseError& e) {
            return e.field();
        }
        return std::string("<no error>");
    };
    CHECK(field(R"({"version": 1, "controls": [[0.1, 0, 0]]})") == "controls[0]");
    CHECK(field(R"({"version": 1, "controls": [[0.1, 0, "x", 1]]})") == "controls[0][2]");
    CHECK(field(R"({"version": 2, "controls": []})") == "version");
    CHECK(field(R"({"version": 1})") == "controls");
    try {
        parseControls("{\n\"version\": 1,\n\"controls\": [,]\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("operator scripts round-trip")
{
    const OperatorScript s{{{"o2", Vec2{1.15, 0.4}}, {"o5", Vec2{0.123456789012345, 0.5}}, {"goal", std::nullopt}}};
    const auto back = parseScript(serializeScript(s));
    CHECK(back == s);
    const auto j = nlohmann::json::parse(serializeScript(s));
    CHECK(j["version"] == kScriptFormatVersion);
    CHECK(j["actions"][2].contains("centroid") == false);
}

TEST_CASE("operator script structure")
{
    CHECK_THROWS_AS(parseScript(R"({"version": 1, "actions": []})"), ParseError);
    CHECK_THROWS_AS(parseScript(R"({"version": 1, "actions": [{"object": "o2", "centroid": [1, 0.4]}]})"),
                    ParseError);
    CHECK_THROWS_AS(parseScript(R"({"version": 1, "actions": [{"object": "o2", "centroid": [1]}, {"object": "g"}]})"),
                    ParseError);
    const auto ok = parseScript(R"({"version": 1, "actions": [{"object": "o2", "centroid": [1, 0.4]},
                                  {"object": "g", "centroid": null}]})");
    CHECK(ok.entries.size() == 2);
    CHECK_FALSE(ok.entries[1].centroid);
}

TEST_CASE("text files")
{
    const auto path = std::filesystem::temp_directory_path() / "rtc_formats_test.json";
    writeTextFile(path.string(), "hello\n");
    CHECK(readTextFile(path.string()) == "hello\n");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(readTextFile(path.string()), std::runtime_error);
    CHECK_THROWS_AS(writeTextFile("/nonexistent-dir/x.json", "x"), std::runtime_error);
}
