#pragma once

// Versioned JSON documents other than scenes: control sequences (the output
// of `plan`, input of `replay`) and operator scripts.

#include <string>
#include <string_view>
#include <vector>

#include "rtc/dynamics.hpp"
#include "rtc/strategies.hpp"

namespace rtc {

inline constexpr int kControlsFormatVersion = 1;
inline constexpr int kScriptFormatVersion = 1;

/// Doubles are written with round-trip precision, so replay is bit-exact.
std::string serializeControls(const std::vector<Control>& controls);
/// Throws ParseError with line (syntax) or field path (structure).
std::vector<Control> parseControls(std::string_view text);

std::string serializeScript(const OperatorScript& script);
OperatorScript parseScript(std::string_view text);

std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, std::string_view text);

} // namespace rtc
