#pragma once

#include <string_view>

namespace mfg {

inline constexpr std::string_view kToolName = "mfg-invest";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace mfg
