#pragma once

#include <string_view>

namespace ctxpool {

inline constexpr std::string_view kEngineName = "ctxpool";
inline constexpr std::string_view kEngineVersion = "0.1.0";

}  // namespace ctxpool
