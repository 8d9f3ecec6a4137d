#pragma once

namespace bandstat {

inline constexpr const char* version = "1.0.0";

}  // namespace bandstat
