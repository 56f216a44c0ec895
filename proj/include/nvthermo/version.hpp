#pragma once

namespace nvthermo {

inline constexpr const char* version = "0.1.0";

}  // namespace nvthermo
