#pragma once

namespace t4d {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace t4d
