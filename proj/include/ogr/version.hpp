#pragma once

namespace ogr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ogr
