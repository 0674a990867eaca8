#pragma once

namespace sfm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sfm
