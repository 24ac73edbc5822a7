#pragma once

namespace hqmm {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kProjectName = "hqmm";

}  // namespace hqmm
