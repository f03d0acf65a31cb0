#pragma once

namespace robustmom {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace robustmom
