#pragma once

namespace quasc {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace quasc
