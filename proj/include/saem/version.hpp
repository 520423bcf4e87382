#pragma once

namespace saem {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace saem
