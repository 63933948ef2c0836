#pragma once

namespace leafvein {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace leafvein
