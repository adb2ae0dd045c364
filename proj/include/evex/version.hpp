#pragma once

namespace evex {
inline constexpr const char* kVersion = "0.1.0";
}
