#pragma once

namespace crlab {
inline constexpr const char* kVersion = "0.1.0";
}
