#pragma once

namespace codep {
inline constexpr const char* kVersion = "0.1.0";
}
