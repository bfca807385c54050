#pragma once

namespace gbs {
inline constexpr const char* kVersion = "0.1.0";
}
