#pragma once

namespace anisoflow {
inline constexpr const char* kVersion = "0.1.0";
}
