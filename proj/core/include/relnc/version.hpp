#pragma once

namespace relnc {

inline constexpr const char* kVersion = "0.2.0";
inline constexpr int kCodeFileSchemaVersion = 1;

}  // namespace relnc
