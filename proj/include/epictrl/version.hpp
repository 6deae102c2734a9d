#pragma once

namespace epictrl {

inline constexpr const char* kToolName = "epictrl";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1; // config / file schema version

} // namespace epictrl
