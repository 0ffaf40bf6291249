#pragma once

namespace fkpp {

inline constexpr const char* kToolName = "fkpp";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace fkpp
