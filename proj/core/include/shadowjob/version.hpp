#pragma once

namespace shadowjob {

inline constexpr const char* kToolName = "shadowjob";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace shadowjob
