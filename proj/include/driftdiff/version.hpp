#pragma once

namespace driftdiff {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace driftdiff
