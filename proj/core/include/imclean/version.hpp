#pragma once

namespace imclean {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace imclean
