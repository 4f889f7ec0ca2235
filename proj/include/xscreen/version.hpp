#pragma once

namespace xscreen {

inline constexpr const char* library_version = "1.0.0";

}  // namespace xscreen
