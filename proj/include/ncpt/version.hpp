#pragma once

namespace ncpt {

inline constexpr const char* tool_name = "ncpt";
inline constexpr const char* tool_version = "0.1.0";

}  // namespace ncpt
