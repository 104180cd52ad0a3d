#pragma once

namespace ssq {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ssq
