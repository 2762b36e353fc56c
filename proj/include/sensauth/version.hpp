#pragma once

namespace sensauth {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sensauth
