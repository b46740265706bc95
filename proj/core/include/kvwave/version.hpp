#pragma once

namespace kvwave {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kvwave
