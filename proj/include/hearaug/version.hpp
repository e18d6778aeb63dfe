#pragma once

namespace hearaug {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hearaug
