#pragma once

namespace minvar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace minvar
