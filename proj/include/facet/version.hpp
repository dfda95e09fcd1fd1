#pragma once

namespace facet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace facet
