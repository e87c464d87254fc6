#pragma once

namespace optcas {

inline constexpr const char* kVersion = "v0.1.0";

}  // namespace optcas
