#pragma once

namespace kolmodamp {

inline constexpr const char* version_string = "0.1.0";
inline constexpr const char* code_version = "kolmodamp 0.1.0";

} // namespace kolmodamp
