#pragma once

namespace bhdimer {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace bhdimer
