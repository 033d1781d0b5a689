#pragma once

namespace thetalab {

inline constexpr const char* version = "0.1.0";

} // namespace thetalab
