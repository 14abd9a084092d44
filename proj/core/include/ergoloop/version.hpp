#pragma once

namespace ergoloop {

inline constexpr const char* version = "0.1.0";

}  // namespace ergoloop
