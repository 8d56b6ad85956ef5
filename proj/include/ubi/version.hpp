#pragma once

#include <string_view>

namespace ubi {
inline constexpr std::string_view kToolVersion = "0.1.0";
}
