#pragma once

#include <string_view>

namespace hfarray {
inline constexpr std::string_view version = "1.0.0";
}
