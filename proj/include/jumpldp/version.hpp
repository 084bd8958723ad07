#pragma once

namespace jumpldp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace jumpldp
