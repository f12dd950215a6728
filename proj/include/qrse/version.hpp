#pragma once

namespace qrse {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qrse
