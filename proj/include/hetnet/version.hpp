#pragma once

namespace hetnet {

inline constexpr const char* kVersion = "0.1.0";

} // namespace hetnet
