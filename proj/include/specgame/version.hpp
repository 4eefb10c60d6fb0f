#pragma once

namespace specgame {

inline constexpr const char* kVersion = "specgame 0.1.0";

} // namespace specgame
