#pragma once

namespace dbcr {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace dbcr
