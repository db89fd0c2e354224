// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace sgns {

inline constexpr const char* kToolName = "sgns";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace sgns
