#pragma once

#include <numbers>

namespace wptmod::constants {

inline constexpr double pi = std::numbers::pi;

/// Vacuum permeability [N/A^2].
inline constexpr double mu0 = 4.0e-7 * pi;

} // namespace wptmod::constants
