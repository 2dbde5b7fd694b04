#pragma once

namespace wptmod::eddy {

/// Bessel function of the first kind, order 1. Absolute error below 1e-10
/// on [0, 200]; odd extension for negative arguments.
double bessel_j1(double x);

} // namespace wptmod::eddy
