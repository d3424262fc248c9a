#pragma once

#include "esindy/types.hpp"

namespace esindy {

// Second-order central differences in the interior, second-order one-sided
// stencils at the two endpoints. Requires m >= 3 and uniform dt.
DerivativeMatrix finite_difference_time(const DataMatrix& data);

// Local least-squares quadratic fit over an odd window; the derivative of the
// fit is evaluated at the center sample. Endpoints use truncated windows.
DerivativeMatrix smoothed_difference(const DataMatrix& data, int window);

}  // namespace esindy
