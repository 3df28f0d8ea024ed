// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace weylsampl {

/// Evaluates all real orthonormal spherical harmonics of degree l <= lmax at
/// the direction (x, y, z) (unit vector), without Condon-Shortley phase.
/// Output order: for each l ascending, m = 0, then (1, cos), (1, sin),
/// (2, cos), (2, sin), ..., (l, sin); (lmax+1)^2 values total.
///
/// Uses the standard fully normalized associated Legendre recurrences
/// (4 pi normalization folded into the start value), stable well past l = 100.
void sh_eval_all(int lmax, double x, double y, double z, std::vector<double>& out);

} // namespace weylsampl
