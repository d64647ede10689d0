#pragma once

#include "dche/types.hpp"

namespace dche {

/// Gamma function for complex argument, relative error below ~1e-13 for |s| <= 50.
/// Throws PoleOfGamma at the non-positive integers.
complex complex_gamma(const complex& s);

/// 1/Gamma(s); returns exactly 0 at the poles of Gamma.
complex reciprocal_gamma(const complex& s);

} // namespace dche
