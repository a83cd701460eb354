#pragma once

#include <string>

#include "darbouxkit/rational.hpp"

namespace darbouxkit {

/// Working float of the numerics module (IEEE binary128).
using Real = __float128;

Real to_real(const Rational& r);
Real real_abs(Real v);
Real real_sqrt(Real v);
Real real_log(Real v);
Real real_exp(Real v);
bool real_isfinite(Real v);
/// Shortest round-trip decimal of the value rounded to binary64.
std::string format_double(double v);

}  // namespace darbouxkit
