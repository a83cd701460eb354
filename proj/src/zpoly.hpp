#pragma once

// Integer-coefficient helpers shared by the univariate and pencil code.

#include <gmpxx.h>

#include <vector>

#include "darbouxkit/unipoly.hpp"

namespace darbouxkit::detail {

using ZPoly = std::vector<mpz_class>;  // index = power of t, trimmed

void trim(ZPoly& p);
/// Primitive integer polynomial with positive leading coefficient, proportional to p.
ZPoly primitive_part(const UniPoly& p);
ZPoly primitive_part(ZPoly p);
UniPoly to_unipoly(const ZPoly& p);
/// Primitive gcd via pseudo-remainder sequences.
ZPoly gcd(ZPoly a, ZPoly b);

}  // namespace darbouxkit::detail
