#pragma once

// Hand-rolled seeded generators for the property suites. Uses raw engine output
// (not std distributions) so sequences are identical across standard libraries.

#include <cstdint>
#include <random>
#include <vector>

#include "darbouxkit/field.hpp"
#include "darbouxkit/qmatrix.hpp"

namespace dk_test {

using namespace darbouxkit;

struct Gen {
  explicit Gen(std::uint64_t seed) : eng(seed) {}

  /// Uniform-ish integer in [lo, hi].
  long range(long lo, long hi) { return lo + static_cast<long>(eng() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin() { return (eng() & 1) != 0; }

  Rational rational(long num_bound = 5, long den_bound = 4) {
    return Rational(range(-num_bound, num_bound), range(1, den_bound));
  }

  Poly poly(unsigned max_degree = 2, unsigned max_terms = 4) {
    const auto monos = monomials_up_to(max_degree);
    Poly p;
    const long n = range(0, max_terms);
    for (long i = 0; i < n; ++i) p += Poly::term(rational(), monos[eng() % monos.size()]);
    return p;
  }

  Poly nonzero_poly(unsigned max_degree = 2, unsigned max_terms = 4) {
    for (;;) {
      Poly p = poly(max_degree, max_terms);
      if (!p.is_zero()) return p;
    }
  }

  QMatrix matrix(std::size_t rows, std::size_t cols, int zero_bias = 2) {
    QMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = range(0, zero_bias) == 0 ? rational() : Rational(0);
    return m;
  }

  HsaParams hsa(long bound = 2) {
    return {Rational(range(-bound, bound)), Rational(range(-bound, bound)), Rational(range(-bound, bound)),
            Rational(range(-bound, bound))};
  }

  std::mt19937_64 eng;
};

}  // namespace dk_test
