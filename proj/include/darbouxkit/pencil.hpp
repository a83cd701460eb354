#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "darbouxkit/qmatrix.hpp"
#include "darbouxkit/unipoly.hpp"

namespace darbouxkit {

/// Matrix whose entries are polynomials of degree <= 1 in t: constant + t * linear.
class PencilMatrix {
 public:
  PencilMatrix(std::size_t rows, std::size_t cols, const std::vector<UniPoly>& entries);
  PencilMatrix(QMatrix constant, QMatrix linear);

  std::size_t rows() const { return constant_.rows(); }
  std::size_t cols() const { return constant_.cols(); }
  UniPoly at(std::size_t r, std::size_t c) const;
  QMatrix evaluate(const Rational& t) const;

  const QMatrix& constant_part() const { return constant_; }
  const QMatrix& linear_part() const { return linear_; }

 private:
  QMatrix constant_;
  QMatrix linear_;
};

struct RankDropResult {
  std::size_t generic_rank = 0;
  bool parametric = false;
  /// Rational t0 with rank(p(t0)) < cols, ascending; each confirmed by exact rank.
  std::vector<Rational> candidates;
  /// Accumulated gcd of the sampled maximal minors (monic).
  UniPoly minor_gcd;
  /// minor_gcd with its rational roots removed; nonconstant means unresolved
  /// irrational or complex rank-drop values.
  UniPoly residual = UniPoly::constant(1);
  std::size_t minors_used = 0;
  std::string stop_rule;
};

/// Rank-drop analysis of a pencil with rows >= cols >= 1. Maximal minors are
/// chosen by greedy elimination over a randomised row order (seeded), and the
/// gcd accumulation stops once it is unchanged for 3 consecutive fresh minors.
RankDropResult pencil_rank_drop(const PencilMatrix& p, std::uint64_t seed = 1);

/// Determinant of a square pencil as a polynomial in t (fraction-free elimination
/// at integer points, then exact interpolation).
UniPoly pencil_determinant(const PencilMatrix& square);

}  // namespace darbouxkit
