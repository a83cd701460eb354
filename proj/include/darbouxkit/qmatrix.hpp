#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "darbouxkit/rational.hpp"

namespace darbouxkit {

using QVector = std::vector<Rational>;

/// Dense row-major matrix over the rationals.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
  QMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

  static QMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  QVector row(std::size_t r) const;
  QVector operator*(const QVector& v) const;

  friend bool operator==(const QMatrix&, const QMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> entries_;
};

struct RrefResult {
  QMatrix reduced;
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
};

RrefResult rref(QMatrix m);
std::size_t rank(const QMatrix& m);

/// Basis of {v : m v = 0}; each vector is scaled so its first nonzero entry is 1.
std::vector<QVector> null_space(const QMatrix& m);

/// Reduced row-echelon basis of span(vectors): a canonical form of the subspace.
/// Zero vectors are dropped; the result is empty iff the span is {0}.
std::vector<QVector> canonical_basis(const std::vector<QVector>& vectors);

}  // namespace darbouxkit
