#include "darbouxkit/qmatrix.hpp"

#include "darbouxkit/errors.hpp"

namespace darbouxkit {

QMatrix::QMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidArgument("ragged matrix literal");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QVector QMatrix::row(std::size_t r) const {
  return QVector(entries_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                 entries_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

QVector QMatrix::operator*(const QVector& v) const {
  if (v.size() != cols_) throw InvalidArgument("matrix-vector size mismatch");
  QVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) {
      const Rational& a = (*this)(r, c);
      if (!a.is_zero() && !v[c].is_zero()) out[r] += a * v[c];
    }
  return out;
}

RrefResult rref(QMatrix m) {
  RrefResult res;
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::size_t lead = 0;
  for (std::size_t c = 0; c < cols && lead < rows; ++c) {
    std::size_t p = lead;
    while (p < rows && m(p, c).is_zero()) ++p;
    if (p == rows) continue;
    if (p != lead)
      for (std::size_t j = 0; j < cols; ++j) std::swap(m(p, j), m(lead, j));
    const Rational inv = Rational(1) / m(lead, c);
    for (std::size_t j = c; j < cols; ++j)
      if (!m(lead, j).is_zero()) m(lead, j) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == lead || m(i, c).is_zero()) continue;
      const Rational f = m(i, c);
      for (std::size_t j = c; j < cols; ++j)
        if (!m(lead, j).is_zero()) m(i, j) -= f * m(lead, j);
    }
    res.pivots.push_back(c);
    ++lead;
  }
  res.rank = res.pivots.size();
  res.reduced = std::move(m);
  return res;
}

std::size_t rank(const QMatrix& m) { return rref(m).rank; }

std::vector<QVector> null_space(const QMatrix& m) {
  const RrefResult r = rref(m);
  const std::size_t cols = m.cols();
  std::vector<bool> is_pivot(cols, false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<QVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    QVector v(cols);
    v[free] = 1;
    for (std::size_t i = 0; i < r.rank; ++i) v[r.pivots[i]] = -r.reduced(i, free);
    std::size_t first = 0;
    while (v[first].is_zero()) ++first;
    const Rational scale = Rational(1) / v[first];
    if (scale != Rational(1))
      for (auto& e : v) e *= scale;
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<QVector> canonical_basis(const std::vector<QVector>& vectors) {
  if (vectors.empty()) return {};
  const std::size_t n = vectors.front().size();
  QMatrix m(vectors.size(), n);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != n) throw InvalidArgument("canonical_basis: length mismatch");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = vectors[i][j];
  }
  const RrefResult r = rref(std::move(m));
  std::vector<QVector> out;
  for (std::size_t i = 0; i < r.rank; ++i) out.push_back(r.reduced.row(i));
  return out;
}

}  // namespace darbouxkit
