#include "darbouxkit/pencil.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "darbouxkit/errors.hpp"
#include "zpoly.hpp"

namespace darbouxkit {

PencilMatrix::PencilMatrix(std::size_t rows, std::size_t cols, const std::vector<UniPoly>& entries)
    : constant_(rows, cols), linear_(rows, cols) {
  if (entries.size() != rows * cols) throw InvalidArgument("pencil: entries length != rows*cols");
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const UniPoly& e = entries[r * cols + c];
      if (e.degree() > 1) throw InvalidArgument("pencil entry of degree > 1 in t");
      constant_(r, c) = e.coeff(0);
      linear_(r, c) = e.coeff(1);
    }
}

PencilMatrix::PencilMatrix(QMatrix constant, QMatrix linear)
    : constant_(std::move(constant)), linear_(std::move(linear)) {
  if (constant_.rows() != linear_.rows() || constant_.cols() != linear_.cols())
    throw InvalidArgument("pencil: part shape mismatch");
}

UniPoly PencilMatrix::at(std::size_t r, std::size_t c) const {
  return UniPoly::linear(constant_(r, c), linear_(r, c));
}

QMatrix PencilMatrix::evaluate(const Rational& t) const {
  QMatrix m(rows(), cols());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c) {
      const Rational& l = linear_(r, c);
      m(r, c) = l.is_zero() ? constant_(r, c) : constant_(r, c) + t * l;
    }
  return m;
}

namespace {

// Integer determinant by Bareiss elimination with row pivoting.
mpz_class bareiss_det(std::vector<std::vector<mpz_class>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t p = k;
    while (p < n && m[p][k] == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      std::swap(m[p], m[k]);
      sign = -sign;
    }
    const mpz_class& piv = m[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const mpz_class f = m[i][k];
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class v = m[i][j] * piv;
        if (f != 0) v -= f * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][k] = 0;
    }
    prev = piv;
  }
  return sign * m[n - 1][n - 1];
}

// Exact Newton interpolation through (xs[i], ys[i]).
UniPoly interpolate(const std::vector<Rational>& xs, std::vector<Rational> ys) {
  const std::size_t n = xs.size();
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      ys[i] = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - j]);
      if (i == j) break;
    }
  UniPoly acc;
  for (std::size_t i = n; i-- > 0;) acc = acc * UniPoly::linear(-xs[i], 1) + UniPoly::constant(ys[i]);
  return acc;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Fisher-Yates over raw engine output (library distributions are not portable).
  void shuffle(std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[next() % i]);
  }
  Rational random_point() {
    const auto raw = static_cast<long>(next() % (1ULL << 40)) - (1L << 39);
    const auto den = static_cast<long>(next() % 997) + 1;
    return Rational(raw, den);
  }

 private:
  std::mt19937_64 engine_;
};

// Greedy choice of `cols` linearly independent rows of m, scanned in `order`.
std::vector<std::size_t> independent_rows(const QMatrix& m, const std::vector<std::size_t>& order) {
  const std::size_t cols = m.cols();
  std::vector<QVector> basis;
  std::vector<std::size_t> pivot_col;
  std::vector<std::size_t> chosen;
  for (std::size_t r : order) {
    QVector v = m.row(r);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const Rational f = v[pivot_col[b]];
      if (f.is_zero()) continue;
      for (std::size_t j = 0; j < cols; ++j)
        if (!basis[b][j].is_zero()) v[j] -= f * basis[b][j];
    }
    std::size_t p = 0;
    while (p < cols && v[p].is_zero()) ++p;
    if (p == cols) continue;
    const Rational inv = Rational(1) / v[p];
    for (auto& e : v) e *= inv;
    basis.push_back(std::move(v));
    pivot_col.push_back(p);
    chosen.push_back(r);
    if (chosen.size() == cols) break;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

PencilMatrix select_rows(const PencilMatrix& p, const std::vector<std::size_t>& rows) {
  QMatrix c(rows.size(), p.cols()), l(rows.size(), p.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) {
      c(i, j) = p.constant_part()(rows[i], j);
      l(i, j) = p.linear_part()(rows[i], j);
    }
  return PencilMatrix(std::move(c), std::move(l));
}

}  // namespace

UniPoly pencil_determinant(const PencilMatrix& sq) {
  const std::size_t n = sq.rows();
  if (n != sq.cols()) throw InvalidArgument("pencil_determinant: matrix not square");
  // Row scaling to integers; the overall factor is restored at the end.
  std::vector<mpz_class> scale(n, 1);
  mpz_class total = 1;
  std::size_t rows_with_t = 0;
  std::vector<bool> col_has_t(n, false);
  for (std::size_t r = 0; r < n; ++r) {
    bool has_t = false;
    for (std::size_t c = 0; c < n; ++c) {
      mpz_lcm(scale[r].get_mpz_t(), scale[r].get_mpz_t(), sq.constant_part()(r, c).raw().get_den_mpz_t());
      mpz_lcm(scale[r].get_mpz_t(), scale[r].get_mpz_t(), sq.linear_part()(r, c).raw().get_den_mpz_t());
      if (!sq.linear_part()(r, c).is_zero()) {
        has_t = true;
        col_has_t[c] = true;
      }
    }
    rows_with_t += has_t ? 1 : 0;
    total *= scale[r];
  }
  const auto cols_with_t = static_cast<std::size_t>(std::count(col_has_t.begin(), col_has_t.end(), true));
  const std::size_t degree_bound = std::min(rows_with_t, cols_with_t);

  std::vector<std::vector<mpz_class>> cz(n, std::vector<mpz_class>(n)), lz = cz;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const mpq_class& a = sq.constant_part()(r, c).raw();
      const mpq_class& b = sq.linear_part()(r, c).raw();
      cz[r][c] = a.get_num() * (scale[r] / a.get_den());
      lz[r][c] = b.get_num() * (scale[r] / b.get_den());
    }

  std::vector<Rational> xs, ys;
  for (std::size_t k = 0; k <= degree_bound; ++k) {
    const long t = (k % 2 == 1) ? static_cast<long>((k + 1) / 2) : -static_cast<long>(k / 2);
    std::vector<std::vector<mpz_class>> m = cz;
    if (t != 0)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
          if (lz[r][c] != 0) m[r][c] += lz[r][c] * t;
    xs.emplace_back(t);
    ys.emplace_back(bareiss_det(std::move(m)), total);
  }
  return interpolate(xs, std::move(ys));
}

RankDropResult pencil_rank_drop(const PencilMatrix& p, std::uint64_t seed) {
  const std::size_t rows = p.rows();
  const std::size_t cols = p.cols();
  if (cols < 1 || rows < cols) throw InvalidArgument("malformed pencil: need rows >= cols >= 1");
  Rng rng(seed);
  RankDropResult res;

  // Generic rank: rank at random points (exceptional t are finitely many).
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  Rational probe;
  for (int attempt = 0; attempt < 2 && res.generic_rank < cols; ++attempt) {
    const Rational t = rng.random_point();
    const std::size_t r = rank(p.evaluate(t));
    if (r > res.generic_rank) {
      res.generic_rank = r;
      probe = t;
    }
  }
  if (res.generic_rank < cols) {
    res.parametric = true;
    res.residual = UniPoly();
    res.stop_rule = "parametric: kernel exists for every t";
    return res;
  }

  std::set<std::vector<std::size_t>> seen;
  UniPoly g;
  int unchanged = 0;
  int stale_attempts = 0;
  const QMatrix at_probe = p.evaluate(probe);
  while (true) {
    std::vector<std::size_t> perm = order;
    if (!seen.empty()) rng.shuffle(perm);
    std::vector<std::size_t> subset = independent_rows(at_probe, perm);
    if (!seen.insert(subset).second) {
      if (++stale_attempts >= 64) {
        res.stop_rule = "row subsets exhausted after " + std::to_string(res.minors_used) + " minors";
        break;
      }
      continue;
    }
    stale_attempts = 0;
    const UniPoly d = pencil_determinant(select_rows(p, subset));
    ++res.minors_used;
    const UniPoly next = g.is_zero() ? d.monic() : gcd(g, d);
    if (!g.is_zero() && next == g) {
      ++unchanged;
    } else if (!g.is_zero()) {
      unchanged = 0;
    }
    g = next;
    if (g.degree() == 0) {
      res.stop_rule = "gcd constant after " + std::to_string(res.minors_used) + " minors";
      break;
    }
    if (unchanged >= 3) {
      res.stop_rule = "gcd unchanged for 3 consecutive fresh minors (" + std::to_string(res.minors_used) +
                      " minors)";
      break;
    }
  }

  res.minor_gcd = g;
  for (const Rational& t0 : rational_roots(g))
    if (rank(p.evaluate(t0)) < cols) res.candidates.push_back(t0);
  res.residual = strip_rational_roots(g);
  return res;
}

}  // namespace darbouxkit
