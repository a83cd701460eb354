#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "darbouxkit/errors.hpp"
#include "darbouxkit/pencil.hpp"
#include "darbouxkit/unipoly.hpp"
#include "support.hpp"

using namespace darbouxkit;

namespace {

UniPoly t_poly() { return UniPoly::linear(0, 1); }

PencilMatrix pencil(std::size_t rows, std::size_t cols, std::vector<UniPoly> e) { return PencilMatrix(rows, cols, e); }

bool is_rref(const QMatrix& m, const std::vector<std::size_t>& pivots) {
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    if (m(r, pivots[r]) != Rational(1)) return false;
    for (std::size_t c = 0; c < pivots[r]; ++c)
      if (!m(r, c).is_zero()) return false;
    for (std::size_t rr = 0; rr < m.rows(); ++rr)
      if (rr != r && !m(rr, pivots[r]).is_zero()) return false;
    if (r > 0 && pivots[r] <= pivots[r - 1]) return false;
  }
  for (std::size_t r = pivots.size(); r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (!m(r, c).is_zero()) return false;
  return true;
}

}  // namespace

TEST_CASE("rational canonical form") {
  Rational a(6, -4);
  CHECK(a.numerator() == -3);
  CHECK(a.denominator() == 2);
  CHECK(Rational(0, 7).denominator() == 1);
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(1, 3));
  CHECK(pow(Rational(-2, 3), 3) == Rational(-8, 27));
  CHECK_THROWS_AS(Rational(1, 0), InvalidArgument);
  CHECK_THROWS_AS(Rational(1) / Rational(0), InvalidArgument);
}

TEST_CASE("rational parse is strict") {
  CHECK(Rational::parse("3/2") == Rational(3, 2));
  CHECK(Rational::parse("-4") == Rational(-4));
  CHECK(Rational::parse("+6/4") == Rational(3, 2));
  CHECK(Rational::parse("123456789012345678901234567890").str() == "123456789012345678901234567890");
  for (const char* bad : {"", "1.5", "1/", "/2", "1/0", "a", "1 /2", "--1", "1e3"})
    CHECK_THROWS_AS(Rational::parse(bad), InvalidArgument);
}

TEST_CASE("rref examples") {
  auto id = rref(QMatrix::identity(2));
  CHECK(id.reduced == QMatrix::identity(2));
  CHECK(id.pivots == std::vector<std::size_t>{0, 1});
  CHECK(id.rank == 2);

  auto dep = rref(QMatrix{{1, 2}, {2, 4}});
  CHECK(dep.reduced == QMatrix{{1, 2}, {0, 0}});
  CHECK(dep.rank == 1);

  auto perm = rref(QMatrix{{0, 1}, {1, 0}});
  CHECK(perm.reduced == QMatrix::identity(2));
  CHECK(perm.rank == 2);
}

TEST_CASE("null space examples") {
  CHECK(null_space(QMatrix::identity(3)).empty());
  auto k = null_space(QMatrix{{1, -1}});
  REQUIRE(k.size() == 1);
  CHECK(k[0] == QVector{1, 1});
  auto z = null_space(QMatrix(2, 2));
  REQUIRE(z.size() == 2);
  CHECK(z[0] == QVector{1, 0});
  CHECK(z[1] == QVector{0, 1});
}

TEST_CASE("null space vectors start with 1") {
  auto k = null_space(QMatrix{{2, 4, 6}});
  REQUIRE(k.size() == 2);
  for (const auto& v : k) {
    auto it = std::find_if(v.begin(), v.end(), [](const Rational& r) { return !r.is_zero(); });
    REQUIRE(it != v.end());
    CHECK(*it == Rational(1));
  }
}

TEST_CASE("canonical basis does not depend on the spanning set") {
  QVector a{1, 2, 0}, b{0, 1, 1};
  auto c1 = canonical_basis({a, b});
  QVector s1{1, 3, 1}, s2{2, 5, 1}, zero{0, 0, 0};
  auto c2 = canonical_basis({s1, zero, s2});
  CHECK(c1 == c2);
  CHECK(canonical_basis({zero}).empty());
}

TEST_CASE("rref is reduced and preserves the row space (property)") {
  dk_test::Gen g(11);
  for (int i = 0; i < 300; ++i) {
    QMatrix m = g.matrix(g.range(1, 5), g.range(1, 5));
    auto r = rref(m);
    CHECK(is_rref(r.reduced, r.pivots));
    std::vector<QVector> rows, red;
    for (std::size_t k = 0; k < m.rows(); ++k) rows.push_back(m.row(k));
    for (std::size_t k = 0; k < r.rank; ++k) red.push_back(r.reduced.row(k));
    CHECK(canonical_basis(rows) == canonical_basis(red));
  }
}

TEST_CASE("unipoly arithmetic and rendering") {
  UniPoly t = t_poly();
  UniPoly p = t * t + UniPoly::constant(2);
  CHECK(p.str() == "t^2 + 2");
  CHECK(p.degree() == 2);
  CHECK(UniPoly().degree() == -1);
  CHECK(p.evaluate(Rational(1, 2)) == Rational(9, 4));
  auto [q, r] = divmod(p, t - UniPoly::constant(1));
  CHECK(q * (t - UniPoly::constant(1)) + r == p);
  CHECK(r == UniPoly::constant(3));
  CHECK(gcd((t - UniPoly::constant(1)) * (t + UniPoly::constant(2)), (t + UniPoly::constant(2)) * t) ==
        t + UniPoly::constant(2));
}

TEST_CASE("rational roots examples") {
  UniPoly t = t_poly();
  CHECK(rational_roots(t + UniPoly::constant(1)) == std::vector<Rational>{-1});
  CHECK(rational_roots(t * t - UniPoly::constant(2)).empty());
  UniPoly p({1, -3, 2});  // 2t^2 - 3t + 1
  CHECK(rational_roots(p) == std::vector<Rational>{Rational(1, 2), 1});
  CHECK_THROWS_AS(rational_roots(UniPoly()), InvalidArgument);
  CHECK(rational_roots(UniPoly::constant(5)).empty());
}

TEST_CASE("rational roots: repeated, zero and large roots") {
  UniPoly t = t_poly();
  UniPoly p = t * t * t * (t - UniPoly::constant(Rational(7, 3))) * (t - UniPoly::constant(Rational(7, 3)));
  CHECK(rational_roots(p) == std::vector<Rational>{0, Rational(7, 3)});
  // product of two large primes as a root
  Rational big(mpz_class("1000000007") * mpz_class("998244353"), mpz_class(1));
  UniPoly q = (t - UniPoly::constant(big)) * (t * t + UniPoly::constant(1));
  CHECK(rational_roots(q) == std::vector<Rational>{big});
  CHECK(strip_rational_roots(q) == t * t + UniPoly::constant(1));
}

TEST_CASE("rational roots find every planted root (property)") {
  dk_test::Gen g(5);
  UniPoly t = t_poly();
  for (int i = 0; i < 200; ++i) {
    std::vector<Rational> planted;
    UniPoly p = UniPoly::constant(g.rational());
    if (p == UniPoly()) p = UniPoly::constant(1);
    const long n = g.range(0, 4);
    for (long k = 0; k < n; ++k) {
      Rational r = g.rational(9, 6);
      planted.push_back(r);
      p = p * (t - UniPoly::constant(r));
    }
    if (g.coin()) p = p * (t * t + UniPoly::constant(3));
    auto roots = rational_roots(p);
    for (const Rational& r : roots) CHECK(p.evaluate(r).is_zero());
    for (const Rational& r : planted) CHECK(std::find(roots.begin(), roots.end(), r) != roots.end());
    CHECK(std::is_sorted(roots.begin(), roots.end()));
    CHECK(std::adjacent_find(roots.begin(), roots.end()) == roots.end());
  }
}

TEST_CASE("pencil rank drop examples") {
  UniPoly t = t_poly();
  UniPoly one = UniPoly::constant(1), zero;
  auto d = pencil_rank_drop(pencil(2, 2, {t - one, zero, zero, t - UniPoly::constant(2)}));
  CHECK(d.generic_rank == 2);
  CHECK_FALSE(d.parametric);
  CHECK(d.candidates == std::vector<Rational>{1, 2});
  CHECK(d.residual.degree() == 0);

  auto col = pencil_rank_drop(pencil(2, 1, {t, t}));
  CHECK(col.generic_rank == 1);
  CHECK(col.candidates == std::vector<Rational>{0});

  auto irr = pencil_rank_drop(pencil(2, 2, {t, UniPoly::constant(-2), one, t}));
  CHECK(irr.candidates.empty());
  CHECK(irr.residual.degree() > 0);
  CHECK(divmod(t * t + UniPoly::constant(2), irr.residual).second == UniPoly());
}

TEST_CASE("pencil rank drop: parametric and malformed") {
  UniPoly t = t_poly();
  auto par = pencil_rank_drop(pencil(2, 2, {t, t, t, t}));
  CHECK(par.parametric);
  CHECK(par.generic_rank == 1);
  CHECK(par.candidates.empty());
  CHECK_THROWS_AS(pencil_rank_drop(pencil(1, 2, {t, t})), InvalidArgument);
}

TEST_CASE("pencil determinant matches expansion") {
  UniPoly t = t_poly();
  UniPoly one = UniPoly::constant(1);
  auto det = pencil_determinant(pencil(2, 2, {t, UniPoly::constant(-2), one, t}));
  CHECK(det == t * t + UniPoly::constant(2));
  auto d3 = pencil_determinant(pencil(3, 3, {t, one, UniPoly(), UniPoly(), t - one, one, one, UniPoly(), UniPoly::constant(Rational(1, 2)) * t}));
  // expand along the first row: t((t-1)t/2) - 1(0 - 1)
  CHECK(d3 == UniPoly::constant(Rational(1, 2)) * t * t * (t - one) + one);
}

TEST_CASE("pencil candidates are exact rank drops (property)") {
  dk_test::Gen g(23);
  for (int i = 0; i < 60; ++i) {
    const std::size_t cols = g.range(1, 4), rows = cols + g.range(0, 2);
    QMatrix a = g.matrix(rows, cols, 1), b = g.matrix(rows, cols, 1);
    // plant a drop at a random rational t0 by making column 0 of a - t0 b vanish
    Rational t0 = g.rational();
    for (std::size_t r = 0; r < rows; ++r) a(r, 0) = t0 * b(r, 0);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) b(r, c) = -b(r, c);
    PencilMatrix p(a, b);  // a - t b_orig
    auto d = pencil_rank_drop(p, 1 + i);
    if (d.parametric) {
      CHECK(d.candidates.empty());
      CHECK(rank(p.evaluate(t0)) < cols);
      continue;
    }
    CHECK(std::find(d.candidates.begin(), d.candidates.end(), t0) != d.candidates.end());
    for (const Rational& c : d.candidates) CHECK_FALSE(null_space(p.evaluate(c)).empty());
  }
}
