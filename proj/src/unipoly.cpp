#include "darbouxkit/unipoly.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "darbouxkit/errors.hpp"
#include "zpoly.hpp"

namespace darbouxkit {

UniPoly::UniPoly(std::vector<Rational> coefficients) : c_(std::move(coefficients)) { trim(); }

UniPoly UniPoly::constant(const Rational& c) { return UniPoly({c}); }
UniPoly UniPoly::linear(const Rational& c0, const Rational& c1) { return UniPoly({c0, c1}); }

void UniPoly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Rational UniPoly::evaluate(const Rational& t) const {
  Rational acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

UniPoly UniPoly::monic() const {
  if (is_zero()) return {};
  const Rational inv = Rational(1) / leading();
  std::vector<Rational> out = c_;
  for (auto& e : out) e *= inv;
  return UniPoly(std::move(out));
}

std::string UniPoly::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const Rational& c = c_[static_cast<std::size_t>(i)];
    if (c.is_zero()) continue;
    const Rational mag = abs(c);
    if (first) {
      if (c.sign() < 0) os << '-';
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    first = false;
    const bool unit = mag == Rational(1);
    if (i == 0) {
      os << mag.str();
    } else {
      if (!unit) os << mag.str() << '*';
      os << 't';
      if (i > 1) os << '^' << i;
    }
  }
  return os.str();
}

UniPoly UniPoly::operator-() const {
  std::vector<Rational> out = c_;
  for (auto& e : out) e = -e;
  return UniPoly(std::move(out));
}

UniPoly operator+(const UniPoly& a, const UniPoly& b) {
  std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] += b.c_[i];
  return UniPoly(std::move(out));
}

UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + (-b); }

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  }
  return UniPoly(std::move(out));
}

std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) throw InvalidArgument("polynomial division by zero");
  std::vector<Rational> rem = a.coefficients();
  const int db = b.degree();
  if (a.degree() < db) return {UniPoly(), a};
  std::vector<Rational> quot(static_cast<std::size_t>(a.degree() - db + 1));
  const Rational inv = Rational(1) / b.leading();
  for (int i = a.degree(); i >= db; --i) {
    const Rational f = rem[static_cast<std::size_t>(i)] * inv;
    if (f.is_zero()) continue;
    quot[static_cast<std::size_t>(i - db)] = f;
    for (int j = 0; j <= db; ++j)
      rem[static_cast<std::size_t>(i - db + j)] -= f * b.coefficients()[static_cast<std::size_t>(j)];
  }
  return {UniPoly(std::move(quot)), UniPoly(std::move(rem))};
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() && b.is_zero()) return {};
  return detail::to_unipoly(detail::gcd(detail::primitive_part(a), detail::primitive_part(b))).monic();
}

namespace {

using detail::ZPoly;

// Prime factorisation for divisor enumeration: trial division, then Pollard-Brent.
void factor_into(mpz_class n, std::map<mpz_class, unsigned>& out);

mpz_class pollard_brent(const mpz_class& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    mpz_class y = 2, x, g = 1, q = 1, ys;
    const unsigned long m = 128;
    unsigned long r = 1;
    auto f = [&](const mpz_class& v) { return mpz_class((v * v + c) % n); };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = (q * abs(mpz_class(x - y))) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      }
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        mpz_class d = abs(mpz_class(x - ys));
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(mpz_class n, std::map<mpz_class, unsigned>& out) {
  if (n < 0) n = -n;
  for (unsigned long p = 2; p < 10000 && n > 1; ++p) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p) == 0) continue;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) {
      n /= p;
      ++out[mpz_class(p)];
    }
  }
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 30) != 0) {
    ++out[n];
    return;
  }
  const mpz_class d = pollard_brent(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

std::vector<mpz_class> divisors(const mpz_class& n) {
  std::map<mpz_class, unsigned> f;
  factor_into(n, f);
  std::vector<mpz_class> ds{1};
  for (const auto& [p, e] : f) {
    const std::size_t base = ds.size();
    mpz_class pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
    }
  }
  return ds;
}

// q^n * P(p/q) for an integer polynomial P of degree n.
mpz_class homogeneous_eval(const ZPoly& poly, const mpz_class& p, const mpz_class& q) {
  mpz_class acc = 0, qpow = 1;
  // Horner in p with q powers shifted: sum a_i p^i q^(n-i).
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
    acc = acc * p + *it * qpow;
    qpow *= q;
  }
  return acc;
}

// Divide P by (q t - p), exact.
ZPoly deflate(const ZPoly& poly, const mpz_class& p, const mpz_class& q) {
  const std::size_t n = poly.size() - 1;
  ZPoly quot(n);
  mpz_class carry = 0;
  for (std::size_t k = n; k >= 1; --k) {
    mpz_class num = poly[k] + carry;
    mpz_class c;
    mpz_divexact(c.get_mpz_t(), num.get_mpz_t(), q.get_mpz_t());
    quot[k - 1] = c;
    carry = c * p;
  }
  return quot;
}

struct RootScan {
  std::vector<Rational> roots;
  ZPoly rest;  // primitive, no rational roots left
};

RootScan scan(const UniPoly& poly) {
  if (poly.is_zero()) throw InvalidArgument("rational_roots: zero polynomial (every t is a root)");
  ZPoly p = detail::primitive_part(poly);
  RootScan out;
  if (p.size() > 1 && p[0] == 0) {
    out.roots.emplace_back(0);
    while (p.size() > 1 && p[0] == 0) p.erase(p.begin());
  }
  std::vector<mpz_class> numers, denoms;
  if (p.size() > 1) {
    numers = divisors(p.front());
    denoms = divisors(p.back());
  }
  std::vector<std::pair<mpz_class, mpz_class>> candidates;
  for (const auto& q : denoms)
    for (const auto& a : numers) {
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t());
      if (g != 1) continue;
      candidates.emplace_back(a, q);
      candidates.emplace_back(-a, q);
    }
  for (const auto& [a, q] : candidates) {
    while (p.size() > 1) {
      if (homogeneous_eval(p, a, q) != 0) break;
      p = detail::primitive_part(deflate(p, a, q));
      const Rational r(a, q);
      if (std::find(out.roots.begin(), out.roots.end(), r) == out.roots.end()) out.roots.push_back(r);
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  out.rest = p;
  return out;
}

}  // namespace

std::vector<Rational> rational_roots(const UniPoly& p) { return scan(p).roots; }

UniPoly strip_rational_roots(const UniPoly& p) { return detail::to_unipoly(scan(p).rest).monic(); }

namespace detail {

void trim(ZPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

ZPoly primitive_part(ZPoly p) {
  trim(p);
  if (p.empty()) return p;
  mpz_class g = 0;
  for (const auto& c : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (p.back() < 0) g = -g;
  for (auto& c : p) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  return p;
}

ZPoly primitive_part(const UniPoly& p) {
  mpz_class l = 1;
  for (const auto& c : p.coefficients()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.raw().get_den_mpz_t());
  ZPoly z;
  z.reserve(p.coefficients().size());
  for (const auto& c : p.coefficients()) {
    z.push_back(c.raw().get_num() * (l / c.raw().get_den()));
  }
  return primitive_part(std::move(z));
}

UniPoly to_unipoly(const ZPoly& p) {
  std::vector<Rational> c;
  c.reserve(p.size());
  for (const auto& v : p) c.emplace_back(v);
  return UniPoly(std::move(c));
}

namespace {

// lc(b)^(deg a - deg b + 1) * a mod b
ZPoly pseudo_remainder(ZPoly a, const ZPoly& b) {
  const std::size_t db = b.size() - 1;
  const mpz_class& lb = b.back();
  while (!a.empty() && a.size() - 1 >= db) {
    const mpz_class la = a.back();
    const std::size_t shift = a.size() - 1 - db;
    for (auto& c : a) c *= lb;
    for (std::size_t j = 0; j <= db; ++j) a[shift + j] -= la * b[j];
    trim(a);
  }
  return a;
}

}  // namespace

ZPoly gcd(ZPoly a, ZPoly b) {
  a = primitive_part(std::move(a));
  b = primitive_part(std::move(b));
  if (a.size() < b.size()) std::swap(a, b);
  while (!b.empty()) {
    if (b.size() == 1) return ZPoly{1};
    ZPoly r = primitive_part(pseudo_remainder(a, b));
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

}  // namespace detail

}  // namespace darbouxkit
