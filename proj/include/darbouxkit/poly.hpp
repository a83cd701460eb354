#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "darbouxkit/rational.hpp"

namespace darbouxkit {

enum class Var { x, y, z };

struct Monomial {
  std::uint32_t ex = 0, ey = 0, ez = 0;

  std::uint32_t degree() const { return ex + ey + ez; }
  std::uint32_t exponent(Var v) const { return v == Var::x ? ex : (v == Var::y ? ey : ez); }
  bool divides(const Monomial& m) const { return ex <= m.ex && ey <= m.ey && ez <= m.ez; }

  /// Fixed-width key "x^i*y^j*z^k" used by the JSON reports.
  std::string key() const;
  /// Human rendering: "x^2*y", "z", "" for the unit monomial.
  std::string str() const;

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    return {a.ex + b.ex, a.ey + b.ey, a.ez + b.ez};
  }
  friend bool operator==(const Monomial&, const Monomial&) = default;
  /// Graded lexicographic with x > y > z.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    if (auto c = a.ex <=> b.ex; c != 0) return c;
    return a.ey <=> b.ey;
  }
};

/// All monomials of total degree <= n, ascending in graded-lex order.
std::vector<Monomial> monomials_up_to(unsigned n);

/// Polynomial in x, y, z over the rationals. Zero coefficients are never stored.
class Poly {
 public:
  using Terms = std::map<Monomial, Rational>;

  Poly() = default;
  Poly(const Rational& c);  // NOLINT(google-explicit-constructor)
  Poly(long c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  static Poly var(Var v);
  static Poly term(const Rational& c, const Monomial& m);
  static Poly from_terms(const Terms& terms);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0); }
  /// -1 for the zero polynomial.
  int degree() const { return is_zero() ? -1 : static_cast<int>(terms_.rbegin()->first.degree()); }
  Rational coeff(const Monomial& m) const;
  /// Largest term in graded-lex order; the polynomial must be nonzero.
  const std::pair<const Monomial, Rational>& leading() const { return *terms_.rbegin(); }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly&, const Poly&) = default;

  /// Canonical text, terms in descending graded-lex order, e.g. "x*y - x - z".
  std::string str() const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  Terms terms_;
};

Poly add(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
Poly scale(const Poly& p, const Rational& c);
Poly partial_derivative(const Poly& p, Var v);
Poly pow(const Poly& p, unsigned e);

/// Homogeneous components (degree, part), degrees strictly increasing.
std::vector<std::pair<unsigned, Poly>> homogeneous_parts(const Poly& p);

/// q with p = q * d, or nullopt when d does not divide p exactly. Throws on d = 0.
std::optional<Poly> try_divide(const Poly& p, const Poly& d);

Rational evaluate(const Poly& p, const std::array<Rational, 3>& at);
double evaluate_f(const Poly& p, const std::array<double, 3>& at);

/// Degree <= 1 polynomial b0 + b1 x + b2 y + b3 z.
struct Cofactor {
  Rational b0, b1, b2, b3;

  Poly to_poly() const;
  /// Throws InvalidArgument if p has degree > 1.
  static Cofactor from_poly(const Poly& p);
  std::array<Rational, 4> coords() const { return {b0, b1, b2, b3}; }
  bool is_zero() const { return b0.is_zero() && b1.is_zero() && b2.is_zero() && b3.is_zero(); }
  friend bool operator==(const Cofactor&, const Cofactor&) = default;
};

}  // namespace darbouxkit
