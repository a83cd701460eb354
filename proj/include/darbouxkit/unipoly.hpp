#pragma once

#include <string>
#include <utility>
#include <vector>

#include "darbouxkit/rational.hpp"

namespace darbouxkit {

/// Univariate polynomial in the indeterminate t over the rationals.
/// coefficients()[i] multiplies t^i; the zero polynomial has no coefficients.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coefficients);
  static UniPoly constant(const Rational& c);
  /// c0 + c1 t
  static UniPoly linear(const Rational& c0, const Rational& c1);

  const std::vector<Rational>& coefficients() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(); }
  const Rational& leading() const { return c_.back(); }

  Rational evaluate(const Rational& t) const;
  UniPoly monic() const;
  std::string str() const;

  UniPoly operator-() const;
  friend UniPoly operator+(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator-(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  friend bool operator==(const UniPoly&, const UniPoly&) = default;

 private:
  void trim();
  std::vector<Rational> c_;
};

/// Quotient and remainder; throws InvalidArgument on a zero divisor.
std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b);

/// Monic gcd (zero iff both inputs are zero).
UniPoly gcd(const UniPoly& a, const UniPoly& b);

/// Exactly the distinct rational roots of p, ascending. Throws on the zero polynomial.
std::vector<Rational> rational_roots(const UniPoly& p);

/// p with every rational root divided out (all multiplicities), made monic.
UniPoly strip_rational_roots(const UniPoly& p);

}  // namespace darbouxkit
