#include "darbouxkit/poly.hpp"

#include <sstream>

#include "darbouxkit/errors.hpp"

namespace darbouxkit {

std::string Monomial::key() const {
  return "x^" + std::to_string(ex) + "*y^" + std::to_string(ey) + "*z^" + std::to_string(ez);
}

std::string Monomial::str() const {
  std::string out;
  auto put = [&](char name, std::uint32_t e) {
    if (e == 0) return;
    if (!out.empty()) out += '*';
    out += name;
    if (e > 1) out += '^' + std::to_string(e);
  };
  put('x', ex);
  put('y', ey);
  put('z', ez);
  return out;
}

std::vector<Monomial> monomials_up_to(unsigned n) {
  std::vector<Monomial> out;
  for (std::uint32_t d = 0; d <= n; ++d)
    for (std::uint32_t ex = 0; ex <= d; ++ex)
      for (std::uint32_t ey = 0; ey <= d - ex; ++ey) out.push_back({ex, ey, d - ex - ey});
  return out;
}

Poly::Poly(const Rational& c) {
  if (!c.is_zero()) terms_.emplace(Monomial{}, c);
}

Poly Poly::var(Var v) {
  Monomial m;
  if (v == Var::x) m.ex = 1;
  if (v == Var::y) m.ey = 1;
  if (v == Var::z) m.ez = 1;
  return term(1, m);
}

Poly Poly::term(const Rational& c, const Monomial& m) {
  Poly p;
  p.add_term(m, c);
  return p;
}

Poly Poly::from_terms(const Terms& terms) {
  Poly p;
  for (const auto& [m, c] : terms) p.add_term(m, c);
  return p;
}

Rational Poly::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational() : it->second;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

std::string Poly::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    const Rational mag = abs(c);
    if (first) {
      if (c.sign() < 0) os << '-';
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    first = false;
    if (m.degree() == 0) {
      os << mag.str();
    } else {
      if (mag != Rational(1)) os << mag.str() << '*';
      os << m.str();
    }
  }
  return os.str();
}

Poly add(const Poly& a, const Poly& b) { return a + b; }
Poly mul(const Poly& a, const Poly& b) { return a * b; }

Poly scale(const Poly& p, const Rational& c) {
  if (c.is_zero()) return {};
  Poly::Terms t = p.terms();
  for (auto& [m, v] : t) v *= c;
  return Poly::from_terms(t);
}

Poly partial_derivative(const Poly& p, Var v) {
  Poly::Terms out;
  for (const auto& [m, c] : p.terms()) {
    const std::uint32_t e = m.exponent(v);
    if (e == 0) continue;
    Monomial d = m;
    if (v == Var::x) --d.ex;
    if (v == Var::y) --d.ey;
    if (v == Var::z) --d.ez;
    out.emplace(d, c * Rational(static_cast<long>(e)));
  }
  return Poly::from_terms(out);
}

Poly pow(const Poly& p, unsigned e) {
  Poly acc(1);
  for (unsigned i = 0; i < e; ++i) acc = acc * p;
  return acc;
}

std::vector<std::pair<unsigned, Poly>> homogeneous_parts(const Poly& p) {
  std::vector<std::pair<unsigned, Poly>> out;
  for (const auto& [m, c] : p.terms()) {
    if (out.empty() || out.back().first != m.degree()) out.emplace_back(m.degree(), Poly());
    out.back().second += Poly::term(c, m);
  }
  return out;
}

std::optional<Poly> try_divide(const Poly& p, const Poly& d) {
  if (d.is_zero()) throw InvalidArgument("try_divide: zero divisor");
  const auto& [lm, lc] = d.leading();
  Poly rem = p;
  Poly quot;
  while (!rem.is_zero()) {
    const auto& [rm, rc] = rem.leading();
    if (!lm.divides(rm)) return std::nullopt;
    const Monomial qm{rm.ex - lm.ex, rm.ey - lm.ey, rm.ez - lm.ez};
    const Poly t = Poly::term(rc / lc, qm);
    quot += t;
    rem -= t * d;
  }
  return quot;
}

Rational evaluate(const Poly& p, const std::array<Rational, 3>& at) {
  Rational acc;
  for (const auto& [m, c] : p.terms())
    acc += c * pow(at[0], m.ex) * pow(at[1], m.ey) * pow(at[2], m.ez);
  return acc;
}

double evaluate_f(const Poly& p, const std::array<double, 3>& at) {
  double acc = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double t = c.to_double();
    for (std::uint32_t i = 0; i < m.ex; ++i) t *= at[0];
    for (std::uint32_t i = 0; i < m.ey; ++i) t *= at[1];
    for (std::uint32_t i = 0; i < m.ez; ++i) t *= at[2];
    acc += t;
  }
  return acc;
}

Poly Cofactor::to_poly() const {
  return Poly(b0) + scale(Poly::var(Var::x), b1) + scale(Poly::var(Var::y), b2) +
         scale(Poly::var(Var::z), b3);
}

Cofactor Cofactor::from_poly(const Poly& p) {
  if (p.degree() > 1) throw InvalidArgument("cofactor must have degree <= 1, got '" + p.str() + "'");
  return {p.coeff({0, 0, 0}), p.coeff({1, 0, 0}), p.coeff({0, 1, 0}), p.coeff({0, 0, 1})};
}

}  // namespace darbouxkit
