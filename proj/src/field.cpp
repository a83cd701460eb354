#include "darbouxkit/field.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "darbouxkit/errors.hpp"

namespace darbouxkit {

int FieldDef::degree() const { return std::max({fx.degree(), fy.degree(), fz.degree()}); }

FieldDef build_hsa(const HsaParams& p) {
  const Poly x = Poly::var(Var::x), y = Poly::var(Var::y), z = Poly::var(Var::z);
  FieldDef f;
  f.fx = x * (y - Poly(1)) - scale(z, p.beta);
  f.fy = scale(Poly(1) - x * x, p.alpha) - scale(y, p.kappa);
  f.fz = x - scale(z, p.lambda);
  f.params = {{"alpha", p.alpha}, {"beta", p.beta}, {"kappa", p.kappa}, {"lambda", p.lambda}};
  f.label = "hsa";
  f.hsa = p;
  return f;
}

Poly lie_derivative(const FieldDef& f, const Poly& h) {
  return f.fx * partial_derivative(h, Var::x) + f.fy * partial_derivative(h, Var::y) +
         f.fz * partial_derivative(h, Var::z);
}

namespace {

constexpr unsigned kMaxExponent = 64;

class Parser {
 public:
  Parser(std::string_view text, const Bindings& bindings) : s_(text), bindings_(bindings) {}

  Poly parse() {
    Poly p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail(ParseErrorKind::syntax, "unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(ParseErrorKind kind, const std::string& what) const {
    throw ParseError(kind, pos_, what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly acc = term();
    while (true) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  Poly term() {
    Poly acc = unary();
    while (true) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        const Poly d = unary();
        if (!d.is_constant()) {
          pos_ = at;
          fail(ParseErrorKind::non_polynomial, "division by a non-constant expression");
        }
        if (d.is_zero()) {
          pos_ = at;
          fail(ParseErrorKind::syntax, "division by zero");
        }
        acc = scale(acc, Rational(1) / d.coeff({}));
      } else {
        return acc;
      }
    }
  }

  Poly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Poly power() {
    Poly base = primary();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    const Poly e = unary_exponent();
    if (!e.is_constant()) {
      pos_ = at;
      fail(ParseErrorKind::non_polynomial, "non-constant exponent");
    }
    const Rational v = e.coeff({});
    if (!v.is_integer() || v.sign() < 0) {
      pos_ = at;
      fail(ParseErrorKind::non_polynomial, "exponent must be a nonnegative integer, got " + v.str());
    }
    if (v > Rational(static_cast<long>(kMaxExponent))) {
      pos_ = at;
      fail(ParseErrorKind::syntax, "exponent exceeds " + std::to_string(kMaxExponent));
    }
    return pow(base, static_cast<unsigned>(v.numerator().get_ui()));
  }

  // Exponent: signed power (right associative), e.g. x^-1 is rejected later as negative.
  Poly unary_exponent() {
    if (accept('-')) return -unary_exponent();
    if (accept('+')) return unary_exponent();
    return power();
  }

  Poly primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail(ParseErrorKind::syntax, "unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Poly inner = expr();
      if (!accept(')')) fail(ParseErrorKind::syntax, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E')) {
        fail(ParseErrorKind::syntax, "decimal literals are not exact; use p/q");
      }
      return Poly(Rational(mpz_class(std::string(s_.substr(start, pos_ - start)), 10)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      if (name == "x") return Poly::var(Var::x);
      if (name == "y") return Poly::var(Var::y);
      if (name == "z") return Poly::var(Var::z);
      auto it = bindings_.find(name);
      if (it == bindings_.end()) {
        pos_ = start;
        fail(ParseErrorKind::unknown_identifier, "unknown identifier '" + name + "'");
      }
      return Poly(it->second);
    }
    fail(ParseErrorKind::syntax, "unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  const Bindings& bindings_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool reserved(const std::string& name) { return name == "x" || name == "y" || name == "z"; }

}  // namespace

Poly parse_poly(std::string_view text, const Bindings& bindings) {
  for (const auto& [name, v] : bindings)
    if (reserved(name)) throw InvalidArgument("parameter name '" + name + "' shadows a variable");
  return Parser(text, bindings).parse();
}

FieldDef parse_field(std::string_view text, const Bindings& bindings, std::string label) {
  Bindings params = bindings;
  std::map<std::string, std::pair<std::string, std::size_t>> components;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected '='");
    std::string_view lhs = trim(line.substr(0, eq));
    std::string_view rhs = trim(line.substr(eq + 1));
    if (lhs.substr(0, 6) == "param " || lhs.substr(0, 6) == "param\t") {
      const std::string name(trim(lhs.substr(6)));
      if (name.empty() || reserved(name))
        throw InvalidArgument("line " + std::to_string(line_no) + ": bad parameter name '" + name + "'");
      if (params.count(name) != 0)
        throw InvalidArgument("line " + std::to_string(line_no) + ": parameter '" + name + "' bound twice");
      params.emplace(name, Rational::parse(rhs));
    } else if (lhs == "dx" || lhs == "dy" || lhs == "dz") {
      if (!components.emplace(std::string(lhs), std::make_pair(std::string(rhs), line_no)).second)
        throw InvalidArgument("line " + std::to_string(line_no) + ": duplicate '" + std::string(lhs) + "'");
    } else {
      throw InvalidArgument("line " + std::to_string(line_no) + ": unknown left-hand side '" +
                            std::string(lhs) + "'");
    }
    if (end == text.size()) break;
  }
  FieldDef f;
  for (const char* name : {"dx", "dy", "dz"}) {
    auto it = components.find(name);
    if (it == components.end()) throw InvalidArgument(std::string("field file is missing '") + name + "'");
    Poly p;
    try {
      p = parse_poly(it->second.first, params);
    } catch (const ParseError& e) {
      throw ParseError(e.kind, e.position,
                       "line " + std::to_string(it->second.second) + " (" + name + "): " + e.detail);
    }
    if (name[1] == 'x') f.fx = p;
    if (name[1] == 'y') f.fy = p;
    if (name[1] == 'z') f.fz = p;
  }
  f.params = params;
  f.label = std::move(label);
  return f;
}

std::string render_field(const FieldDef& f) {
  std::ostringstream os;
  for (const auto& [name, v] : f.params) os << "param " << name << " = " << v.str() << '\n';
  os << "dx = " << f.fx.str() << '\n';
  os << "dy = " << f.fy.str() << '\n';
  os << "dz = " << f.fz.str() << '\n';
  return os.str();
}

}  // namespace darbouxkit
