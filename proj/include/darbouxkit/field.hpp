#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "darbouxkit/poly.hpp"

namespace darbouxkit {

using Bindings = std::map<std::string, Rational>;

/// Parameters of the Hide-Skeldon-Acheson dynamo
///   x' = x(y-1) - beta z,  y' = alpha(1-x^2) - kappa y,  z' = x - lambda z.
struct HsaParams {
  Rational alpha, beta, kappa, lambda;

  bool alpha_nonzero() const { return !alpha.is_zero(); }
  bool beta_zero() const { return beta.is_zero(); }
  bool kappa_nonzero() const { return !kappa.is_zero(); }
  /// alpha = -kappa (kappa - 1)
  bool on_integrable_curve() const { return alpha == -(kappa * (kappa - Rational(1))); }
  friend bool operator==(const HsaParams&, const HsaParams&) = default;
};

/// Polynomial vector field fx d/dx + fy d/dy + fz d/dz with bound parameters.
struct FieldDef {
  Poly fx, fy, fz;
  Bindings params;
  std::string label;
  /// Set when the field was produced by build_hsa.
  std::optional<HsaParams> hsa;

  bool is_zero() const { return fx.is_zero() && fy.is_zero() && fz.is_zero(); }
  int degree() const;
};

FieldDef build_hsa(const HsaParams& p);

/// X(h) = fx h_x + fy h_y + fz h_z.
Poly lie_derivative(const FieldDef& f, const Poly& h);

/// Parse one polynomial expression. Grammar: + - * / ^, parentheses, integer
/// literals, identifiers (x, y, z or a bound parameter). Division is allowed only
/// by nonzero constants; exponents must be constant nonnegative integers.
Poly parse_poly(std::string_view text, const Bindings& bindings = {});

/// Parse a field file: "dx = ...", "dy = ...", "dz = ..." lines, optional
/// "param <name> = <rational>" lines and '#' comments. `bindings` are merged with
/// the file's params (a name bound in both places is an error).
FieldDef parse_field(std::string_view text, const Bindings& bindings = {}, std::string label = "file");

/// Inverse of parse_field for the components and parameters.
std::string render_field(const FieldDef& f);

}  // namespace darbouxkit
