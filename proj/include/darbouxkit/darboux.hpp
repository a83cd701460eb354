#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "darbouxkit/field.hpp"
#include "darbouxkit/pencil.hpp"
#include "darbouxkit/poly.hpp"

namespace darbouxkit {

enum class CertKind { polynomial, exp_factor };

/// A Darboux polynomial h with X(h) = K h, or an exponential factor e^g with X(g) = L.
struct DarbouxCert {
  CertKind kind = CertKind::polynomial;
  Poly body;
  Cofactor cofactor;
  unsigned degree_bound_used = 0;
  /// False when body is an exact product of earlier certificates (or a constant exponent).
  bool primitive = true;
};

/// One cofactor coordinate: a fixed value, the pencil unknown t, or a finite list to loop over.
struct CofactorSlot {
  enum class Mode { fixed, eigen, enumerate };
  Mode mode = Mode::fixed;
  Rational value;
  std::vector<Rational> values;

  static CofactorSlot fixed(const Rational& v) { return {Mode::fixed, v, {}}; }
  static CofactorSlot eigen() { return {Mode::eigen, {}, {}}; }
  static CofactorSlot enumerate(std::vector<Rational> vs) { return {Mode::enumerate, {}, std::move(vs)}; }
};

/// Slots are indexed b0..b3 (coefficients of 1, x, y, z).
struct CofactorTemplate {
  std::array<CofactorSlot, 4> slots;

  /// b1 = b3 = 0, b2 enumerated over -bound..bound, b0 solved as the pencil eigenvalue.
  static CofactorTemplate default_for(unsigned bound);
  /// b0 eigen; b1, b2, b3 each enumerated over `grid` (no structural assumption).
  static CofactorTemplate full_grid(const std::vector<Rational>& grid);

  bool is_default_for(unsigned bound) const;
  std::string describe() const;
};

struct CombinationSolution {
  std::vector<Rational> weights;
  bool trivial = false;
};

enum class Conclusion { darboux_integral_found, none_up_to_bound };

/// One (enumerated assignment) pencil and its rank-drop analysis.
struct PencilCell {
  /// Value per slot; nullopt marks the eigen slot.
  std::array<std::optional<Rational>, 4> assignment;
  RankDropResult drop;
};

struct PencilSearchResult {
  std::vector<DarbouxCert> certificates;
  std::vector<PencilCell> cells;
  std::vector<std::string> notes;
};

struct Verdict {
  FieldDef model;
  unsigned degree_bound = 0;
  std::uint64_t seed = 0;
  std::string template_description;
  std::vector<DarbouxCert> darboux_polys;
  std::vector<DarbouxCert> exp_factors;
  /// Certificates the combination weights refer to (primitive Darboux polynomials, then exp factors).
  std::vector<DarbouxCert> combined;
  std::vector<CombinationSolution> combinations;
  Conclusion conclusion = Conclusion::none_up_to_bound;
  std::vector<std::string> notes;
  std::vector<PencilCell> cells;
};

inline constexpr unsigned kDefaultDegreeBound = 4;
inline constexpr unsigned kMaxDegreeBound = 6;

/// X(h) == K h exactly. Throws InvalidArgument for h = 0.
bool verify_cofactor(const FieldDef& f, const Poly& h, const Cofactor& k);
/// X(g) == L exactly (exponential factor e^g).
bool verify_exp_factor(const FieldDef& f, const Poly& g, const Cofactor& l);
/// X(g / h^n) == L, checked as h X(g) - n g X(h) == L h^(n+1). Verification only.
bool verify_exp_factor_rational(const FieldDef& f, const Poly& g, const Poly& h, unsigned n, const Cofactor& l);

/// Matrix of h -> X(h) - K h from the degree <= n space to degree <= n+1,
/// both indexed by monomials_up_to in ascending graded-lex order.
QMatrix darboux_operator(const FieldDef& f, const Poly& k, unsigned n);

std::vector<Poly> search_darboux_fixed(const FieldDef& f, const Cofactor& k, unsigned degree_bound);
std::vector<DarbouxCert> search_exp_factors(const FieldDef& f, unsigned degree_bound);
PencilSearchResult search_darboux_pencil(const FieldDef& f, const CofactorTemplate& tmpl, unsigned degree_bound,
                                         std::uint64_t seed = 1);

std::vector<CombinationSolution> combine_cofactors(const FieldDef& f, const std::vector<DarbouxCert>& certs);

enum class TermForm { log, plain };
struct LogTerm {
  Rational weight;
  Poly base;
  TermForm form = TermForm::log;
};

/// Numerator N of d/dt sum(w log p | w q) = N / prod(log bases).
Poly lie_derivative_log_combination(const FieldDef& f, const std::vector<LogTerm>& terms);
/// Terms of the first integral encoded by a combination over `certs`.
std::vector<LogTerm> combination_terms(const std::vector<DarbouxCert>& certs, const CombinationSolution& s);

struct AnalyzeOptions {
  std::uint64_t seed = 1;
  std::optional<CofactorTemplate> cofactor_template;
};

Verdict analyze(const FieldDef& f, unsigned degree_bound, const AnalyzeOptions& options = {});

/// Sets `primitive` on each certificate (in order) by trial division against the earlier ones.
void mark_primitive(std::vector<DarbouxCert>& certs);

}  // namespace darbouxkit
