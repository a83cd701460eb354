#include "darbouxkit/darboux.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <thread>

#include "darbouxkit/errors.hpp"

namespace darbouxkit {

namespace {

const std::array<Monomial, 4> kCofactorBasis = {Monomial{0, 0, 0}, Monomial{1, 0, 0}, Monomial{0, 1, 0},
                                                 Monomial{0, 0, 1}};
const char* const kSlotNames[4] = {"b0", "b1", "b2", "b3"};

std::map<Monomial, std::size_t> index_of(const std::vector<Monomial>& ms) {
  std::map<Monomial, std::size_t> idx;
  for (std::size_t i = 0; i < ms.size(); ++i) idx.emplace(ms[i], i);
  return idx;
}

unsigned field_degree(const FieldDef& f) { return static_cast<unsigned>(std::max(f.degree(), 1)); }

// Target space for X(h) - K h when deg h <= n.
unsigned image_degree(const FieldDef& f, unsigned n) { return std::max(n + 1, n + field_degree(f) - 1); }

void put_column(QMatrix& m, std::size_t col, const Poly& p, const std::map<Monomial, std::size_t>& rows) {
  for (const auto& [mono, c] : p.terms()) {
    auto it = rows.find(mono);
    if (it == rows.end()) throw Error("internal: image monomial outside the target space");
    m(it->second, col) = c;
  }
}

Poly from_vector(const QVector& v, const std::vector<Monomial>& ms, std::size_t offset = 0) {
  Poly::Terms terms;
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (!v[offset + i].is_zero()) terms.emplace(ms[i], v[offset + i]);
  return Poly::from_terms(terms);
}

Cofactor cofactor_from(const std::array<Rational, 4>& b) { return {b[0], b[1], b[2], b[3]}; }

std::string rational_list(const std::vector<Rational>& vs) {
  std::string s = "{";
  for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? ", " : "") + vs[i].str();
  return s + "}";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

bool is_product_of(const Poly& h, const std::vector<Poly>& earlier) {
  for (const Poly& d : earlier) {
    if (d.is_constant()) continue;
    auto q = try_divide(h, d);
    if (!q) continue;
    if (q->is_constant() || is_product_of(*q, earlier)) return true;
  }
  return false;
}

void sort_by_degree(std::vector<DarbouxCert>& certs) {
  std::stable_sort(certs.begin(), certs.end(),
                   [](const DarbouxCert& a, const DarbouxCert& b) { return a.body.degree() < b.body.degree(); });
}

std::string cell_label(const std::array<std::optional<Rational>, 4>& a) {
  std::string s;
  for (int i = 0; i < 4; ++i) {
    if (!s.empty()) s += ", ";
    s += std::string(kSlotNames[i]) + "=" + (a[i] ? a[i]->str() : "t");
  }
  return s;
}

}  // namespace

CofactorTemplate CofactorTemplate::default_for(unsigned bound) {
  std::vector<Rational> range;
  for (long v = -static_cast<long>(bound); v <= static_cast<long>(bound); ++v) range.emplace_back(v);
  return {{CofactorSlot::eigen(), CofactorSlot::fixed(0), CofactorSlot::enumerate(range), CofactorSlot::fixed(0)}};
}

CofactorTemplate CofactorTemplate::full_grid(const std::vector<Rational>& grid) {
  return {{CofactorSlot::eigen(), CofactorSlot::enumerate(grid), CofactorSlot::enumerate(grid),
           CofactorSlot::enumerate(grid)}};
}

bool CofactorTemplate::is_default_for(unsigned bound) const {
  CofactorTemplate d = default_for(bound);
  for (int i = 0; i < 4; ++i) {
    const CofactorSlot& a = slots[i];
    const CofactorSlot& b = d.slots[i];
    if (a.mode != b.mode) return false;
    if (a.mode == CofactorSlot::Mode::fixed && a.value != b.value) return false;
    if (a.mode == CofactorSlot::Mode::enumerate && a.values != b.values) return false;
  }
  return true;
}

std::string CofactorTemplate::describe() const {
  std::string s;
  for (int i = 0; i < 4; ++i) {
    if (!s.empty()) s += ", ";
    const CofactorSlot& sl = slots[i];
    switch (sl.mode) {
      case CofactorSlot::Mode::fixed: s += std::string(kSlotNames[i]) + " = " + sl.value.str(); break;
      case CofactorSlot::Mode::eigen: s += std::string(kSlotNames[i]) + " = t (eigen)"; break;
      case CofactorSlot::Mode::enumerate: s += std::string(kSlotNames[i]) + " in " + rational_list(sl.values); break;
    }
  }
  return s;
}

bool verify_cofactor(const FieldDef& f, const Poly& h, const Cofactor& k) {
  if (h.is_zero()) throw InvalidArgument("verify_cofactor: h must be nonzero");
  return lie_derivative(f, h) == k.to_poly() * h;
}

bool verify_exp_factor(const FieldDef& f, const Poly& g, const Cofactor& l) { return lie_derivative(f, g) == l.to_poly(); }

bool verify_exp_factor_rational(const FieldDef& f, const Poly& g, const Poly& h, unsigned n, const Cofactor& l) {
  if (h.is_zero()) throw InvalidArgument("verify_exp_factor_rational: denominator must be nonzero");
  Poly lhs = h * lie_derivative(f, g) - scale(g * lie_derivative(f, h), Rational(static_cast<long>(n)));
  return lhs == l.to_poly() * pow(h, n + 1);
}

QMatrix darboux_operator(const FieldDef& f, const Poly& k, unsigned n) {
  const auto cols = monomials_up_to(n);
  const auto rows = monomials_up_to(image_degree(f, n));
  const auto ridx = index_of(rows);
  QMatrix m(rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    Poly h = Poly::term(1, cols[j]);
    put_column(m, j, lie_derivative(f, h) - k * h, ridx);
  }
  return m;
}

std::vector<Poly> search_darboux_fixed(const FieldDef& f, const Cofactor& k, unsigned degree_bound) {
  if (degree_bound < 1) throw InvalidArgument("degree bound must be >= 1");
  QMatrix full = darboux_operator(f, k.to_poly(), degree_bound);
  auto monos = monomials_up_to(degree_bound);
  // K = 0: constants are trivially in the kernel, search their complement.
  const std::size_t skip = k.is_zero() ? 1 : 0;
  QMatrix m(full.rows(), full.cols() - skip);
  for (std::size_t r = 0; r < full.rows(); ++r)
    for (std::size_t c = skip; c < full.cols(); ++c) m(r, c - skip) = full(r, c);
  monos.erase(monos.begin(), monos.begin() + static_cast<std::ptrdiff_t>(skip));

  std::vector<Poly> out;
  for (const QVector& v : canonical_basis(null_space(m))) out.push_back(from_vector(v, monos));
  std::stable_sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) { return a.degree() < b.degree(); });
  return out;
}

std::vector<DarbouxCert> search_exp_factors(const FieldDef& f, unsigned degree_bound) {
  if (degree_bound < 1) throw InvalidArgument("degree bound must be >= 1");
  auto gmonos = monomials_up_to(degree_bound);
  gmonos.erase(gmonos.begin());  // g modulo constants
  const auto rows = monomials_up_to(image_degree(f, degree_bound));
  const auto ridx = index_of(rows);
  QMatrix m(rows.size(), gmonos.size() + 4);
  for (std::size_t j = 0; j < gmonos.size(); ++j) put_column(m, j, lie_derivative(f, Poly::term(1, gmonos[j])), ridx);
  for (std::size_t i = 0; i < 4; ++i) put_column(m, gmonos.size() + i, Poly::term(-1, kCofactorBasis[i]), ridx);

  std::vector<DarbouxCert> out;
  for (const QVector& v : canonical_basis(null_space(m))) {
    Poly g = from_vector(v, gmonos);
    if (g.is_zero()) continue;  // (0, L) forces L = 0
    Cofactor l = cofactor_from({v[gmonos.size()], v[gmonos.size() + 1], v[gmonos.size() + 2], v[gmonos.size() + 3]});
    if (!verify_exp_factor(f, g, l)) throw Error("internal: exp-factor certificate failed verification");
    out.push_back({CertKind::exp_factor, g, l, degree_bound, true});
  }
  sort_by_degree(out);
  return out;
}

PencilSearchResult search_darboux_pencil(const FieldDef& f, const CofactorTemplate& tmpl, unsigned degree_bound,
                                         std::uint64_t seed) {
  if (degree_bound < 1) throw InvalidArgument("degree bound must be >= 1");
  int eigen = -1;
  for (int i = 0; i < 4; ++i)
    if (tmpl.slots[i].mode == CofactorSlot::Mode::eigen) {
      if (eigen >= 0) throw InvalidArgument("cofactor template must have exactly one eigen slot");
      eigen = i;
    }
  if (eigen < 0) throw InvalidArgument("cofactor template must have exactly one eigen slot");
  for (const CofactorSlot& s : tmpl.slots)
    if (s.mode == CofactorSlot::Mode::enumerate && s.values.empty())
      throw InvalidArgument("cofactor template: enumerated slot with no values");

  // Cartesian product of the enumerated slots, first slot varying slowest.
  std::vector<std::array<std::optional<Rational>, 4>> assignments(1);
  for (int i = 0; i < 4; ++i) {
    const CofactorSlot& s = tmpl.slots[i];
    if (s.mode == CofactorSlot::Mode::eigen) continue;
    std::vector<std::array<std::optional<Rational>, 4>> next;
    const std::vector<Rational> vals = s.mode == CofactorSlot::Mode::fixed ? std::vector<Rational>{s.value} : s.values;
    for (const auto& a : assignments)
      for (const Rational& v : vals) {
        auto b = a;
        b[i] = v;
        next.push_back(b);
      }
    assignments = std::move(next);
  }

  const auto cols = monomials_up_to(degree_bound);
  const auto rows = monomials_up_to(image_degree(f, degree_bound));
  const auto ridx = index_of(rows);
  QMatrix b(rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) put_column(b, j, Poly::term(-1, cols[j] * kCofactorBasis[eigen]), ridx);

  struct CellOutput {
    PencilCell cell;
    std::vector<DarbouxCert> certs;
    std::vector<std::string> notes;
  };
  std::vector<CellOutput> results(assignments.size());

  auto run_cell = [&](std::size_t ci) {
    const auto& a = assignments[ci];
    Poly kfixed;
    for (int i = 0; i < 4; ++i)
      if (a[i]) kfixed += Poly::term(*a[i], kCofactorBasis[i]);
    PencilMatrix p(darboux_operator(f, kfixed, degree_bound), b);
    CellOutput& out = results[ci];
    out.cell.assignment = a;
    out.cell.drop = pencil_rank_drop(p, splitmix64(seed ^ splitmix64(ci)));
    const RankDropResult& d = out.cell.drop;
    if (d.parametric) {
      out.notes.push_back("parametric family: the pencil at " + cell_label(a) + " is rank deficient for every t (" +
                          "generic rank " + std::to_string(d.generic_rank) + " < " + std::to_string(cols.size()) +
                          "); not enumerated");
      return;
    }
    if (d.residual.degree() > 0)
      out.notes.push_back("unresolved rank-drop values at " + cell_label(a) + ": roots of " + d.residual.str() +
                          " are irrational or complex and were not searched");
    for (const Rational& t0 : d.candidates) {
      std::array<Rational, 4> k;
      for (int i = 0; i < 4; ++i) k[i] = a[i] ? *a[i] : t0;
      Cofactor kc = cofactor_from(k);
      for (const Poly& h : search_darboux_fixed(f, kc, degree_bound)) {
        if (!verify_cofactor(f, h, kc)) throw Error("internal: Darboux certificate failed verification");
        out.certs.push_back({CertKind::polynomial, h, kc, degree_bound, true});
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), assignments.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t ci; (ci = next.fetch_add(1)) < assignments.size();) run_cell(ci);
      } catch (...) {
        errors[w] = std::current_exception();
        next = assignments.size();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  PencilSearchResult res;
  for (CellOutput& c : results) {
    res.cells.push_back(std::move(c.cell));
    for (auto& n : c.notes) res.notes.push_back(std::move(n));
    for (auto& cert : c.certs) {
      bool dup = std::any_of(res.certificates.begin(), res.certificates.end(),
                             [&](const DarbouxCert& o) { return o.body == cert.body; });
      if (!dup) res.certificates.push_back(std::move(cert));
    }
  }
  sort_by_degree(res.certificates);
  mark_primitive(res.certificates);
  return res;
}

void mark_primitive(std::vector<DarbouxCert>& certs) {
  std::vector<Poly> earlier;
  for (DarbouxCert& c : certs) {
    c.primitive = !c.body.is_constant() && !is_product_of(c.body, earlier);
    earlier.push_back(c.body);
  }
}

std::vector<CombinationSolution> combine_cofactors(const FieldDef& f, const std::vector<DarbouxCert>& certs) {
  if (certs.empty()) throw InvalidArgument("combine_cofactors: no certificates");
  QMatrix m(4, certs.size());
  for (std::size_t j = 0; j < certs.size(); ++j) {
    const DarbouxCert& c = certs[j];
    bool ok = c.kind == CertKind::polynomial ? !c.body.is_zero() && verify_cofactor(f, c.body, c.cofactor)
                                             : verify_exp_factor(f, c.body, c.cofactor);
    if (!ok) throw InvalidArgument("combine_cofactors: certificate " + std::to_string(j) + " does not verify");
    auto b = c.cofactor.coords();
    for (std::size_t i = 0; i < 4; ++i) m(i, j) = b[i];
  }
  std::vector<CombinationSolution> out;
  for (QVector& v : canonical_basis(null_space(m))) out.push_back({std::move(v), false});
  if (out.empty()) out.push_back({QVector(certs.size()), true});
  return out;
}

Poly lie_derivative_log_combination(const FieldDef& f, const std::vector<LogTerm>& terms) {
  std::vector<const Poly*> bases;
  for (const LogTerm& t : terms)
    if (t.form == TermForm::log) {
      if (t.base.is_zero()) throw InvalidArgument("log term with zero base");
      bases.push_back(&t.base);
    }
  Poly n;
  Poly plain;
  std::size_t li = 0;
  for (const LogTerm& t : terms) {
    if (t.weight.is_zero()) {
      if (t.form == TermForm::log) ++li;
      continue;
    }
    if (t.form == TermForm::plain) {
      plain += scale(lie_derivative(f, t.base), t.weight);
      continue;
    }
    Poly term = scale(lie_derivative(f, t.base), t.weight);
    for (std::size_t j = 0; j < bases.size(); ++j)
      if (j != li) term *= *bases[j];
    n += term;
    ++li;
  }
  for (const Poly* b : bases) plain *= *b;
  return n + plain;
}

std::vector<LogTerm> combination_terms(const std::vector<DarbouxCert>& certs, const CombinationSolution& s) {
  if (s.weights.size() != certs.size()) throw InvalidArgument("combination weights do not match certificates");
  std::vector<LogTerm> terms;
  for (std::size_t i = 0; i < certs.size(); ++i)
    terms.push_back({s.weights[i], certs[i].body,
                     certs[i].kind == CertKind::polynomial ? TermForm::log : TermForm::plain});
  return terms;
}

Verdict analyze(const FieldDef& f, unsigned degree_bound, const AnalyzeOptions& options) {
  if (degree_bound < 1) throw InvalidArgument("degree bound must be >= 1");
  if (degree_bound > kMaxDegreeBound)
    throw InvalidArgument("degree bound " + std::to_string(degree_bound) + " exceeds the cap of " +
                          std::to_string(kMaxDegreeBound));
  Verdict v;
  v.model = f;
  v.degree_bound = degree_bound;
  v.seed = options.seed;

  if (f.is_zero()) {
    v.template_description = "none (zero field)";
    for (Var var : {Var::x, Var::y, Var::z})
      v.darboux_polys.push_back({CertKind::polynomial, Poly::var(var), Cofactor{}, degree_bound, true});
    v.combined = v.darboux_polys;
    for (std::size_t i = 0; i < 3; ++i) {
      QVector w(3);
      w[i] = 1;
      v.combinations.push_back({w, false});
    }
    v.conclusion = Conclusion::darboux_integral_found;
    v.notes.push_back("zero vector field: every polynomial is a first integral; search skipped");
    return v;
  }

  const CofactorTemplate tmpl = options.cofactor_template.value_or(CofactorTemplate::default_for(degree_bound));
  v.template_description = tmpl.describe();
  if (degree_bound >= 5)
    v.notes.push_back("degree bound " + std::to_string(degree_bound) +
                      ": exact pencils of this size are slow (minutes per cell)");
  const bool justified = f.hsa && f.hsa->alpha_nonzero() && tmpl.is_default_for(degree_bound);
  if (justified)
    v.notes.push_back("cofactor template: " + v.template_description + "; b1 = b3 = 0 holds for every HSA cofactor when alpha != 0");
  else
    v.notes.push_back("cofactor template: " + v.template_description +
                      "; outside the alpha != 0 HSA setting this template is not known to be complete, so Darboux polynomials with other cofactors may be missed");

  PencilSearchResult pencil = search_darboux_pencil(f, tmpl, degree_bound, options.seed);
  v.darboux_polys = std::move(pencil.certificates);
  v.cells = std::move(pencil.cells);
  for (auto& n : pencil.notes) v.notes.push_back(std::move(n));

  v.exp_factors = search_exp_factors(f, degree_bound);
  v.notes.push_back("exponential factors searched in the shape e^g with polynomial g of degree <= " +
                    std::to_string(degree_bound));

  for (const DarbouxCert& c : v.darboux_polys)
    if (c.primitive) v.combined.push_back(c);
  for (const DarbouxCert& c : v.exp_factors) v.combined.push_back(c);

  if (!v.combined.empty()) v.combinations = combine_cofactors(f, v.combined);
  bool found = false;
  for (const CombinationSolution& s : v.combinations) {
    if (s.trivial) continue;
    if (!lie_derivative_log_combination(f, combination_terms(v.combined, s)).is_zero())
      throw Error("internal: combination failed symbolic certification");
    found = true;
  }
  v.conclusion = found ? Conclusion::darboux_integral_found : Conclusion::none_up_to_bound;
  if (found)
    v.notes.push_back("Darboux first integral found; each nontrivial combination has identically zero Lie derivative");
  else
    v.notes.push_back("no polynomial, rational or Darboux first integral built from factors of degree <= " +
                      std::to_string(degree_bound) +
                      " under this template (finite search up to the degree bound, not a proof of non-integrability)");
  return v;
}

}  // namespace darbouxkit
