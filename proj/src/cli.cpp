#include "darbouxkit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "darbouxkit/darboux.hpp"
#include "darbouxkit/errors.hpp"
#include "darbouxkit/numerics.hpp"

namespace darbouxkit {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string model;
  std::string alpha, beta, kappa, lambda;
  std::string field;
  std::vector<std::string> params;
  std::uint64_t seed = 1;
  std::string out;

  unsigned degree = kDefaultDegreeBound;
  std::string tmpl = "default";
  std::string grid = "-2,-1,0,1,2";
  std::string cofactor;
  std::vector<std::string> dp, ef;
  std::string poly, exp, denominator;
  unsigned power = 1;

  std::string x0;
  double t_end = 10;
  double h = 1e-3;
  double tolerance = 0;
  std::string csv;
  std::string integral, function;
  bool halving = false;
};

struct Model {
  FieldDef field;
  Bindings bindings;
  std::string source;
};

Rational flag_rational(const std::string& flag, const std::string& text) {
  try {
    return Rational::parse(text);
  } catch (const InvalidArgument&) {
    throw InvalidArgument(flag + ": malformed rational '" + text + "' (expected p/q or an integer)");
  }
}

Poly flag_poly(const std::string& flag, const std::string& text, const Bindings& b) {
  try {
    return parse_poly(text, b);
  } catch (const ParseError& e) {
    throw InvalidArgument(flag + ": " + e.what());
  }
}

Cofactor flag_cofactor(const std::string& flag, const std::string& text, const Bindings& b) {
  Poly p = flag_poly(flag, text, b);
  if (p.degree() > 1) throw InvalidArgument(flag + ": cofactor '" + text + "' has degree > 1");
  return Cofactor::from_poly(p);
}

Model resolve_model(const Options& o) {
  const bool any_flag = !o.alpha.empty() || !o.beta.empty() || !o.kappa.empty() || !o.lambda.empty();
  if (!o.model.empty() && !o.field.empty()) throw InvalidArgument("model: give either 'hsa' or --field, not both");
  if (!o.field.empty() && any_flag) throw InvalidArgument("--field: conflicts with --alpha/--beta/--kappa/--lambda");
  Model m;
  if (o.model == "hsa") {
    if (!o.params.empty()) throw InvalidArgument("--param: only valid with --field");
    const std::pair<const char*, const std::string*> flags[] = {
        {"--alpha", &o.alpha}, {"--beta", &o.beta}, {"--kappa", &o.kappa}, {"--lambda", &o.lambda}};
    for (const auto& [name, value] : flags)
      if (value->empty()) throw InvalidArgument(std::string(name) + ": required for the hsa model");
    HsaParams p{flag_rational("--alpha", o.alpha), flag_rational("--beta", o.beta), flag_rational("--kappa", o.kappa),
                flag_rational("--lambda", o.lambda)};
    m.field = build_hsa(p);
    m.bindings = m.field.params;
    m.source = "hsa";
    return m;
  }
  if (!o.model.empty()) throw InvalidArgument("model: unknown model '" + o.model + "' (expected hsa)");
  if (o.field.empty())
    throw InvalidArgument("model: missing; give 'hsa' with --alpha/--beta/--kappa/--lambda, or --field PATH");
  if (any_flag) throw InvalidArgument("--alpha/--beta/--kappa/--lambda: only valid with the hsa model");
  std::ifstream in(o.field);
  if (!in) throw InvalidArgument("--field: cannot read '" + o.field + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Bindings b;
  for (const std::string& pv : o.params) {
    auto eq = pv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--param: expected name=value, got '" + pv + "'");
    std::string name = pv.substr(0, eq);
    if (!b.emplace(name, flag_rational("--param " + name, pv.substr(eq + 1))).second)
      throw InvalidArgument("--param: '" + name + "' given twice");
  }
  try {
    m.field = parse_field(ss.str(), b, o.field);
  } catch (const ParseError& e) {
    throw InvalidArgument("--field " + o.field + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("--field " + o.field + ": " + e.what());
  }
  m.bindings = m.field.params;
  m.source = "file";
  return m;
}

Json poly_json(const Poly& p) {
  Json terms = Json::object();
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) terms[it->first.key()] = it->second.str();
  return Json{{"terms", terms}, {"text", p.str()}};
}

Json cofactor_json(const Cofactor& k) {
  return Json{{"b0", k.b0.str()}, {"b1", k.b1.str()}, {"b2", k.b2.str()}, {"b3", k.b3.str()}, {"text", k.to_poly().str()}};
}

Json cert_json(const DarbouxCert& c) {
  return Json{{"kind", c.kind == CertKind::polynomial ? "polynomial" : "exp_factor"},
              {"body", poly_json(c.body)},
              {"cofactor", cofactor_json(c.cofactor)},
              {"degree_bound_used", c.degree_bound_used},
              {"primitive", c.primitive}};
}

Json certs_json(const std::vector<DarbouxCert>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back(cert_json(c));
  return a;
}

std::string weight_prefix(const Rational& w) {
  if (w == Rational(1)) return "";
  if (w == Rational(-1)) return "-";
  return w.str() + "*";
}

std::string combination_text(const std::vector<LogTerm>& terms) {
  std::string s;
  for (const LogTerm& t : terms) {
    if (t.weight.is_zero()) continue;
    if (!s.empty()) s += " + ";
    s += weight_prefix(t.weight) + (t.form == TermForm::log ? "log(" : "(") + t.base.str() + ")";
  }
  return s.empty() ? "0" : s;
}

Json combos_json(const FieldDef& f, const std::vector<DarbouxCert>& certs, const std::vector<CombinationSolution>& sols) {
  Json a = Json::array();
  for (const auto& s : sols) {
    Json w = Json::array();
    for (const auto& r : s.weights) w.push_back(r.str());
    Json j{{"weights", w}, {"trivial", s.trivial}};
    if (!s.trivial) {
      auto terms = combination_terms(certs, s);
      j["log_first_integral"] = combination_text(terms);
      j["lie_derivative_numerator"] = poly_json(lie_derivative_log_combination(f, terms));
    }
    a.push_back(j);
  }
  return a;
}

Json model_json(const Model& m) {
  Json params = Json::object();
  for (const auto& [k, v] : m.field.params) params[k] = v.str();
  return Json{{"source", m.source},
              {"label", m.field.label},
              {"params", params},
              {"dx", poly_json(m.field.fx)},
              {"dy", poly_json(m.field.fy)},
              {"dz", poly_json(m.field.fz)},
              {"text", render_field(m.field)}};
}

Json real_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json drift_json(const DriftReport& r) {
  Json j{{"integral", integral_name(r.spec.which)},
         {"initial_value", real_json(r.initial_value)},
         {"max_abs_drift", real_json(r.max_abs_drift)},
         {"relative_drift", real_json(r.relative_drift)},
         {"window", Json::array({r.t0, r.t1})},
         {"samples", r.samples}};
  j["domain_violation"] =
      r.domain_violation ? Json{{"time", r.domain_violation->time}, {"reason", r.domain_violation->reason}} : Json(nullptr);
  return j;
}

std::array<double, 3> parse_x0(const std::string& s) {
  if (s.empty()) throw InvalidArgument("--x0: required (x,y,z)");
  std::array<double, 3> v{};
  std::stringstream ss(s);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, ',')) {
    if (i == 3) throw InvalidArgument("--x0: expected three comma-separated numbers");
    char* end = nullptr;
    v[i] = std::strtod(part.c_str(), &end);
    if (part.empty() || *end != '\0' || !std::isfinite(v[i]))
      throw InvalidArgument("--x0: malformed number '" + part + "'");
    ++i;
  }
  if (i != 3) throw InvalidArgument("--x0: expected three comma-separated numbers");
  return v;
}

std::vector<Rational> parse_grid(const std::string& s) {
  std::vector<Rational> g;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) g.push_back(flag_rational("--grid", part));
  if (g.empty()) throw InvalidArgument("--grid: empty");
  return g;
}

CofactorTemplate resolve_template(const Options& o) {
  if (o.tmpl == "default") return CofactorTemplate::default_for(o.degree);
  if (o.tmpl == "full-grid") return CofactorTemplate::full_grid(parse_grid(o.grid));
  throw InvalidArgument("--template: expected default or full-grid, got '" + o.tmpl + "'");
}

StepMode step_mode(const Options& o) {
  if (!(o.t_end > 0)) throw InvalidArgument("--t-end: must be > 0");
  if (o.tolerance > 0) return StepMode::adaptive(o.tolerance);
  if (o.tolerance < 0) throw InvalidArgument("--tolerance: must be > 0");
  if (!(o.h > 0)) throw InvalidArgument("--h: must be > 0");
  return StepMode::fixed(o.h);
}

Json step_json(const StepMode& m) {
  return m.kind == StepMode::Kind::fixed ? Json{{"mode", "fixed"}, {"h", m.value}}
                                         : Json{{"mode", "adaptive"}, {"tolerance", m.value}};
}

const HsaParams& require_hsa(const Model& m, const std::string& what) {
  if (!m.field.hsa) throw InvalidArgument(what + ": requires the builtin hsa model");
  return *m.field.hsa;
}

void check_degree(unsigned d) {
  if (d < 1 || d > kMaxDegreeBound)
    throw InvalidArgument("--degree: must be in 1.." + std::to_string(kMaxDegreeBound));
}

Json base_report(const std::string& command, const Options& o, const Model& m, Json config) {
  Json model_cfg = m.source == "hsa" ? Json{{"model", "hsa"},
                                            {"alpha", m.field.hsa->alpha.str()},
                                            {"beta", m.field.hsa->beta.str()},
                                            {"kappa", m.field.hsa->kappa.str()},
                                            {"lambda", m.field.hsa->lambda.str()}}
                                     : Json{{"field", o.field}, {"param", o.params}};
  Json cfg = model_cfg;
  for (auto& [k, v] : config.items()) cfg[k] = v;
  return Json{{"schema", 1},
              {"tool", "darbouxkit"},
              {"tool_version", kToolVersion},
              {"command", command},
              {"config", cfg},
              {"seed", o.seed},
              {"model", model_json(m)}};
}

Json cmd_analyze(const Options& o, const Model& m) {
  check_degree(o.degree);
  AnalyzeOptions ao;
  ao.seed = o.seed;
  ao.cofactor_template = resolve_template(o);
  Verdict v = analyze(m.field, o.degree, ao);
  Json rep = base_report("analyze", o, m, {{"degree", o.degree}, {"template", o.tmpl}, {"grid", o.tmpl == "full-grid" ? o.grid : ""}});
  rep["degree_bound"] = v.degree_bound;
  rep["template"] = v.template_description;
  rep["darboux_polys"] = certs_json(v.darboux_polys);
  rep["exp_factors"] = certs_json(v.exp_factors);
  rep["combination_basis"] = certs_json(v.combined);
  rep["combinations"] = combos_json(m.field, v.combined, v.combinations);
  rep["conclusion"] = v.conclusion == Conclusion::darboux_integral_found ? "darboux_integral_found" : "none_up_to_bound";
  rep["notes"] = v.notes;
  Json cells = Json::array();
  for (const PencilCell& c : v.cells) {
    Json a = Json::object();
    const char* names[4] = {"b0", "b1", "b2", "b3"};
    for (int i = 0; i < 4; ++i) a[names[i]] = c.assignment[i] ? c.assignment[i]->str() : "t";
    Json cand = Json::array();
    for (const auto& t : c.drop.candidates) cand.push_back(t.str());
    cells.push_back(Json{{"assignment", a},
                         {"generic_rank", c.drop.generic_rank},
                         {"parametric", c.drop.parametric},
                         {"candidates", cand},
                         {"minor_gcd", c.drop.minor_gcd.str()},
                         {"residual", c.drop.residual.str()},
                         {"minors_used", c.drop.minors_used},
                         {"stop_rule", c.drop.stop_rule}});
  }
  rep["pencil_cells"] = cells;
  return rep;
}

Json cmd_search_darboux(const Options& o, const Model& m) {
  check_degree(o.degree);
  if (!o.cofactor.empty()) {
    Cofactor k = flag_cofactor("--cofactor", o.cofactor, m.bindings);
    Json rep = base_report("search-darboux", o, m, {{"degree", o.degree}, {"cofactor", o.cofactor}});
    std::vector<DarbouxCert> certs;
    for (const Poly& h : search_darboux_fixed(m.field, k, o.degree))
      certs.push_back({CertKind::polynomial, h, k, o.degree, true});
    mark_primitive(certs);
    rep["mode"] = "fixed";
    rep["cofactor"] = cofactor_json(k);
    rep["certificates"] = certs_json(certs);
    return rep;
  }
  CofactorTemplate t = resolve_template(o);
  PencilSearchResult r = search_darboux_pencil(m.field, t, o.degree, o.seed);
  Json rep = base_report("search-darboux", o, m, {{"degree", o.degree}, {"template", o.tmpl}, {"grid", o.tmpl == "full-grid" ? o.grid : ""}});
  rep["mode"] = "pencil";
  rep["template"] = t.describe();
  rep["certificates"] = certs_json(r.certificates);
  rep["notes"] = r.notes;
  return rep;
}

Json cmd_search_exp(const Options& o, const Model& m) {
  check_degree(o.degree);
  Json rep = base_report("search-expfactors", o, m, {{"degree", o.degree}});
  rep["certificates"] = certs_json(search_exp_factors(m.field, o.degree));
  return rep;
}

std::pair<std::string, std::string> split_pair(const std::string& flag, const std::string& s) {
  auto semi = s.find(';');
  if (semi == std::string::npos) throw InvalidArgument(flag + ": expected 'body;cofactor', got '" + s + "'");
  return {s.substr(0, semi), s.substr(semi + 1)};
}

Json cmd_combine(const Options& o, const Model& m) {
  std::vector<DarbouxCert> certs;
  for (const auto& s : o.dp) {
    auto [b, k] = split_pair("--dp", s);
    Poly h = flag_poly("--dp", b, m.bindings);
    if (h.is_zero()) throw InvalidArgument("--dp: zero polynomial '" + b + "'");
    certs.push_back({CertKind::polynomial, h, flag_cofactor("--dp", k, m.bindings), 0, true});
  }
  for (const auto& s : o.ef) {
    auto [g, l] = split_pair("--ef", s);
    certs.push_back({CertKind::exp_factor, flag_poly("--ef", g, m.bindings), flag_cofactor("--ef", l, m.bindings), 0, true});
  }
  if (certs.empty()) throw InvalidArgument("--dp/--ef: at least one certificate is required");
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const auto& c = certs[i];
    bool ok = c.kind == CertKind::polynomial ? verify_cofactor(m.field, c.body, c.cofactor)
                                             : verify_exp_factor(m.field, c.body, c.cofactor);
    if (!ok)
      throw InvalidArgument(std::string(c.kind == CertKind::polynomial ? "--dp" : "--ef") + ": certificate '" +
                            c.body.str() + "' with cofactor '" + c.cofactor.to_poly().str() + "' does not verify");
  }
  Json rep = base_report("combine", o, m, {{"dp", o.dp}, {"ef", o.ef}});
  rep["certificates"] = certs_json(certs);
  auto sols = combine_cofactors(m.field, certs);
  rep["combinations"] = combos_json(m.field, certs, sols);
  bool found = std::any_of(sols.begin(), sols.end(), [](const CombinationSolution& s) { return !s.trivial; });
  rep["conclusion"] = found ? "darboux_integral_found" : "none_up_to_bound";
  return rep;
}

Json cmd_verify(const Options& o, const Model& m) {
  if (o.cofactor.empty()) throw InvalidArgument("--cofactor: required");
  if (o.poly.empty() == o.exp.empty()) throw InvalidArgument("--poly/--exp: give exactly one");
  if (!o.denominator.empty() && o.exp.empty()) throw InvalidArgument("--denominator: only valid with --exp");
  Cofactor k = flag_cofactor("--cofactor", o.cofactor, m.bindings);
  Json rep = base_report("verify", o, m,
                         {{"poly", o.poly}, {"exp", o.exp}, {"denominator", o.denominator}, {"power", o.power}, {"cofactor", o.cofactor}});
  bool ok = false;
  if (!o.poly.empty()) {
    Poly h = flag_poly("--poly", o.poly, m.bindings);
    if (h.is_zero()) throw InvalidArgument("--poly: must be nonzero");
    ok = verify_cofactor(m.field, h, k);
    rep["relation"] = "X(h) = K h";
    rep["h"] = poly_json(h);
    rep["lie_derivative"] = poly_json(lie_derivative(m.field, h));
  } else if (o.denominator.empty()) {
    Poly g = flag_poly("--exp", o.exp, m.bindings);
    ok = verify_exp_factor(m.field, g, k);
    rep["relation"] = "X(g) = L";
    rep["g"] = poly_json(g);
    rep["lie_derivative"] = poly_json(lie_derivative(m.field, g));
  } else {
    Poly g = flag_poly("--exp", o.exp, m.bindings);
    Poly h = flag_poly("--denominator", o.denominator, m.bindings);
    if (h.is_zero()) throw InvalidArgument("--denominator: must be nonzero");
    ok = verify_exp_factor_rational(m.field, g, h, o.power, k);
    rep["relation"] = "h X(g) - n g X(h) = L h^(n+1)";
    rep["g"] = poly_json(g);
    rep["h"] = poly_json(h);
    rep["n"] = o.power;
  }
  rep["cofactor"] = cofactor_json(k);
  rep["verified"] = ok;
  return rep;
}

Json traj_summary(const Trajectory& t) {
  const State& s = t.states.back();
  return Json{{"samples", t.states.size()},
              {"t_final", static_cast<double>(t.times.back())},
              {"final_state", Json::array({static_cast<double>(s[0]), static_cast<double>(s[1]), static_cast<double>(s[2])})},
              {"truncated", t.truncated},
              {"note", t.note}};
}

Json numeric_config(const Options& o, const StepMode& mode) {
  return Json{{"x0", o.x0}, {"t_end", o.t_end}, {"step", step_json(mode)}};
}

Json cmd_simulate(const Options& o, const Model& m) {
  StepMode mode = step_mode(o);
  auto x0 = parse_x0(o.x0);
  Trajectory t = integrate(m.field, x0, o.t_end, mode);
  Json cfg = numeric_config(o, mode);
  cfg["csv"] = o.csv;
  Json rep = base_report("simulate", o, m, cfg);
  rep["trajectory"] = traj_summary(t);
  if (!o.csv.empty()) {
    std::ofstream f(o.csv, std::ios::binary);
    if (!f) throw InvalidArgument("--csv: cannot write '" + o.csv + "'");
    f << trajectory_csv(t);
  }
  return rep;
}

IntegralSpec drift_spec(const Options& o, const Model& m) {
  if (o.integral.empty() == o.function.empty()) throw InvalidArgument("--integral/--function: give exactly one");
  IntegralSpec spec;
  if (!o.integral.empty()) {
    spec.which = parse_integral_name(o.integral);
    spec.params = require_hsa(m, "--integral");
  } else {
    spec.which = IntegralKind::log_combination;
    if (m.field.hsa) spec.params = *m.field.hsa;
    spec.terms = {{Rational(1), flag_poly("--function", o.function, m.bindings), TermForm::plain}};
  }
  return spec;
}

Json cmd_drift(const Options& o, const Model& m) {
  IntegralSpec spec = drift_spec(o, m);
  check_constraints(spec);
  StepMode mode = step_mode(o);
  auto x0 = parse_x0(o.x0);
  Json cfg = numeric_config(o, mode);
  cfg["integral"] = o.integral;
  cfg["function"] = o.function;
  cfg["halving"] = o.halving;
  Json rep = base_report("drift", o, m, cfg);
  if (o.halving) {
    if (mode.kind != StepMode::Kind::fixed) throw InvalidArgument("--halving: requires a fixed step (--h)");
    HalvingStudy st = step_halving_study(m.field, x0, spec, mode.value, o.t_end);
    rep["drift"] = drift_json(st.coarse);
    rep["halving"] = Json{{"h", mode.value}, {"fine", drift_json(st.fine)}, {"ratio", real_json(st.ratio)},
                          {"fourth_order_signature", st.ratio >= 8 && st.ratio <= 32}};
  } else {
    Trajectory t = integrate(m.field, x0, o.t_end, mode);
    rep["trajectory"] = traj_summary(t);
    rep["drift"] = drift_json(drift(t, spec));
  }
  return rep;
}

Json cmd_f2(const Options& o, const Model& m) {
  const HsaParams& p = require_hsa(m, "f2-experiment");
  StepMode mode = step_mode(o);
  if (mode.kind != StepMode::Kind::fixed) throw InvalidArgument("--tolerance: f2-experiment uses a fixed step (--h)");
  auto x0 = parse_x0(o.x0);
  F2Experiment ex = f2_experiment(p, x0, mode.value, o.t_end);
  Json rep = base_report("f2-experiment", o, m, numeric_config(o, mode));
  rep["window"] = Json{{"t0", 0.0}, {"t1", ex.t_window_end}, {"samples", ex.window_samples}};
  rep["c"] = ex.c;
  rep["tolerance"] = ex.tolerance;
  rep["reject_threshold"] = ex.reject_threshold;
  Json vs = Json::array();
  for (const auto& v : ex.variants) {
    const std::string u = v.variant == F2Variant::paper ? "x*w" : "w/x";
    vs.push_back(Json{{"variant", f2_variant_name(v.variant)},
                      {"exponent_integrand", u},
                      {"drift", drift_json(v.report)},
                      {"oracle", Json{{"dF2_dt", "lambda*z*v*(" + v.oracle_residual.str() + ")"},
                                      {"residual", poly_json(v.oracle_residual)},
                                      {"identically_zero", v.oracle_residual.is_zero() || p.lambda.is_zero()}}}});
  }
  rep["variants"] = vs;
  rep["winner"] = ex.winner ? Json(f2_variant_name(*ex.winner)) : Json(nullptr);
  rep["oracle_winner"] = ex.oracle_winner ? Json(f2_variant_name(*ex.oracle_winner)) : Json(nullptr);
  rep["agree"] = ex.winner.has_value() && ex.winner == ex.oracle_winner;
  return rep;
}

void add_model_options(CLI::App* sub, Options& o) {
  sub->add_option("model", o.model, "builtin model name (hsa)");
  sub->add_option("--alpha", o.alpha, "HSA alpha (p/q)");
  sub->add_option("--beta", o.beta, "HSA beta (p/q)");
  sub->add_option("--kappa", o.kappa, "HSA kappa (p/q)");
  sub->add_option("--lambda", o.lambda, "HSA lambda (p/q)");
  sub->add_option("--field", o.field, "field file");
  sub->add_option("--param", o.params, "field-file parameter name=p/q (repeatable)");
  sub->add_option("--seed", o.seed, "seed for randomized minor sampling");
  sub->add_option("--out", o.out, "write the JSON report here instead of stdout");
}

void add_numeric_options(CLI::App* sub, Options& o) {
  sub->add_option("--x0", o.x0, "initial state x,y,z");
  sub->add_option("--t-end", o.t_end, "integration end time");
  sub->add_option("--h", o.h, "fixed RK4 step");
  sub->add_option("--tolerance", o.tolerance, "adaptive Dormand-Prince tolerance (replaces --h)");
}

void add_search_options(CLI::App* sub, Options& o) {
  sub->add_option("--degree", o.degree, "degree bound (1..6)");
  sub->add_option("--template", o.tmpl, "cofactor template: default or full-grid");
  sub->add_option("--grid", o.grid, "values for b1, b2, b3 with --template full-grid");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Darboux integrability search and first-integral drift checks", "darbouxkit"};
  app.set_help_flag("--help", "print help");  // -h stays free for the step size
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto* analyze_cmd = app.add_subcommand("analyze", "full Darboux search and verdict");
  add_model_options(analyze_cmd, o);
  add_search_options(analyze_cmd, o);

  auto* sd = app.add_subcommand("search-darboux", "Darboux polynomials (pencil, or fixed cofactor)");
  add_model_options(sd, o);
  add_search_options(sd, o);
  sd->add_option("--cofactor", o.cofactor, "fixed cofactor; skips the pencil");

  auto* se = app.add_subcommand("search-expfactors", "exponential factors e^g");
  add_model_options(se, o);
  se->add_option("--degree", o.degree, "degree bound (1..6)");

  auto* cb = app.add_subcommand("combine", "solve the cofactor combination condition");
  add_model_options(cb, o);
  cb->add_option("--dp", o.dp, "Darboux polynomial 'h;K' (repeatable)");
  cb->add_option("--ef", o.ef, "exponential factor 'g;L' (repeatable)");

  auto* vf = app.add_subcommand("verify", "check a cofactor relation exactly");
  add_model_options(vf, o);
  vf->add_option("--poly", o.poly, "Darboux polynomial h");
  vf->add_option("--exp", o.exp, "exponent g of e^g (or e^(g/h^n))");
  vf->add_option("--denominator", o.denominator, "h in e^(g/h^n)");
  vf->add_option("--power", o.power, "n in e^(g/h^n)");
  vf->add_option("--cofactor", o.cofactor, "cofactor K or L");

  auto* sim = app.add_subcommand("simulate", "integrate a trajectory");
  add_model_options(sim, o);
  add_numeric_options(sim, o);
  sim->add_option("--csv", o.csv, "trajectory CSV path");

  auto* dr = app.add_subcommand("drift", "conservation drift of a closed-form integral");
  add_model_options(dr, o);
  add_numeric_options(dr, o);
  dr->add_option("--integral", o.integral, "F1, F2_paper, F2_corrected, F3 or F4");
  dr->add_option("--function", o.function, "any polynomial (negative control)");
  dr->add_flag("--halving", o.halving, "also run at h/2 and report the ratio");

  auto* f2 = app.add_subcommand("f2-experiment", "decide between the two F2 exponent variants");
  add_model_options(f2, o);
  add_numeric_options(f2, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    Model m = resolve_model(o);
    Json rep;
    const std::string name = cmd->get_name();
    if (name == "analyze") rep = cmd_analyze(o, m);
    else if (name == "search-darboux") rep = cmd_search_darboux(o, m);
    else if (name == "search-expfactors") rep = cmd_search_exp(o, m);
    else if (name == "combine") rep = cmd_combine(o, m);
    else if (name == "verify") rep = cmd_verify(o, m);
    else if (name == "simulate") rep = cmd_simulate(o, m);
    else if (name == "drift") rep = cmd_drift(o, m);
    else rep = cmd_f2(o, m);
    const std::string text = rep.dump(2) + "\n";
    if (o.out.empty()) {
      out << text;
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw InvalidArgument("--out: cannot write '" + o.out + "'");
      f << text;
    }
    return 0;
  } catch (const DomainError& e) {
    err << "domain error (" << e.condition << "): " << e.what() << "\n";
    return 3;
  } catch (const ConstraintError& e) {
    err << "parameter constraint: " << e.what() << "\n";
    return 3;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace darbouxkit
