#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "darbouxkit/errors.hpp"
#include "darbouxkit/numerics.hpp"

using namespace darbouxkit;

namespace {

const HsaParams P1{1, 0, 0, 1}, P3{-2, 0, 2, 1}, P4{-2, 0, 2, 0};
const std::array<double, 3> X1{0.5, 0.2, 0.1}, X3{-0.5, 0.5, 0.0}, X4{0.1, 0.1, 0.1};

double d(Real v) { return static_cast<double>(v); }

IntegralSpec plain_y(const HsaParams& p) { return {IntegralKind::log_combination, p, {{1, Poly::var(Var::y), TermForm::plain}}}; }

}  // namespace

TEST_CASE("eval_integral fixtures") {
  CHECK(d(eval_integral({IntegralKind::F1, {1, 0, 0, 1}, {}}, {1, 0, 7})) == doctest::Approx(-0.5).epsilon(1e-16));
  // 2 ln(2 (3/2 + sqrt(7/4)) / (1/2)) - sqrt(7/4), evaluated to 30 digits independently
  CHECK(d(eval_integral({IntegralKind::F3, P3, {}}, {Real(-0.5), Real(0.5), 0})) ==
        doctest::Approx(3.5252252694611144657).epsilon(1e-15));
  CHECK(d(eval_integral({IntegralKind::F4, P4, {}}, {0, 0, 0})) == 1.0);
}

TEST_CASE("F4 on x = 0 is the bare exponential") {
  const Real r = real_sqrt(Real(2));
  for (double y : {-0.7, 0.1, 3.0})
    for (double z : {-1.0, 0.0, 0.3, 2.5}) {
      Real v = eval_integral({IntegralKind::F4, P4, {}}, {0, Real(y), Real(z)});
      CHECK(v == real_exp(2 * Real(z) * r));
    }
  CHECK(d(eval_integral({IntegralKind::F4, P4, {}}, {0, 0, Real(0.3)})) == doctest::Approx(2.3362057463217584).epsilon(1e-15));
}

TEST_CASE("domain errors name the condition") {
  auto cond = [](const IntegralSpec& s, State st) {
    try {
      eval_integral(s, st);
    } catch (const DomainError& e) {
      return e.condition;
    }
    return std::string("none");
  };
  CHECK(cond({IntegralKind::F1, P1, {}}, {-1, 0, 0}) == "x > 0");
  CHECK(cond({IntegralKind::F3, P3, {}}, {Real(0.5), Real(0.5), 0}) == "-x > 0");
  CHECK(cond({IntegralKind::F3, P3, {}}, {-5, 0, 0}) == "T^2 > 0");
  // T > 0 but y + kappa - 1 + T < 0
  CHECK(cond({IntegralKind::F3, P3, {}}, {Real(-0.1), -3, 0}) == "log argument > 0");
  // y + 1 + x sqrt 2 = 0
  CHECK(cond({IntegralKind::F4, P4, {}}, {0, -1, 0}) == "denominator != 0");
  CHECK(cond({IntegralKind::log_combination, P1, {{1, Poly::var(Var::x), TermForm::log}}}, {0, 1, 1}) == "log base != 0");
  CHECK(cond({IntegralKind::F1, P1, {}}, {1, 0, 0}) == "none");
}

TEST_CASE("parameter constraints") {
  CHECK_THROWS_AS(check_constraints({IntegralKind::F1, {1, 1, 1, 1}, {}}), ConstraintError);
  CHECK_THROWS_AS(check_constraints({IntegralKind::F1, {0, 0, 0, 1}, {}}), ConstraintError);
  CHECK_THROWS_AS(check_constraints({IntegralKind::F2_paper, {1, 0, 1, 1}, {}}), ConstraintError);
  CHECK_THROWS_AS(check_constraints({IntegralKind::F3, {1, 0, 2, 1}, {}}), ConstraintError);
  CHECK_THROWS_AS(check_constraints({IntegralKind::F3, {0, 0, 0, 1}, {}}), ConstraintError);
  CHECK_THROWS_AS(check_constraints({IntegralKind::F4, P3, {}}), ConstraintError);
  // kappa = 1/2: alpha = 1/4 is on the curve but kappa(kappa - 1) < 0
  CHECK_THROWS_AS(check_constraints({IntegralKind::F4, {Rational(1, 4), 0, Rational(1, 2), 0}, {}}), ConstraintError);
  CHECK_NOTHROW(check_constraints({IntegralKind::F3, {Rational(1, 4), 0, Rational(1, 2), 0}, {}}));
  CHECK_NOTHROW(check_constraints({IntegralKind::F4, P4, {}}));
  auto tr = integrate(build_hsa({1, 1, 1, 1}), X1, 0.1, StepMode::fixed(1e-2));
  CHECK_THROWS_AS(drift(tr, {IntegralKind::F1, {1, 1, 1, 1}, {}}), ConstraintError);
  CHECK_THROWS_AS(drift(tr, {IntegralKind::F1, P1, {}}), InvalidArgument);
}

TEST_CASE("integral names round-trip") {
  for (IntegralKind k : {IntegralKind::F1, IntegralKind::F2_paper, IntegralKind::F2_corrected, IntegralKind::F3, IntegralKind::F4})
    CHECK(parse_integral_name(integral_name(k)) == k);
  CHECK_THROWS_AS(parse_integral_name("F5"), InvalidArgument);
}

TEST_CASE("integrate basics") {
  FieldDef zero{Poly(), Poly(), Poly(), {}, "zero", {}};
  auto c = integrate(zero, {1, 2, 3}, 1, StepMode::fixed(0.1));
  CHECK(c.states.size() == 11);
  for (const auto& s : c.states) CHECK((d(s[0]) == 1 && d(s[1]) == 2 && d(s[2]) == 3));
  CHECK(d(c.times.back()) == doctest::Approx(1.0).epsilon(1e-15));

  FieldDef decay{Poly(), Poly(), -Poly::var(Var::z), {}, "decay", {}};
  auto e = integrate(decay, {0, 0, 1}, 1, StepMode::fixed(1e-3));
  CHECK(std::fabs(d(e.states.back()[2]) - std::exp(-1.0)) < 1e-10);
  auto a = integrate(decay, {0, 0, 1}, 1, StepMode::adaptive(1e-12));
  CHECK(std::fabs(d(a.states.back()[2]) - std::exp(-1.0)) < 1e-10);
  CHECK(d(a.times.back()) == 1.0);
  for (std::size_t i = 1; i < a.times.size(); ++i) CHECK(a.times[i] > a.times[i - 1]);

  CHECK_THROWS_AS(integrate(decay, {0, 0, 1}, 0, StepMode::fixed(1e-3)), InvalidArgument);
  CHECK_THROWS_AS(integrate(decay, {0, 0, 1}, 1, StepMode::fixed(0)), InvalidArgument);
  CHECK_THROWS_AS(integrate(decay, {0, 0, 1}, 1, StepMode::adaptive(-1)), InvalidArgument);
}

TEST_CASE("blow-up truncates instead of throwing") {
  // x' = x^2 from x = 1 blows up at t = 1
  FieldDef f{Poly::var(Var::x) * Poly::var(Var::x), Poly(), Poly(), {}, "riccati", {}};
  auto tr = integrate(f, {1, 0, 0}, 2, StepMode::fixed(1e-2));
  CHECK(tr.truncated);
  CHECK_FALSE(tr.note.empty());
  CHECK(tr.states.size() >= 2);
  for (const auto& s : tr.states) CHECK(real_isfinite(s[0]));
}

TEST_CASE("cumulative Simpson") {
  std::vector<Real> ts, ys;
  for (int i = 0; i <= 10; ++i) {
    ts.push_back(Real(i) / 10);
    ys.push_back(ts.back() * ts.back());
  }
  auto s = cumulative_simpson(ts, ys);
  CHECK(std::fabs(d(s.back()) - 1.0 / 3.0) < 1e-16);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::fabs(d(s[i] - ts[i] * ts[i] * ts[i] / 3)) < 1e-16);

  // non-uniform grid: exact for quadratics
  std::vector<Real> tn{0, Real(0.1), Real(0.35), Real(0.4), Real(0.8), 1}, yn;
  for (Real t : tn) yn.push_back(3 * t * t - 2 * t + 1);
  auto sn = cumulative_simpson(tn, yn);
  for (std::size_t i = 0; i < tn.size(); ++i) {
    const Real t = tn[i];
    CHECK(std::fabs(d(sn[i] - (t * t * t - t * t + t))) < 1e-16);
  }
  CHECK_THROWS_AS(cumulative_simpson({0, 1}, {0}), InvalidArgument);
}

TEST_CASE("F2 path value at the start is z0") {
  for (double z0 : {-1.0, 0.0, 0.1, 2.0}) {
    auto tr = integrate(build_hsa(P1), {0.5, 0.2, z0}, 1, StepMode::fixed(1e-2));
    const Real c = eval_integral({IntegralKind::F1, P1, {}}, tr.states[0]);
    for (F2Variant v : {F2Variant::paper, F2Variant::corrected}) CHECK(d(f2_path_value(tr, P1, 0, v, c)) == z0);
  }
}

TEST_CASE("F2 with lambda = 0 reduces to z - int w dx and is conserved") {
  const HsaParams p{1, 0, 0, 0};
  auto ex = f2_experiment(p, X1, 1e-3, 10);
  REQUIRE(ex.variants.size() == 2);
  for (const auto& v : ex.variants) CHECK(v.report.relative_drift <= 1e-8);
  CHECK_FALSE(ex.winner.has_value());
  CHECK_FALSE(ex.oracle_winner.has_value());
}

TEST_CASE("F2 variant experiment") {
  auto ex = f2_experiment(P1, X1, 1e-3, 10);
  REQUIRE(ex.variants.size() == 2);
  CHECK(ex.window_samples >= 3);
  CHECK(ex.t_window_end > 0.5);
  CHECK(ex.c == doctest::Approx(d(eval_integral({IntegralKind::F1, P1, {}}, {Real(0.5), Real(0.2), Real(0.1)}))));
  CHECK(ex.variants[0].variant == F2Variant::paper);
  CHECK(ex.variants[0].report.relative_drift > 1e-3);
  CHECK(ex.variants[1].report.relative_drift <= 1e-6);
  REQUIRE(ex.winner.has_value());
  CHECK(*ex.winner == F2Variant::corrected);
  REQUIRE(ex.oracle_winner.has_value());
  CHECK(*ex.oracle_winner == F2Variant::corrected);
  CHECK(ex.variants[0].oracle_residual.str() == "x^2 - 1");
  CHECK(ex.variants[1].oracle_residual.is_zero());

  CHECK_THROWS_AS(f2_experiment({1, 1, 0, 1}, X1, 1e-3, 10), ConstraintError);
  CHECK_THROWS_AS(f2_experiment(P1, {0.5, 1.0, 0.1}, 1e-3, 10), DomainError);
}

TEST_CASE("drift and step halving on the fixtures") {
  struct Case {
    IntegralKind k;
    HsaParams p;
    std::array<double, 3> x0;
  };
  for (const Case& c : {Case{IntegralKind::F1, P1, X1}, Case{IntegralKind::F3, P3, X3}, Case{IntegralKind::F4, P4, X4}}) {
    CAPTURE(integral_name(c.k));
    auto st = step_halving_study(build_hsa(c.p), c.x0, {c.k, c.p, {}}, 1e-3, 10);
    CHECK(st.coarse.relative_drift <= 1e-8);
    CHECK_FALSE(st.coarse.domain_violation.has_value());
    CHECK(st.coarse.t1 == doctest::Approx(10.0));
    CHECK(st.coarse.samples == 10001);
    CHECK(st.ratio >= 8);
    CHECK(st.ratio <= 32);
    CHECK(st.coarse.relative_drift == doctest::Approx(st.coarse.max_abs_drift / (1 + std::fabs(st.coarse.initial_value))));
  }
}

TEST_CASE("adaptive integration conserves F1") {
  auto tr = integrate(build_hsa(P1), X1, 10, StepMode::adaptive(1e-12));
  CHECK(drift(tr, {IntegralKind::F1, P1, {}}).relative_drift <= 1e-8);
}

TEST_CASE("negative control: y is not conserved") {
  auto st = step_halving_study(build_hsa(P1), X1, plain_y(P1), 1e-3, 10);
  CHECK(st.coarse.relative_drift >= 1e-3);
  CHECK(st.ratio < 8);
}

TEST_CASE("zero field: zero drift, ratio 1") {
  FieldDef zero{Poly(), Poly(), Poly(), {}, "zero", {}};
  auto st = step_halving_study(zero, X1, plain_y(P1), 1e-2, 1);
  CHECK(st.coarse.max_abs_drift == 0);
  CHECK(st.fine.max_abs_drift == 0);
  CHECK(st.ratio == 1);
}

TEST_CASE("drift stops at the first domain violation") {
  // x(t) = 1/2 - t leaves x > 0 between the samples t = 0.3 and t = 0.6
  FieldDef f{Poly(-1), Poly(), Poly(), {}, "line", {}};
  IntegralSpec s{IntegralKind::F1, P1, {}};
  auto tr = integrate(f, {0.5, 0, 0}, 1.2, StepMode::fixed(0.3));
  auto r = drift(tr, s);
  REQUIRE(r.domain_violation.has_value());
  CHECK(r.domain_violation->time == doctest::Approx(0.6));
  CHECK(r.domain_violation->reason.rfind("x > 0", 0) == 0);
  CHECK(r.samples == 2);
  CHECK(r.t1 == doctest::Approx(0.3));
  auto bad = integrate(f, {0, 0, 0}, 1, StepMode::fixed(0.25));
  CHECK_THROWS_AS(drift(bad, s), DomainError);
}

TEST_CASE("drift shrinks under halving for every fixture-like start (property)") {
  const std::array<double, 3> starts[] = {{0.3, 0.1, 0.0}, {0.8, -0.4, 0.5}, {1.5, 0.5, -0.2}, {0.2, 0.6, 1.0}};
  for (const auto& x0 : starts) {
    auto st = step_halving_study(build_hsa(P1), x0, {IntegralKind::F1, P1, {}}, 4e-3, 5);
    CAPTURE(x0[0]);
    if (st.coarse.max_abs_drift < 1e-28) continue;  // already at round-off
    CHECK(st.ratio >= 8);
  }
}

TEST_CASE("trajectory CSV") {
  FieldDef zero{Poly(), Poly(), Poly(), {}, "zero", {}};
  auto tr = integrate(zero, {0.1, 0, 1}, 0.5, StepMode::fixed(0.25));
  CHECK(trajectory_csv(tr) == "t,x,y,z\n0,0.10000000000000001,0,1\n0.25,0.10000000000000001,0,1\n0.5,0.10000000000000001,0,1\n");
}
