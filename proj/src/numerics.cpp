#include "darbouxkit/numerics.hpp"

#include <quadmath.h>

#include <cmath>
#include <cstdio>
#include <limits>

#include "darbouxkit/errors.hpp"

namespace darbouxkit {

namespace {

Real mpz_to_real(const mpz_class& z) {
  const std::size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
  // keep the top 128 bits; binary128 has a 113-bit significand
  const std::size_t shift = bits > 128 ? bits - 128 : 0;
  mpz_class top = z;
  if (shift) mpz_tdiv_q_2exp(top.get_mpz_t(), z.get_mpz_t(), shift);
  mpz_class mag = abs(top);
  Real r = 0;
  const std::size_t limbs = mpz_size(mag.get_mpz_t());
  for (std::size_t i = limbs; i-- > 0;) r = ldexpq(r, 64) + static_cast<Real>(mpz_getlimbn(mag.get_mpz_t(), i));
  if (sgn(z) < 0) r = -r;
  return ldexpq(r, static_cast<int>(shift));
}

Real real_pow(Real b, unsigned e) {
  Real r = 1;
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

Real eval_poly(const Poly& p, const State& s) {
  Real acc = 0;
  for (const auto& [m, c] : p.terms()) acc += to_real(c) * real_pow(s[0], m.ex) * real_pow(s[1], m.ey) * real_pow(s[2], m.ez);
  return acc;
}

struct HsaReal {
  Real alpha, beta, kappa, lambda;
};

HsaReal real_params(const HsaParams& p) {
  return {to_real(p.alpha), to_real(p.beta), to_real(p.kappa), to_real(p.lambda)};
}

std::string fmt(Real v) { return format_double(static_cast<double>(v)); }

const Real kHalf = 0.5;

// z v - int v w dx along the path, up to the first violation (recorded in `violation`).
std::vector<Real> f2_series_checked(const Trajectory& traj, const HsaParams& p, F2Variant variant, Real c,
                                    std::optional<DomainViolation>* violation) {
  if (!p.beta_zero() || p.kappa_nonzero()) throw ConstraintError("F2 requires beta = 0 and kappa = 0");
  const HsaReal q = real_params(p);
  const std::size_t n = traj.states.size();
  if (n == 0) throw InvalidArgument("empty trajectory");
  const Real y0m1 = traj.states[0][1] - 1;
  if (y0m1 == 0) throw DomainError("y - 1 != 0", "F2: y - 1 vanishes at the start, no branch for w");
  const int branch = y0m1 > 0 ? 1 : -1;

  std::vector<Real> ts, u_dx, w_dx, zs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [x, y, z] = traj.states[i];
    std::string cond, msg;
    const Real ym1 = y - 1;
    Real bracket = 0;
    if (ym1 == 0 || (ym1 > 0 ? 1 : -1) != branch) {
      cond = "y - 1 sign";
      msg = "F2: y - 1 changes sign at t = " + fmt(traj.times[i]) + " (branch of w)";
    } else if (!(x > 0)) {
      cond = "x > 0";
      msg = "F2: x = " + fmt(x) + " <= 0";
    } else {
      bracket = 1 - 2 * (c + q.alpha * x * x * kHalf - q.alpha * real_log(x));
      if (!(bracket > 0)) {
        cond = "w-bracket > 0";
        msg = "F2: w-bracket = " + fmt(bracket) + " <= 0";
      }
    }
    if (!cond.empty()) {
      if (i == 0) throw DomainError(cond, msg);
      if (violation) *violation = DomainViolation{static_cast<double>(traj.times[i]), cond + ": " + msg};
      else throw DomainError(cond, msg);
      break;
    }
    const Real w = branch / real_sqrt(bracket);
    const Real xdot = x * ym1 - q.beta * z;
    const Real u = variant == F2Variant::paper ? x * w : w / x;
    ts.push_back(traj.times[i]);
    u_dx.push_back(u * xdot);
    w_dx.push_back(w * xdot);
    zs.push_back(z);
  }
  const std::vector<Real> uint = cumulative_simpson(ts, u_dx);
  std::vector<Real> vw_dx(ts.size()), v(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    v[i] = real_exp(q.lambda * uint[i]);
    vw_dx[i] = v[i] * w_dx[i];
  }
  const std::vector<Real> vwint = cumulative_simpson(ts, vw_dx);
  std::vector<Real> out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = zs[i] * v[i] - vwint[i];
  return out;
}

Real f1_value(const HsaReal& q, const State& s) {
  const Real x = s[0], y = s[1];
  if (!(x > 0)) throw DomainError("x > 0", "F1: x = " + fmt(x) + " <= 0");
  return q.alpha * real_log(x) - q.alpha * x * x * kHalf - y * y * kHalf + y;
}

}  // namespace

Real to_real(const Rational& r) { return mpz_to_real(r.numerator()) / mpz_to_real(r.denominator()); }
Real real_abs(Real v) { return fabsq(v); }
Real real_sqrt(Real v) { return sqrtq(v); }
Real real_log(Real v) { return logq(v); }
Real real_exp(Real v) { return expq(v); }
bool real_isfinite(Real v) { return finiteq(v) != 0; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

NumericField::NumericField(const FieldDef& f) {
  const Poly* ps[3] = {&f.fx, &f.fy, &f.fz};
  for (int i = 0; i < 3; ++i)
    for (const auto& [m, c] : ps[i]->terms()) comps_[i].push_back({to_real(c), m.ex, m.ey, m.ez});
}

State NumericField::operator()(const State& s) const {
  State out{0, 0, 0};
  for (int i = 0; i < 3; ++i)
    for (const Term& t : comps_[i]) out[i] += t.c * real_pow(s[0], t.ex) * real_pow(s[1], t.ey) * real_pow(s[2], t.ez);
  return out;
}

namespace {

State axpy(const State& y, Real h, std::initializer_list<std::pair<Real, const State*>> ks) {
  State out = y;
  for (const auto& [a, k] : ks)
    for (int i = 0; i < 3; ++i) out[i] += h * a * (*k)[i];
  return out;
}

bool finite_state(const State& s) { return real_isfinite(s[0]) && real_isfinite(s[1]) && real_isfinite(s[2]); }

Real frac(long a, long b) { return static_cast<Real>(a) / static_cast<Real>(b); }

}  // namespace

Trajectory integrate(const FieldDef& f, const std::array<double, 3>& x0, double t_end, StepMode mode) {
  if (!(t_end > 0)) throw InvalidArgument("t_end must be > 0");
  if (!(mode.value > 0)) throw InvalidArgument(mode.kind == StepMode::Kind::fixed ? "step h must be > 0" : "tolerance must be > 0");
  for (double v : x0)
    if (!std::isfinite(v)) throw InvalidArgument("initial state must be finite");
  const NumericField F(f);
  Trajectory tr;
  tr.step_mode = mode;
  tr.params = f.hsa;
  tr.label = f.label;
  State y{x0[0], x0[1], x0[2]};
  const Real tend = t_end;
  tr.times.push_back(0);
  tr.states.push_back(y);

  auto blowup = [&](Real t) {
    tr.truncated = true;
    tr.note = "non-finite state at t = " + fmt(t) + "; trajectory truncated";
  };

  if (mode.kind == StepMode::Kind::fixed) {
    const Real h = mode.value;
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / mode.value - 1e-9));
    Real t = 0;
    for (std::size_t i = 1; i <= steps; ++i) {
      const Real tn = i == steps ? tend : static_cast<Real>(i) * h;
      const Real dt = tn - t;
      const State k1 = F(y);
      const State k2 = F(axpy(y, dt * kHalf, {{1, &k1}}));
      const State k3 = F(axpy(y, dt * kHalf, {{1, &k2}}));
      const State k4 = F(axpy(y, dt, {{1, &k3}}));
      const State yn = axpy(y, dt / 6, {{1, &k1}, {2, &k2}, {2, &k3}, {1, &k4}});
      if (!finite_state(yn)) {
        blowup(tn);
        break;
      }
      y = yn;
      t = tn;
      tr.times.push_back(t);
      tr.states.push_back(y);
    }
    return tr;
  }

  // Dormand-Prince 5(4)
  static const Real a21 = frac(1, 5);
  static const Real a31 = frac(3, 40), a32 = frac(9, 40);
  static const Real a41 = frac(44, 45), a42 = frac(-56, 15), a43 = frac(32, 9);
  static const Real a51 = frac(19372, 6561), a52 = frac(-25360, 2187), a53 = frac(64448, 6561), a54 = frac(-212, 729);
  static const Real a61 = frac(9017, 3168), a62 = frac(-355, 33), a63 = frac(46732, 5247), a64 = frac(49, 176),
                    a65 = frac(-5103, 18656);
  static const Real b1 = frac(35, 384), b3 = frac(500, 1113), b4 = frac(125, 192), b5 = frac(-2187, 6784),
                    b6 = frac(11, 84);
  static const Real e1 = b1 - frac(5179, 57600), e3 = b3 - frac(7571, 16695), e4 = b4 - frac(393, 640),
                    e5 = b5 - frac(-92097, 339200), e6 = b6 - frac(187, 2100), e7 = -frac(1, 40);

  const Real tol = mode.value;
  Real t = 0;
  Real h = std::min(1e-2, t_end);
  constexpr std::size_t kMaxSteps = 10'000'000;
  std::size_t attempts = 0;
  State k1 = F(y);
  while (t < tend) {
    if (++attempts > kMaxSteps) {
      tr.truncated = true;
      tr.note = "adaptive step budget exhausted at t = " + fmt(t);
      break;
    }
    bool last = false;
    if (t + h >= tend) {
      h = tend - t;
      last = true;
    }
    const State k2 = F(axpy(y, h, {{a21, &k1}}));
    const State k3 = F(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State k4 = F(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = F(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = F(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State yn = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    if (!finite_state(yn)) {
      if (h < 1e-30) {
        blowup(t);
        break;
      }
      h *= kHalf;
      continue;
    }
    const State k7 = F(yn);
    Real err = 0;
    for (int i = 0; i < 3; ++i) {
      const Real e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const Real scale = tol * (1 + std::max(real_abs(y[i]), real_abs(yn[i])));
      err = std::max(err, real_abs(e) / scale);
    }
    const double errd = static_cast<double>(err);
    const double factor = errd == 0 ? 5.0 : std::clamp(0.9 * std::pow(errd, -0.2), 0.2, 5.0);
    if (err <= 1) {
      t = last ? tend : t + h;
      y = yn;
      k1 = k7;
      tr.times.push_back(t);
      tr.states.push_back(y);
    }
    h *= factor;
    if (!(h > 0)) {
      blowup(t);
      break;
    }
  }
  return tr;
}

std::string integral_name(IntegralKind k) {
  switch (k) {
    case IntegralKind::F1: return "F1";
    case IntegralKind::F2_paper: return "F2_paper";
    case IntegralKind::F2_corrected: return "F2_corrected";
    case IntegralKind::F3: return "F3";
    case IntegralKind::F4: return "F4";
    case IntegralKind::log_combination: return "log_combination";
  }
  return "?";
}

IntegralKind parse_integral_name(const std::string& s) {
  for (IntegralKind k : {IntegralKind::F1, IntegralKind::F2_paper, IntegralKind::F2_corrected, IntegralKind::F3,
                         IntegralKind::F4})
    if (s == integral_name(k)) return k;
  throw InvalidArgument("unknown integral '" + s + "' (expected F1, F2_paper, F2_corrected, F3, F4)");
}

void check_constraints(const IntegralSpec& spec) {
  const HsaParams& p = spec.params;
  const std::string name = integral_name(spec.which);
  switch (spec.which) {
    case IntegralKind::F1:
    case IntegralKind::F2_paper:
    case IntegralKind::F2_corrected:
      if (!p.alpha_nonzero()) throw ConstraintError(name + " requires alpha != 0");
      if (!p.beta_zero()) throw ConstraintError(name + " requires beta = 0");
      if (p.kappa_nonzero()) throw ConstraintError(name + " requires kappa = 0");
      return;
    case IntegralKind::F4:
    case IntegralKind::F3:
      if (!p.beta_zero()) throw ConstraintError(name + " requires beta = 0");
      if (!p.kappa_nonzero()) throw ConstraintError(name + " requires kappa != 0");
      if (!p.on_integrable_curve()) throw ConstraintError(name + " requires alpha = -kappa(kappa - 1)");
      if (spec.which == IntegralKind::F4) {
        if (!p.lambda.is_zero()) throw ConstraintError("F4 requires lambda = 0");
        if (p.kappa * (p.kappa - Rational(1)) < Rational(0))
          throw ConstraintError("F4 requires kappa(kappa - 1) >= 0 for real evaluation");
      }
      return;
    case IntegralKind::log_combination: return;
  }
}

Real eval_integral(const IntegralSpec& spec, const State& s) {
  check_constraints(spec);
  const HsaReal q = real_params(spec.params);
  const Real x = s[0], y = s[1], z = s[2];
  switch (spec.which) {
    case IntegralKind::F1: return f1_value(q, s);
    case IntegralKind::F2_paper:
    case IntegralKind::F2_corrected:
      throw InvalidArgument("F2 is path dependent; use f2_path_value");
    case IntegralKind::F3: {
      const Real k = q.kappa;
      const Real a = y + k - 1;
      // factored form of T^2; the expanded one cancels badly near y = 1 - kappa
      const Real t2 = a * a - k * (k - 1) * x * x;
      if (!(t2 > 0)) throw DomainError("T^2 > 0", "F3: T^2 = " + fmt(t2) + " <= 0");
      if (!(-x > 0)) throw DomainError("-x > 0", "F3: x = " + fmt(x) + " >= 0");
      const Real t = real_sqrt(t2);
      const Real arg = 2 * (a + t) / (-x);
      if (!(arg > 0)) throw DomainError("log argument > 0", "F3: 2(kappa+y-1+T)/(-x) = " + fmt(arg) + " <= 0");
      return k * real_log(arg) - t;
    }
    case IntegralKind::F4: {
      const Real r = real_sqrt(q.kappa * (q.kappa - 1));
      const Real a = y + q.kappa - 1;
      const Real den = a + x * r;
      if (den == 0) throw DomainError("denominator != 0", "F4: y+kappa-1+x*sqrt(kappa(kappa-1)) = 0");
      return (a - x * r) / den * real_exp(2 * z * r);
    }
    case IntegralKind::log_combination: {
      Real acc = 0;
      for (const LogTerm& t : spec.terms) {
        const Real v = eval_poly(t.base, s);
        if (t.form == TermForm::plain) {
          acc += to_real(t.weight) * v;
        } else {
          if (v == 0) throw DomainError("log base != 0", "log term " + t.base.str() + " vanishes");
          acc += to_real(t.weight) * real_log(real_abs(v));
        }
      }
      return acc;
    }
  }
  throw Error("unreachable");
}

std::vector<Real> cumulative_simpson(const std::vector<Real>& ts, const std::vector<Real>& ys) {
  if (ts.size() != ys.size()) throw InvalidArgument("cumulative_simpson: length mismatch");
  const std::size_t n = ts.size();
  std::vector<Real> out(n, 0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = (ts[1] - ts[0]) * (ys[0] + ys[1]) * kHalf;
    return out;
  }
  auto panel = [&](std::size_t i) {  // over [t_i, t_{i+2}]
    const Real h1 = ts[i + 1] - ts[i], h2 = ts[i + 2] - ts[i + 1], s = h1 + h2;
    return s / 6 * ((2 - h2 / h1) * ys[i] + s * s / (h1 * h2) * ys[i + 1] + (2 - h1 / h2) * ys[i + 2]);
  };
  // first interval from the quadratic through samples 0, 1, 2
  {
    const Real h1 = ts[1] - ts[0], h2 = ts[2] - ts[1], s = h1 + h2;
    out[1] = h1 * (2 * h1 + 3 * h2) / (6 * s) * ys[0] + h1 * (h1 + 3 * h2) / (6 * h2) * ys[1] -
             h1 * h1 * h1 / (6 * h2 * s) * ys[2];
  }
  for (std::size_t i = 2; i < n; ++i) {
    if (i % 2 == 0) {
      out[i] = out[i - 2] + panel(i - 2);
    } else {
      // last interval from the quadratic through samples i-2, i-1, i
      const Real h1 = ts[i - 1] - ts[i - 2], h2 = ts[i] - ts[i - 1], s = h1 + h2;
      out[i] = out[i - 1] - h2 * h2 * h2 / (6 * h1 * s) * ys[i - 2] + h2 * (3 * h1 + h2) / (6 * h1) * ys[i - 1] +
               h2 * (3 * h1 + 2 * h2) / (6 * s) * ys[i];
    }
  }
  return out;
}

std::vector<Real> f2_path_series(const Trajectory& traj, const HsaParams& p, F2Variant variant, Real c) {
  return f2_series_checked(traj, p, variant, c, nullptr);
}

Real f2_path_value(const Trajectory& traj, const HsaParams& p, std::size_t upto_index, F2Variant variant, Real c) {
  if (upto_index >= traj.states.size()) throw InvalidArgument("f2_path_value: index out of range");
  Trajectory prefix = traj;
  prefix.times.resize(upto_index + 1);
  prefix.states.resize(upto_index + 1);
  return f2_path_series(prefix, p, variant, c).back();
}

DriftReport drift(const Trajectory& traj, const IntegralSpec& spec) {
  check_constraints(spec);
  if (traj.params && spec.which != IntegralKind::log_combination && !(*traj.params == spec.params))
    throw InvalidArgument("integral parameters differ from the trajectory's field parameters");
  if (traj.states.empty()) throw InvalidArgument("empty trajectory");
  DriftReport rep;
  rep.spec = spec;
  rep.t0 = static_cast<double>(traj.times.front());

  std::vector<Real> values;
  if (spec.which == IntegralKind::F2_paper || spec.which == IntegralKind::F2_corrected) {
    const Real c = f1_value(real_params(spec.params), traj.states[0]);
    values = f2_series_checked(traj, spec.params,
                               spec.which == IntegralKind::F2_paper ? F2Variant::paper : F2Variant::corrected, c,
                               &rep.domain_violation);
  } else {
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      try {
        values.push_back(eval_integral(spec, traj.states[i]));
      } catch (const DomainError& e) {
        if (i == 0) throw;
        rep.domain_violation = DomainViolation{static_cast<double>(traj.times[i]), e.condition + ": " + e.what()};
        break;
      }
    }
  }
  Real m = 0;
  for (Real v : values) m = std::max(m, real_abs(v - values[0]));
  rep.samples = values.size();
  rep.t1 = static_cast<double>(traj.times[values.size() - 1]);
  rep.initial_value = static_cast<double>(values[0]);
  rep.max_abs_drift = static_cast<double>(m);
  rep.relative_drift = static_cast<double>(m / (1 + real_abs(values[0])));
  return rep;
}

HalvingStudy step_halving_study(const FieldDef& f, const std::array<double, 3>& x0, const IntegralSpec& spec,
                                double h, double t_end) {
  check_constraints(spec);
  HalvingStudy st;
  st.coarse = drift(integrate(f, x0, t_end, StepMode::fixed(h)), spec);
  st.fine = drift(integrate(f, x0, t_end, StepMode::fixed(h / 2)), spec);
  if (st.coarse.max_abs_drift == 0 && st.fine.max_abs_drift == 0)
    st.ratio = 1;
  else if (st.fine.max_abs_drift == 0)
    st.ratio = std::numeric_limits<double>::infinity();
  else
    st.ratio = st.coarse.max_abs_drift / st.fine.max_abs_drift;
  return st;
}

std::string f2_variant_name(F2Variant v) { return v == F2Variant::paper ? "F2_paper" : "F2_corrected"; }

F2Experiment f2_experiment(const HsaParams& p, const std::array<double, 3>& x0, double h, double t_end) {
  IntegralSpec base{IntegralKind::F2_corrected, p, {}};
  check_constraints(base);
  const FieldDef f = build_hsa(p);
  const Trajectory full = integrate(f, x0, t_end, StepMode::fixed(h));

  // |y - 1| >= margin keeps w away from its branch point
  constexpr double kMargin = 1e-2;
  const Real y0m1 = full.states[0][1] - 1;
  if (!(real_abs(y0m1) > kMargin)) throw DomainError("y - 1 sign", "f2-experiment: |y0 - 1| too small for a window");
  std::size_t end = 0;
  while (end + 1 < full.states.size()) {
    const Real d = full.states[end + 1][1] - 1;
    if ((d > 0) != (y0m1 > 0) || real_abs(d) < kMargin) break;
    ++end;
  }
  if (end < 2) throw DomainError("y - 1 sign", "f2-experiment: sign-stable window has fewer than 3 samples");
  Trajectory win = full;
  win.times.resize(end + 1);
  win.states.resize(end + 1);

  F2Experiment ex;
  ex.t_window_end = static_cast<double>(win.times.back());
  ex.window_samples = win.states.size();
  ex.c = static_cast<double>(f1_value(real_params(p), win.states[0]));

  // dF2/dt = (x - lambda z) v + z v' x' - v w x' with v' = lambda u v and w = 1/(y-1),
  // so dF2/dt = lambda z v (u x' - 1); u x' is a polynomial because (y - 1) | x'.
  const Poly ym1 = Poly::var(Var::y) - Poly(1);
  const auto xdot_w = try_divide(f.fx, ym1);
  if (!xdot_w) throw Error("internal: y - 1 does not divide x' although beta = 0");
  for (F2Variant v : {F2Variant::paper, F2Variant::corrected}) {
    std::optional<Poly> u_xdot =
        v == F2Variant::paper ? std::optional<Poly>(Poly::var(Var::x) * *xdot_w) : try_divide(*xdot_w, Poly::var(Var::x));
    if (!u_xdot) throw Error("internal: x does not divide x'/(y-1)");
    IntegralSpec spec{v == F2Variant::paper ? IntegralKind::F2_paper : IntegralKind::F2_corrected, p, {}};
    ex.variants.push_back({v, drift(win, spec), *u_xdot - Poly(1)});
  }
  const bool pass0 = ex.variants[0].report.relative_drift <= ex.tolerance;
  const bool pass1 = ex.variants[1].report.relative_drift <= ex.tolerance;
  if (pass0 && !pass1 && ex.variants[1].report.relative_drift > ex.reject_threshold) ex.winner = ex.variants[0].variant;
  if (pass1 && !pass0 && ex.variants[0].report.relative_drift > ex.reject_threshold) ex.winner = ex.variants[1].variant;
  const bool z0 = ex.variants[0].oracle_residual.is_zero() || p.lambda.is_zero();
  const bool z1 = ex.variants[1].oracle_residual.is_zero() || p.lambda.is_zero();
  if (z0 != z1) ex.oracle_winner = z0 ? ex.variants[0].variant : ex.variants[1].variant;
  return ex;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,x,y,z\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    out += format_double(static_cast<double>(traj.times[i]));
    for (int k = 0; k < 3; ++k) out += "," + format_double(static_cast<double>(traj.states[i][k]));
    out += "\n";
  }
  return out;
}

}  // namespace darbouxkit
