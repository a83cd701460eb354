#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "darbouxkit/darboux.hpp"
#include "darbouxkit/field.hpp"
#include "darbouxkit/real.hpp"

namespace darbouxkit {

using State = std::array<Real, 3>;

struct StepMode {
  enum class Kind { fixed, adaptive };
  Kind kind = Kind::fixed;
  /// Step size (fixed) or local error tolerance (adaptive).
  double value = 1e-3;

  static StepMode fixed(double h) { return {Kind::fixed, h}; }
  static StepMode adaptive(double tol) { return {Kind::adaptive, tol}; }
};

struct Trajectory {
  std::vector<Real> times;
  std::vector<State> states;
  StepMode step_mode;
  std::optional<HsaParams> params;
  std::string label;
  /// Set when integration stopped early (non-finite state or step budget).
  bool truncated = false;
  std::string note;
};

/// Field compiled to binary128 coefficients for repeated evaluation.
class NumericField {
 public:
  explicit NumericField(const FieldDef& f);
  State operator()(const State& s) const;

 private:
  struct Term {
    Real c;
    unsigned ex, ey, ez;
  };
  std::array<std::vector<Term>, 3> comps_;
};

/// RK4 (fixed) or Dormand-Prince 5(4) with error control (adaptive).
Trajectory integrate(const FieldDef& f, const std::array<double, 3>& x0, double t_end, StepMode mode);

enum class IntegralKind { F1, F2_paper, F2_corrected, F3, F4, log_combination };

struct IntegralSpec {
  IntegralKind which = IntegralKind::F1;
  HsaParams params;
  /// Only for log_combination.
  std::vector<LogTerm> terms;
};

std::string integral_name(IntegralKind k);
/// Parses "F1", "F2_paper", "F2_corrected", "F3", "F4"; InvalidArgument otherwise.
IntegralKind parse_integral_name(const std::string& s);

/// Throws ConstraintError naming the violated hypothesis.
void check_constraints(const IntegralSpec& spec);

/// Closed-form value at a state. Not for F2 (path dependent). Throws DomainError.
Real eval_integral(const IntegralSpec& spec, const State& s);

enum class F2Variant { paper, corrected };

/// z v - int v w dx at every sample, the x-integrals taken along the path by
/// composite Simpson in time. c is the value of F1 at the start.
std::vector<Real> f2_path_series(const Trajectory& traj, const HsaParams& p, F2Variant variant, Real c);
Real f2_path_value(const Trajectory& traj, const HsaParams& p, std::size_t upto_index, F2Variant variant, Real c);

/// Cumulative composite Simpson of samples ys over the grid ts (any spacing).
std::vector<Real> cumulative_simpson(const std::vector<Real>& ts, const std::vector<Real>& ys);

struct DomainViolation {
  double time;
  std::string reason;
};

struct DriftReport {
  IntegralSpec spec;
  double initial_value = 0;
  double max_abs_drift = 0;
  double relative_drift = 0;
  double t0 = 0, t1 = 0;
  std::size_t samples = 0;
  std::optional<DomainViolation> domain_violation;
};

DriftReport drift(const Trajectory& traj, const IntegralSpec& spec);

struct HalvingStudy {
  DriftReport coarse, fine;
  double ratio = 1;
};

HalvingStudy step_halving_study(const FieldDef& f, const std::array<double, 3>& x0, const IntegralSpec& spec,
                                double h, double t_end);

struct F2VariantResult {
  F2Variant variant;
  DriftReport report;
  /// Residual factor r in dF2/dt = lambda z v r, as a polynomial.
  Poly oracle_residual;
};

struct F2Experiment {
  double t_window_end = 0;
  std::size_t window_samples = 0;
  double c = 0;
  std::vector<F2VariantResult> variants;
  double tolerance = 1e-6;
  double reject_threshold = 1e-3;
  /// Variant whose drift passes while the other's fails, if exactly one does.
  std::optional<F2Variant> winner;
  /// Variant whose oracle residual vanishes identically, if exactly one does.
  std::optional<F2Variant> oracle_winner;
};

/// Runs both F2 exponent variants on the longest prefix of the trajectory where
/// y - 1 keeps its sign (minus a safety margin). Requires beta = kappa = 0.
F2Experiment f2_experiment(const HsaParams& p, const std::array<double, 3>& x0, double h, double t_end);

std::string f2_variant_name(F2Variant v);

/// CSV with header "t,x,y,z", one row per sample.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace darbouxkit
