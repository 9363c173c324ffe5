#pragma once

#include <optional>

namespace spinsde {

/// Deterministic noise magnitude eps_t.
///
/// Two families: Constant (eps_t = eps0) and PowerLaw
/// (eps_t = eps0 / (t + 1)^beta). A PowerLaw with beta == 0 is never built;
/// make() maps beta == 0 to Constant.
class NoiseSchedule {
 public:
  enum class Kind { Constant, PowerLaw };

  static NoiseSchedule constant(double eps0);
  static NoiseSchedule power_law(double eps0, double beta);
  /// beta == 0 selects Constant, beta > 0 PowerLaw.
  static NoiseSchedule make(double eps0, double beta);

  Kind kind() const noexcept { return kind_; }
  double eps0() const noexcept { return eps0_; }
  double beta() const noexcept { return kind_ == Kind::Constant ? 0.0 : beta_; }

  double eval(double t) const;
  /// d eps / dt.
  double derivative(double t) const;

  /// Closed-form integral of eps_u^gamma over [t0, t1]. t1 may be +infinity,
  /// in which case the result is +infinity when gamma * beta <= 1.
  double integral_pow(double gamma, double t0, double t1) const;

  bool operator==(const NoiseSchedule&) const = default;

 private:
  NoiseSchedule(Kind kind, double eps0, double beta) : kind_(kind), eps0_(eps0), beta_(beta) {}

  Kind kind_;
  double eps0_;
  double beta_;
};

/// Integrability flags used by the convergence results.
struct ScheduleClass {
  bool l2_finite = false;  // int eps^2 < inf
  bool l4_finite = false;  // int eps^4 < inf
  // Infimum of the exponents gamma with int eps^gamma < inf; any gamma above
  // it is integrable. Empty for a constant schedule.
  std::optional<double> gamma_star;
  bool rate_hypothesis_ok = false;  // C^1 and eps'/eps -> 0
};

/// Exact classification from exponent arithmetic (beta == 1/2 is not
/// square integrable).
ScheduleClass classify(const NoiseSchedule& s);

}  // namespace spinsde
