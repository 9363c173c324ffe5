#include "spinsde/noise_schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinsde/errors.hpp"

namespace spinsde {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NoiseSchedule NoiseSchedule::constant(double eps0) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
    throw ConfigError("noise schedule: eps0 must be a positive finite number");
  }
  return NoiseSchedule(Kind::Constant, eps0, 0.0);
}

NoiseSchedule NoiseSchedule::power_law(double eps0, double beta) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
    throw ConfigError("noise schedule: eps0 must be a positive finite number");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ConfigError("noise schedule: power-law beta must be positive and finite");
  }
  return NoiseSchedule(Kind::PowerLaw, eps0, beta);
}

NoiseSchedule NoiseSchedule::make(double eps0, double beta) {
  if (beta == 0.0) return constant(eps0);
  if (beta < 0.0) throw ConfigError("noise schedule: beta must be >= 0");
  return power_law(eps0, beta);
}

double NoiseSchedule::eval(double t) const {
  if (kind_ == Kind::Constant) return eps0_;
  return eps0_ * std::pow(t + 1.0, -beta_);
}

double NoiseSchedule::derivative(double t) const {
  if (kind_ == Kind::Constant) return 0.0;
  return -beta_ * eps0_ * std::pow(t + 1.0, -beta_ - 1.0);
}

double NoiseSchedule::integral_pow(double gamma, double t0, double t1) const {
  if (t1 < t0) throw std::invalid_argument("integral_pow: t0 must not exceed t1");
  const double scale = std::pow(eps0_, gamma);
  if (kind_ == Kind::Constant) {
    if (std::isinf(t1)) return kInf;
    return scale * (t1 - t0);
  }
  // int (u+1)^{-k} du
  const double k = gamma * beta_;
  if (std::isinf(t1)) {
    if (k <= 1.0) return kInf;
    return scale * std::pow(t0 + 1.0, 1.0 - k) / (k - 1.0);
  }
  const double lr = std::log1p((t1 - t0) / (t0 + 1.0));  // log((t1+1)/(t0+1))
  if (k == 1.0) return scale * lr;
  return scale * std::pow(t0 + 1.0, 1.0 - k) * std::expm1((1.0 - k) * lr) / (1.0 - k);
}

ScheduleClass classify(const NoiseSchedule& s) {
  ScheduleClass c;
  c.rate_hypothesis_ok = true;  // both families are C^1 with eps'/eps -> 0
  if (s.kind() == NoiseSchedule::Kind::Constant) return c;
  const double beta = s.beta();
  c.l2_finite = 2.0 * beta > 1.0;
  c.l4_finite = 4.0 * beta > 1.0;
  c.gamma_star = 1.0 / beta;
  return c;
}

}  // namespace spinsde
