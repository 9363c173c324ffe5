#include "spinsde/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinsde/errors.hpp"
#include "spinsde/rng.hpp"

namespace spinsde {

namespace {

constexpr double kDegenerateNorm = 1e-12;
constexpr double kUnitTolerance = 1e-12;
// exp(700) is still finite in double precision.
constexpr double kMaxExponent = 700.0;

double noise_level(const ModelSpec& m, double t) {
  return m.kind == ModelKind::Deterministic ? 0.0 : m.schedule.eval(t);
}

void require_unit(const Vec3& x0) {
  if (!(std::abs(x0.norm() - 1.0) <= kUnitTolerance)) {
    throw std::invalid_argument("initial state must have unit norm");
  }
}

Vec3 midpoint_step(const ModelSpec& m, const SchemeSpec& s, const Vec3& x, double t,
                   const Vec3& dW) {
  const double eps_mid = noise_level(m, t + 0.5 * s.dt);
  const Vec3 forcing = m.b * s.dt + eps_mid * dW;
  Vec3 y = x;
  for (int iter = 0; iter < s.fp_maxiter; ++iter) {
    const Vec3 next = x + effective_operator(0.5 * (x + y), m.alpha) * forcing;
    const double change = (next - y).norm();
    y = next;
    if (change <= s.fp_tol) return y;
  }
  throw NonConvergence("semi-implicit midpoint iteration did not converge; reduce dt");
}

}  // namespace

void ModelSpec::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be >= 0");
  if (!b.allFinite()) throw ConfigError("b must be finite");
  if (kind == ModelKind::Alpha0Exact && alpha != 0.0) {
    throw ConfigError("alpha0-exact model requires alpha = 0");
  }
  if (kind == ModelKind::RescaledIto && schedule.kind() != NoiseSchedule::Kind::Constant) {
    throw ConfigError("rescaled Ito model requires a constant noise schedule (beta = 0)");
  }
}

void SchemeSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(fp_tol > 0.0)) throw ConfigError("fp_tol must be positive");
  if (fp_maxiter <= 0) throw ConfigError("fp_maxiter must be positive");
}

double h_of_t(double eps, double alpha, double t) {
  return std::sqrt(2.0 * eps * eps * (alpha * alpha + 1.0) * t + 1.0);
}

Vec3 drift(const ModelSpec& m, const Vec3& x, double t) {
  const Vec3 field = effective_operator(x, m.alpha) * m.b;
  switch (m.kind) {
    case ModelKind::Deterministic:
      return field;
    case ModelKind::RescaledIto: {
      const double eps = m.schedule.eval(t);
      const double h = h_of_t(eps, m.alpha, t);
      const double h_rate = eps * eps * (m.alpha * m.alpha + 1.0) / (h * h);  // h'/h
      return -h_rate * x + field / h;
    }
    case ModelKind::PullbackIto:
    case ModelKind::StratonovichIto: {
      const double eps = m.schedule.eval(t);
      return field - eps * eps * (m.alpha * m.alpha + 1.0) * x;
    }
    case ModelKind::Alpha0Exact:
      break;
  }
  throw std::invalid_argument("drift: alpha0-exact model has no drift/diffusion form");
}

Mat3 diffusion(const ModelSpec& m, const Vec3& x, double t) {
  switch (m.kind) {
    case ModelKind::Deterministic:
      return Mat3::Zero();
    case ModelKind::RescaledIto: {
      const double eps = m.schedule.eval(t);
      return (eps / h_of_t(eps, m.alpha, t)) * effective_operator(x, m.alpha);
    }
    case ModelKind::PullbackIto:
    case ModelKind::StratonovichIto:
      return m.schedule.eval(t) * effective_operator(x, m.alpha);
    case ModelKind::Alpha0Exact:
      break;
  }
  throw std::invalid_argument("diffusion: alpha0-exact model has no drift/diffusion form");
}

double qv_rate(const ModelSpec& m, const Vec3& x, double t) {
  const double eps = noise_level(m, t);
  const double proj = x.dot(m.b);
  return eps * eps * (m.alpha * m.alpha + 1.0) * (m.b.squaredNorm() - proj * proj);
}

Vec3 step(const ModelSpec& m, const SchemeSpec& s, const Vec3& x, double t, const Vec3& dW) {
  switch (s.kind) {
    case SchemeKind::ExplicitEuler:
      return x + drift(m, x, t) * s.dt + diffusion(m, x, t) * dW;
    case SchemeKind::ProjectedEuler: {
      const Vec3 y = x + drift(m, x, t) * s.dt + diffusion(m, x, t) * dW;
      const double n = y.norm();
      if (!(n >= kDegenerateNorm)) {
        throw DegenerateState("projected Euler: update has (near) zero length");
      }
      return y / n;
    }
    case SchemeKind::SemiImplicitMidpoint:
      if (m.kind != ModelKind::StratonovichIto && m.kind != ModelKind::Deterministic) {
        throw std::invalid_argument(
            "semi-implicit midpoint discretizes the Stratonovich form only");
      }
      return midpoint_step(m, s, x, t, dW);
  }
  throw std::invalid_argument("unknown scheme");
}

std::vector<Vec3> brownian_increments(std::uint64_t seed, std::size_t n, double dt) {
  const GaussianStream stream(seed, StreamRole::Brownian);
  const double scale = std::sqrt(dt);
  std::vector<Vec3> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * stream.normal3(i);
  return out;
}

std::vector<Vec3> coarsen(std::span<const Vec3> increments, std::size_t factor) {
  if (factor == 0 || increments.size() % factor != 0) {
    throw std::invalid_argument("coarsen: length must be a multiple of the factor");
  }
  std::vector<Vec3> out(increments.size() / factor, Vec3::Zero());
  for (std::size_t i = 0; i < increments.size(); ++i) out[i / factor] += increments[i];
  return out;
}

std::size_t step_count(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("T and dt must be positive");
  // Guard against T/dt landing a hair above an integer.
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

double integrate(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0,
                 std::span<const Vec3> increments, const PathObserver& observe) {
  require_unit(x0);
  const double dt = s.dt;
  double norm_drift = std::abs(x0.norm() - 1.0);
  Vec3 x = x0;

  if (m.kind == ModelKind::Alpha0Exact) {
    // mu_t = exp(L(b) t - I_t) (x0 - N_t),
    // N_{n+1} = N_n + exp(I_n) eps_n exp(-L(b) t_n) L(mu_n) dW_n.
    Vec3 martingale = Vec3::Zero();
    if (observe) observe(0, 0.0, x, martingale);
    for (std::size_t n = 0; n < increments.size(); ++n) {
      const double t = static_cast<double>(n) * dt;
      const double t_next = static_cast<double>(n + 1) * dt;
      const double damping = m.schedule.integral_pow(2.0, 0.0, t);
      const double damping_next = m.schedule.integral_pow(2.0, 0.0, t_next);
      if (damping_next > kMaxExponent) {
        throw std::overflow_error("alpha0 exact path: exp(int eps^2) overflows");
      }
      martingale += std::exp(damping) * m.schedule.eval(t) *
                    (rotation_exp(m.b, -t) * (cross_matrix(x) * increments[n]));
      x = std::exp(-damping_next) * (rotation_exp(m.b, t_next) * (x0 - martingale));
      norm_drift = std::max(norm_drift, std::abs(x.norm() - 1.0));
      if (observe) observe(n + 1, t_next, x, martingale);
    }
    return norm_drift;
  }

  const Vec3 zero = Vec3::Zero();
  if (observe) observe(0, 0.0, x, zero);
  for (std::size_t n = 0; n < increments.size(); ++n) {
    const double t = static_cast<double>(n) * dt;
    try {
      x = step(m, s, x, t, increments[n]);
    } catch (const NonConvergence& e) {
      throw StepFailure(n, true, e.what());
    } catch (const DegenerateState& e) {
      throw StepFailure(n, false, e.what());
    }
    norm_drift = std::max(norm_drift, std::abs(x.norm() - 1.0));
    if (observe) observe(n + 1, static_cast<double>(n + 1) * dt, x, zero);
  }
  return norm_drift;
}

Trajectory simulate_with_increments(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0,
                                    std::vector<Vec3> increments, std::uint64_t seed) {
  m.validate();
  s.validate();
  Trajectory traj;
  traj.seed = seed;
  traj.times.reserve(increments.size() + 1);
  traj.states.reserve(increments.size() + 1);
  const bool exact = m.kind == ModelKind::Alpha0Exact;
  if (exact) traj.martingale.reserve(increments.size() + 1);
  traj.norm_drift = integrate(m, s, x0, increments,
                              [&](std::size_t, double t, const Vec3& x, const Vec3& martingale) {
                                traj.times.push_back(t);
                                traj.states.push_back(x);
                                if (exact) traj.martingale.push_back(martingale);
                              });
  traj.brownian_increments = std::move(increments);
  return traj;
}

Trajectory simulate_path(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0, double T,
                         std::uint64_t seed) {
  return simulate_with_increments(m, s, x0,
                                  brownian_increments(seed, step_count(T, s.dt), s.dt), seed);
}

Trajectory exact_alpha0_with_increments(const NoiseSchedule& schedule, const Vec3& b,
                                        const Vec3& x0, double dt,
                                        std::vector<Vec3> increments, std::uint64_t seed) {
  ModelSpec m{ModelKind::Alpha0Exact, b, 0.0, schedule};
  SchemeSpec s;
  s.dt = dt;
  return simulate_with_increments(m, s, x0, std::move(increments), seed);
}

Trajectory exact_alpha0_path(const NoiseSchedule& schedule, const Vec3& b, const Vec3& x0,
                             double T, double dt, std::uint64_t seed) {
  return exact_alpha0_with_increments(schedule, b, x0, dt,
                                      brownian_increments(seed, step_count(T, dt), dt), seed);
}

}  // namespace spinsde
