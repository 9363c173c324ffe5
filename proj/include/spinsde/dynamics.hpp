#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spinsde/noise_schedule.hpp"
#include "spinsde/spin_algebra.hpp"

namespace spinsde {

enum class ModelKind { Deterministic, RescaledIto, PullbackIto, StratonovichIto, Alpha0Exact };

/// Which dynamics to run and its parameters.
struct ModelSpec {
  ModelKind kind = ModelKind::StratonovichIto;
  Vec3 b = Vec3::UnitX();
  double alpha = 0.0;
  NoiseSchedule schedule = NoiseSchedule::constant(0.1);

  /// Throws ConfigError when the kind/parameter combination is invalid.
  void validate() const;
};

enum class SchemeKind { ExplicitEuler, ProjectedEuler, SemiImplicitMidpoint };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::SemiImplicitMidpoint;
  double dt = 1e-2;
  double fp_tol = 1e-12;
  int fp_maxiter = 50;

  void validate() const;
};

/// One simulated path on the uniform grid t_n = t0 + n dt.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec3> states;
  std::vector<Vec3> brownian_increments;
  std::uint64_t seed = 0;
  double norm_drift = 0.0;  // max_n | |mu_n| - 1 |
  // Martingale N_t of the alpha = 0 exact solution; empty for other models.
  std::vector<Vec3> martingale;
};

/// h(t) = sqrt(2 eps^2 (alpha^2 + 1) t + 1).
double h_of_t(double eps, double alpha, double t);

Vec3 drift(const ModelSpec& m, const Vec3& x, double t);
Mat3 diffusion(const ModelSpec& m, const Vec3& x, double t);

/// Instantaneous quadratic-variation rate of x . b under the Stratonovich
/// model: eps_t^2 (alpha^2 + 1) (|b|^2 - (x . b)^2).
double qv_rate(const ModelSpec& m, const Vec3& x, double t);

/// Advance x over [t, t + dt] with Brownian increment dW.
Vec3 step(const ModelSpec& m, const SchemeSpec& s, const Vec3& x, double t, const Vec3& dW);

/// sqrt(dt)-scaled increments for steps [0, n) of the given seed.
std::vector<Vec3> brownian_increments(std::uint64_t seed, std::size_t n, double dt);

/// Sums consecutive groups of `factor` increments (the coarse-grid Brownian
/// path of a refined one).
std::vector<Vec3> coarsen(std::span<const Vec3> increments, std::size_t factor);

/// Number of grid steps covering [0, T].
std::size_t step_count(double T, double dt);

/// Called for every grid point n = 0..N with (n, t_n, state, martingale).
/// The martingale argument is zero except for the alpha = 0 exact path.
using PathObserver = std::function<void(std::size_t, double, const Vec3&, const Vec3&)>;

/// Runs the model along the given increments without storing the path.
/// Returns the max norm drift. Step failures are rethrown as StepFailure.
double integrate(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0,
                 std::span<const Vec3> increments, const PathObserver& observe);

/// Full trajectory driven by explicit increments (common random numbers).
Trajectory simulate_with_increments(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0,
                                    std::vector<Vec3> increments, std::uint64_t seed = 0);

Trajectory simulate_path(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0, double T,
                         std::uint64_t seed);

/// Exact-rotation integrator for alpha = 0 (precession is exact, the
/// martingale N is accumulated by left-point sums).
Trajectory exact_alpha0_path(const NoiseSchedule& schedule, const Vec3& b, const Vec3& x0,
                             double T, double dt, std::uint64_t seed);
Trajectory exact_alpha0_with_increments(const NoiseSchedule& schedule, const Vec3& b,
                                        const Vec3& x0, double dt,
                                        std::vector<Vec3> increments, std::uint64_t seed = 0);

}  // namespace spinsde
