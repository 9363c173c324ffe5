#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinsde/dynamics.hpp"

namespace spinsde {

struct EnsembleConfig {
  ModelSpec model;
  SchemeSpec scheme;
  Vec3 x0 = Vec3::UnitX();
  double T = 1.0;
  int n_paths = 500;
  std::uint64_t master_seed = 0;
  // Must lie on the grid (within 1e-9 dt); empty means {T}.
  std::vector<double> record_times;
  // 0 means hardware concurrency. Results never depend on it.
  unsigned threads = 0;

  void validate() const;
};

/// Seed of path i of an ensemble. Independent of n_paths, so ensembles with
/// more paths extend smaller ones.
std::uint64_t path_seed(std::uint64_t master_seed, std::size_t path_index);

/// {0} plus `count` log-spaced times in [dt, T], snapped to the grid.
std::vector<double> log_spaced_record_times(double T, double dt, int count = 200);

/// Time-indexed sample means and standard errors. Rows are record times,
/// columns are components of the estimand (1 for scalars, 3 for vectors).
struct EstimatorSeries {
  std::vector<double> times;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd std_error;
  int n_paths = 0;

  std::size_t size() const { return times.size(); }
  /// Norm of the per-component standard errors at row i.
  double pooled_std_error(std::size_t i) const { return std_error.row(i).norm(); }
  /// CSV with header t,mean[,mean_y,mean_z],stderr,n_paths.
  std::string to_csv() const;
};

/// Per-path observable evaluated at a record time: (t, state, martingale).
using Observable = std::function<Eigen::VectorXd(double, const Vec3&, const Vec3&)>;

/// Runs cfg.n_paths paths in parallel and averages `observe` at the record
/// times. The reduction is done in path-index order with pairwise summation,
/// so the result is bit-identical for any thread count.
EstimatorSeries run_ensemble(const EnsembleConfig& cfg, int dimension, const Observable& observe);

/// Mean of (|b| - mu_t . b)^p eps_t^{-2p}.
EstimatorSeries estimate_gap_moment(const EnsembleConfig& cfg, int p);

/// Mean of |b/|b| - mu_t|^{2p} eps_t^{-2p}.
EstimatorSeries estimate_sqnorm_moment(const EnsembleConfig& cfg, int p);

/// Limit ((alpha^2 + 1) / (2 alpha))^p p! of the gap moment.
double gap_moment_limit(double alpha, int p);
/// Limit ((alpha^2 + 1) / (alpha |b|))^p p! of the squared-norm moment.
double sqnorm_moment_limit(double alpha, double norm_b, int p);

/// Componentwise mean of mu_t.
EstimatorSeries estimate_mean_state(const EnsembleConfig& cfg);

/// |b/|b| - mu_t|^2 eps_t^{-2 + eta} along one path.
std::vector<double> pathwise_rate_series(const Trajectory& traj, const NoiseSchedule& schedule,
                                         const Vec3& b, double eta);

/// Cumulative sum of (mu_{n+1} . b - mu_n . b)^2 at every grid point.
std::vector<double> realized_qv(const Trajectory& traj, const Vec3& b);

/// Left-point Riemann sum of qv_rate along the path, at every grid point.
std::vector<double> integrated_qv_rate(const Trajectory& traj, const ModelSpec& m);

struct MartingaleMoments {
  EstimatorSeries estimate;   // mean of |N_t|^{2p}
  std::vector<double> bound;  // c_p (exp(2 int_0^t eps^2) - 1)^p; exact curve for p = 1
};

/// BDG-type constant (p (p-1)/2 (p/(p-1))^p)^{p/2}; 1 for p = 1.
double martingale_moment_constant(int p);

/// Requires an Alpha0Exact model.
MartingaleMoments martingale_moment_alpha0(const EnsembleConfig& cfg, int p);

/// Sum of values in index order with pairwise splitting.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace spinsde
