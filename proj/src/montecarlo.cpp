#include "spinsde/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "spinsde/errors.hpp"
#include "spinsde/parallel.hpp"
#include "spinsde/rng.hpp"

namespace spinsde {

namespace {

std::vector<std::size_t> record_indices(const EnsembleConfig& cfg) {
  const std::size_t n_steps = step_count(cfg.T, cfg.scheme.dt);
  std::vector<double> times = cfg.record_times;
  if (times.empty()) times.push_back(static_cast<double>(n_steps) * cfg.scheme.dt);
  std::vector<std::size_t> idx;
  idx.reserve(times.size());
  for (double t : times) {
    const double q = t / cfg.scheme.dt;
    const double n = std::round(q);
    if (t < 0.0 || std::abs(q - n) > 1e-6 || n > static_cast<double>(n_steps)) {
      throw ConfigError("record time " + std::to_string(t) + " is not on the simulation grid");
    }
    idx.push_back(static_cast<std::size_t>(n));
  }
  if (!std::is_sorted(idx.begin(), idx.end()) ||
      std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
    throw ConfigError("record times must be strictly increasing");
  }
  return idx;
}

double moment_term(double base, int p) {
  // std::pow(0, 0) == 1, which gives the constant series for p = 0.
  return std::pow(base, p);
}

}  // namespace

void EnsembleConfig::validate() const {
  model.validate();
  scheme.validate();
  if (n_paths < 2) throw ConfigError("n_paths must be at least 2");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (std::abs(x0.norm() - 1.0) > 1e-12) throw ConfigError("x0 must be a unit vector");
  record_indices(*this);
}

std::uint64_t path_seed(std::uint64_t master_seed, std::size_t path_index) {
  return mix_seed(master_seed, path_index);
}

std::vector<double> log_spaced_record_times(double T, double dt, int count) {
  const std::size_t n_steps = step_count(T, dt);
  std::vector<std::size_t> idx{0};
  const double lo = std::log(dt);
  const double hi = std::log(static_cast<double>(n_steps) * dt);
  for (int k = 0; k < count; ++k) {
    const double frac = count == 1 ? 1.0 : static_cast<double>(k) / (count - 1);
    const double t = std::exp(lo + frac * (hi - lo));
    auto n = static_cast<std::size_t>(std::llround(t / dt));
    n = std::clamp<std::size_t>(n, 1, n_steps);
    if (n != idx.back()) idx.push_back(n);
  }
  std::vector<double> times;
  times.reserve(idx.size());
  for (auto n : idx) times.push_back(static_cast<double>(n) * dt);
  return times;
}

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

std::string EstimatorSeries::to_csv() const {
  std::string out = mean.cols() == 1 ? "t,mean,stderr,n_paths\n"
                                     : "t,mean,mean_y,mean_z,stderr,n_paths\n";
  char buf[64];
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.15g", times[i]);
    out += buf;
    for (Eigen::Index c = 0; c < mean.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.15g", mean(static_cast<Eigen::Index>(i), c));
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.15g,%d\n", pooled_std_error(i), n_paths);
    out += buf;
  }
  return out;
}

EstimatorSeries run_ensemble(const EnsembleConfig& cfg, int dimension, const Observable& observe) {
  cfg.validate();
  const auto rec = record_indices(cfg);
  const std::size_t n_steps = step_count(cfg.T, cfg.scheme.dt);
  const auto n_paths = static_cast<std::size_t>(cfg.n_paths);
  const std::size_t n_rec = rec.size();
  const auto dim = static_cast<std::size_t>(dimension);

  // values[(k * dim + c) * n_paths + path]: contiguous per (time, component).
  std::vector<double> values(n_rec * dim * n_paths);
  parallel_for(n_paths, cfg.threads, [&](std::size_t path) {
    const std::uint64_t seed = path_seed(cfg.master_seed, path);
    const auto dW = brownian_increments(seed, n_steps, cfg.scheme.dt);
    std::size_t k = 0;
    integrate(cfg.model, cfg.scheme, cfg.x0, dW,
              [&](std::size_t n, double t, const Vec3& x, const Vec3& martingale) {
                if (k < n_rec && rec[k] == n) {
                  const Eigen::VectorXd v = observe(t, x, martingale);
                  for (std::size_t c = 0; c < dim; ++c) {
                    values[(k * dim + c) * n_paths + path] = v(static_cast<Eigen::Index>(c));
                  }
                  ++k;
                }
              });
  });

  EstimatorSeries out;
  out.n_paths = cfg.n_paths;
  out.mean.resize(static_cast<Eigen::Index>(n_rec), dimension);
  out.std_error.resize(static_cast<Eigen::Index>(n_rec), dimension);
  out.times.reserve(n_rec);
  std::vector<double> dev(n_paths);
  for (std::size_t k = 0; k < n_rec; ++k) {
    out.times.push_back(static_cast<double>(rec[k]) * cfg.scheme.dt);
    for (std::size_t c = 0; c < dim; ++c) {
      const double* v = values.data() + (k * dim + c) * n_paths;
      // Shifted by the first sample: identical samples give an exact mean.
      const double shift = v[0];
      for (std::size_t i = 0; i < n_paths; ++i) dev[i] = v[i] - shift;
      const double offset = pairwise_sum(dev.data(), n_paths) / static_cast<double>(n_paths);
      const double mean = shift + offset;
      for (std::size_t i = 0; i < n_paths; ++i) {
        dev[i] = (v[i] - shift - offset) * (v[i] - shift - offset);
      }
      const double var = pairwise_sum(dev.data(), n_paths) / static_cast<double>(n_paths - 1);
      const auto row = static_cast<Eigen::Index>(k);
      const auto col = static_cast<Eigen::Index>(c);
      out.mean(row, col) = mean;
      out.std_error(row, col) = std::sqrt(var / static_cast<double>(n_paths));
    }
  }
  return out;
}

EstimatorSeries estimate_gap_moment(const EnsembleConfig& cfg, int p) {
  if (p < 0) throw std::invalid_argument("moment order must be >= 0");
  if (cfg.model.kind != ModelKind::StratonovichIto) {
    throw std::invalid_argument("gap moment requires the Stratonovich model");
  }
  if (!classify(cfg.model.schedule).rate_hypothesis_ok) {
    throw std::invalid_argument("gap moment requires eps'/eps -> 0");
  }
  const double norm_b = cfg.model.b.norm();
  const Vec3 b = cfg.model.b;
  const NoiseSchedule sched = cfg.model.schedule;
  return run_ensemble(cfg, 1, [=](double t, const Vec3& x, const Vec3&) {
    const double eps = sched.eval(t);
    Eigen::VectorXd v(1);
    v(0) = moment_term((norm_b - x.dot(b)) / (eps * eps), p);
    return v;
  });
}

EstimatorSeries estimate_sqnorm_moment(const EnsembleConfig& cfg, int p) {
  if (p < 0) throw std::invalid_argument("moment order must be >= 0");
  if (cfg.model.kind != ModelKind::StratonovichIto) {
    throw std::invalid_argument("squared-norm moment requires the Stratonovich model");
  }
  const Vec3 unit_b = cfg.model.b.normalized();
  const NoiseSchedule sched = cfg.model.schedule;
  return run_ensemble(cfg, 1, [=](double t, const Vec3& x, const Vec3&) {
    const double eps = sched.eval(t);
    Eigen::VectorXd v(1);
    v(0) = moment_term((unit_b - x).squaredNorm() / (eps * eps), p);
    return v;
  });
}

double gap_moment_limit(double alpha, int p) {
  return std::pow((alpha * alpha + 1.0) / (2.0 * alpha), p) * std::tgamma(p + 1.0);
}

double sqnorm_moment_limit(double alpha, double norm_b, int p) {
  return std::pow((alpha * alpha + 1.0) / (alpha * norm_b), p) * std::tgamma(p + 1.0);
}

EstimatorSeries estimate_mean_state(const EnsembleConfig& cfg) {
  return run_ensemble(cfg, 3, [](double, const Vec3& x, const Vec3&) {
    return Eigen::VectorXd(x);
  });
}

std::vector<double> pathwise_rate_series(const Trajectory& traj, const NoiseSchedule& schedule,
                                         const Vec3& b, double eta) {
  if (!(b.norm() > 0.0)) throw std::invalid_argument("pathwise rate: |b| must be positive");
  const Vec3 unit_b = b.normalized();
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const double eps = schedule.eval(traj.times[n]);
    out.push_back((unit_b - traj.states[n]).squaredNorm() * std::pow(eps, eta - 2.0));
  }
  return out;
}

std::vector<double> realized_qv(const Trajectory& traj, const Vec3& b) {
  std::vector<double> out(traj.states.size(), 0.0);
  double acc = 0.0;
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    const double d = traj.states[n].dot(b) - traj.states[n - 1].dot(b);
    acc += d * d;
    out[n] = acc;
  }
  return out;
}

std::vector<double> integrated_qv_rate(const Trajectory& traj, const ModelSpec& m) {
  std::vector<double> out(traj.states.size(), 0.0);
  double acc = 0.0;
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    const double dt = traj.times[n] - traj.times[n - 1];
    acc += qv_rate(m, traj.states[n - 1], traj.times[n - 1]) * dt;
    out[n] = acc;
  }
  return out;
}

double martingale_moment_constant(int p) {
  if (p < 1) throw std::invalid_argument("martingale moment order must be >= 1");
  if (p == 1) return 1.0;
  const double pd = p;
  return std::pow(pd * (pd - 1.0) / 2.0 * std::pow(pd / (pd - 1.0), pd), pd / 2.0);
}

MartingaleMoments martingale_moment_alpha0(const EnsembleConfig& cfg, int p) {
  if (cfg.model.kind != ModelKind::Alpha0Exact) {
    throw std::invalid_argument("martingale moments require the alpha0-exact model");
  }
  const double c_p = martingale_moment_constant(p);
  MartingaleMoments out;
  out.estimate = run_ensemble(cfg, 1, [p](double, const Vec3&, const Vec3& martingale) {
    Eigen::VectorXd v(1);
    v(0) = std::pow(martingale.squaredNorm(), p);
    return v;
  });
  out.bound.reserve(out.estimate.size());
  for (double t : out.estimate.times) {
    const double growth = std::expm1(2.0 * cfg.model.schedule.integral_pow(2.0, 0.0, t));
    out.bound.push_back(c_p * std::pow(growth, p));
  }
  return out;
}

}  // namespace spinsde
