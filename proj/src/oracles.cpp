#include "spinsde/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "spinsde/montecarlo.hpp"
#include "spinsde/rng.hpp"

namespace spinsde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SimpsonPanel {
  double a, b, fa, fm, fb, whole;
};

double simpson_recurse(const RealFn& f, const SimpsonPanel& p, double tol, int depth) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m);
  const double rm = 0.5 * (m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_recurse(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
         simpson_recurse(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

// Uniform draw in [lo, hi) from the oracle stream.
class OracleDraws {
 public:
  explicit OracleDraws(std::uint64_t seed) : stream_(seed, StreamRole::Oracle) {}
  double uniform(double lo, double hi) {
    // Phi of a standard normal is uniform on (0, 1).
    const double z = stream_.normal3(counter_++)(0);
    return lo + (hi - lo) * 0.5 * std::erfc(-z / std::sqrt(2.0));
  }

 private:
  GaussianStream stream_;
  std::uint64_t counter_ = 0;
};

GateResult make_gate(std::string group, std::string name, double value, double lower,
                     double upper) {
  const bool pass = value >= lower && value <= upper;
  return {std::move(group), std::move(name), value, lower, upper, pass};
}

bool wants(const std::vector<std::string>& groups, const std::string& g) {
  return groups.empty() || std::find(groups.begin(), groups.end(), g) != groups.end();
}

// --- individual gates -------------------------------------------------------

GateResult drift_gate(const CorrectionFn& closed_form) {
  OracleDraws draws(0x5eed0001);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 x(draws.uniform(-2, 2), draws.uniform(-2, 2), draws.uniform(-2, 2));
    const double alpha = draws.uniform(0, 4);
    const Vec3 fd = fd_drift_correction(x, alpha);
    const Vec3 exact = closed_form(x, alpha);
    const double scale = std::max(exact.norm(), 1e-300);
    worst = std::max(worst, (fd - exact).norm() / scale);
  }
  return make_gate("drift", "drift_correction_max_rel_err", worst, 0.0, 1e-6);
}

GateResult expint_gate() {
  // F(t) = a t + c log(1 + t), g(t) = l + d / (1 + t); limit l / a.
  OracleDraws draws(0x5eed0002);
  constexpr double T = 400.0;  // F(T) >= 200 for every draw
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double a = draws.uniform(0.5, 2.0);
    const double c = draws.uniform(0.0, 1.0);
    const double l = draws.uniform(0.5, 3.0);
    const double d = draws.uniform(-1.0, 1.0);
    const double v = lemma_expint_value([=](double t) { return a * t + c * std::log1p(t); },
                                        [=](double t) { return l + d / (1.0 + t); }, T);
    worst = std::max(worst, std::abs(v - l / a) / (l / a));
  }
  return make_gate("lemmas", "expint_max_rel_err", worst, 0.0, 0.02);
}

GateResult liminf_gate() {
  std::vector<double> grid;
  for (double t = 50.0; t <= 100.0 + 1e-12; t += 0.5) grid.push_back(t);
  const RealFn linear = [](double t) { return t; };
  int passed = 0;
  passed += lemma_liminf_check(linear, 1.0, [](double t) { return 1.0 + std::sin(t); }, grid);
  passed += lemma_liminf_check(linear, 1.0, [](double) { return 2.5; }, grid);
  // Unbounded below on [0, 1), >= -1 afterwards.
  passed += lemma_liminf_check(
      [](double t) { return 2.0 * t; }, 2.0,
      [](double t) { return t < 1.0 ? -1.0 / (1.0 - t + 1e-3) : -1.0 + 0.5 * std::cos(t); },
      grid);
  return make_gate("lemmas", "liminf_cases_passed", passed, 3.0, 3.0);
}

std::vector<GateResult> refinement_gates() {
  std::vector<GateResult> out;
  {
    ModelSpec m{ModelKind::StratonovichIto, Vec3::UnitX(), 1.0, NoiseSchedule::constant(0.5)};
    SchemeSpec s{SchemeKind::ExplicitEuler, 1.0 / 64.0};
    const Vec3 x0(0.0, 1.0, 0.0);
    out.push_back(make_gate("refinement", "euler_stratonovich_strong_order",
                            refinement_order(m, s, x0, 1.0, 0x5eed0003, 6, 32), 0.35, 0.75));
  }
  {
    ModelSpec m{ModelKind::Deterministic, Vec3::UnitX(), 2.0, NoiseSchedule::constant(0.1)};
    SchemeSpec s{SchemeKind::ExplicitEuler, 0.05};
    const Vec3 x0(-0.5, std::sqrt(0.75), 0.0);
    out.push_back(make_gate("refinement", "euler_deterministic_order",
                            refinement_order(m, s, x0, 2.0, 0x5eed0004, 6, 1), 0.8, 1.2));
  }
  return out;
}

std::vector<GateResult> norm_gates() {
  std::vector<GateResult> out;
  const ModelSpec fig2{ModelKind::StratonovichIto, Vec3::UnitX(), 2.0,
                       NoiseSchedule::power_law(0.1, 1.0)};
  const Vec3 x0(-0.5, std::sqrt(0.75), 0.0);
  const double dt = 2e-2;
  const auto dW = brownian_increments(0x5eed0005, 10000, dt);

  SchemeSpec midpoint{SchemeKind::SemiImplicitMidpoint, dt};
  out.push_back(make_gate("norms", "midpoint_norm_drift_1e4_steps",
                          simulate_with_increments(fig2, midpoint, x0, dW).norm_drift, 0.0,
                          1e-10));
  SchemeSpec projected{SchemeKind::ProjectedEuler, dt};
  out.push_back(make_gate("norms", "projected_norm_drift_1e4_steps",
                          simulate_with_increments(fig2, projected, x0, dW).norm_drift, 0.0,
                          1e-14));

  // Explicit Euler: norm drift over [0, 10] at dt and dt / 2 on common paths.
  double coarse = 0.0;
  double fine = 0.0;
  for (int r = 0; r < 16; ++r) {
    const auto fine_dW = brownian_increments(path_seed(0x5eed0006, r), 1000, dt / 2);
    coarse += simulate_with_increments(fig2, {SchemeKind::ExplicitEuler, dt}, x0,
                                       coarsen(fine_dW, 2))
                  .norm_drift;
    fine += simulate_with_increments(fig2, {SchemeKind::ExplicitEuler, dt / 2}, x0, fine_dW)
                .norm_drift;
  }
  out.push_back(make_gate("norms", "euler_norm_drift_halving_ratio", fine / coarse, 0.3, 0.8));
  return out;
}

}  // namespace

double adaptive_simpson(const QuadratureSpec& q) {
  if (!(q.t0 < q.t1)) throw std::invalid_argument("quadrature interval must satisfy t0 < t1");
  if (!(q.tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  const double fa = q.integrand(q.t0);
  const double fb = q.integrand(q.t1);
  const double fm = q.integrand(0.5 * (q.t0 + q.t1));
  const double whole = (q.t1 - q.t0) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_recurse(q.integrand, {q.t0, q.t1, fa, fm, fb, whole}, q.tol, 40);
}

Vec3 fd_drift_correction(const Vec3& x, double alpha, double h) {
  if (!(h >= 1e-7 && h <= 1e-3)) throw std::invalid_argument("FD step must lie in [1e-7, 1e-3]");
  // Entries of A(x) written out directly.
  auto A = [alpha](const Vec3& v) {
    const double s = v.squaredNorm();
    Mat3 a;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a(i, j) = (i == j ? alpha * s : 0.0) - alpha * v(i) * v(j);
    }
    a(0, 1) += v(2);
    a(0, 2) -= v(1);
    a(1, 0) -= v(2);
    a(1, 2) += v(0);
    a(2, 0) += v(1);
    a(2, 1) -= v(0);
    return a;
  };
  const Mat3 a = A(x);
  Vec3 out = Vec3::Zero();
  for (int j = 0; j < 3; ++j) {
    const Vec3 e = Vec3::Unit(j);
    const Mat3 dA = (A(x + h * e) - A(x - h * e)) / (2.0 * h);
    out += dA * a.row(j).transpose();
  }
  return out;
}

double lemma_expint_value(const RealFn& F, const RealFn& g, double T, double tol) {
  if (!(T > 0.0)) throw std::invalid_argument("lemma_expint_value: T must be positive");
  if (g == nullptr) return 0.0;
  const double FT = F(T);
  const int panels = std::max(1, static_cast<int>(std::ceil(T)));
  const double width = T / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = k * width;
    const double b = (k + 1 == panels) ? T : a + width;
    const double shift = std::max({F(a), F(0.5 * (a + b)), F(b)});
    const double weight = std::exp(shift - FT);
    if (weight == 0.0) continue;
    const double local = adaptive_simpson(
        {[&](double u) { return std::exp(F(u) - shift) * g(u); }, a, b, tol});
    total += weight * local;
  }
  return total;
}

bool lemma_liminf_check(const RealFn& F, double a, const RealFn& g,
                        const std::vector<double>& t_grid, double tol, double tail_fraction) {
  if (t_grid.empty()) throw std::invalid_argument("lemma_liminf_check: empty grid");
  const auto first = static_cast<std::size_t>(
      std::floor((1.0 - tail_fraction) * static_cast<double>(t_grid.size())));
  const std::size_t start = std::min(first, t_grid.size() - 1);
  double min_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = start; i < t_grid.size(); ++i) {
    min_value = std::min(min_value, lemma_expint_value(F, g, t_grid[i]));
  }
  const double lo = t_grid[start];
  const double hi = t_grid.back();
  double inf_g = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 20000;
  for (int i = 0; i <= kSamples; ++i) inf_g = std::min(inf_g, g(lo + (hi - lo) * i / kSamples));
  return min_value >= inf_g / a - tol;
}

std::vector<double> refinement_errors(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0,
                                      double T, std::uint64_t seed, int levels, int replicas) {
  if (levels < 3) throw std::invalid_argument("refinement needs at least 3 levels");
  const std::size_t n_coarse = step_count(T, s.dt);
  const std::size_t factor = std::size_t{1} << levels;
  std::vector<double> sq(static_cast<std::size_t>(levels), 0.0);
  for (int r = 0; r < replicas; ++r) {
    const auto fine = brownian_increments(path_seed(seed, static_cast<std::size_t>(r)),
                                          n_coarse * factor, s.dt / static_cast<double>(factor));
    // Terminal states at levels 0..levels; level l uses dt / 2^l.
    std::vector<Vec3> ends;
    for (int l = 0; l <= levels; ++l) {
      SchemeSpec sl = s;
      sl.dt = s.dt / static_cast<double>(std::size_t{1} << l);
      ends.push_back(
          simulate_with_increments(m, sl, x0, coarsen(fine, factor >> l)).states.back());
    }
    for (int l = 0; l < levels; ++l) {
      const auto i = static_cast<std::size_t>(l);
      sq[i] += (ends[i] - ends[i + 1]).squaredNorm();
    }
  }
  for (double& e : sq) e = std::sqrt(e / replicas);
  return sq;
}

double refinement_order(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0, double T,
                        std::uint64_t seed, int levels, int replicas) {
  const auto errors = refinement_errors(m, s, x0, T, seed, levels, replicas);
  const auto n = static_cast<double>(errors.size());
  double sl = 0.0, sy = 0.0, sll = 0.0, sly = 0.0;
  for (std::size_t l = 0; l < errors.size(); ++l) {
    if (!(errors[l] > 0.0)) return kNaN;
    const double y = -std::log2(errors[l]);
    const auto x = static_cast<double>(l);
    sl += x;
    sy += y;
    sll += x * x;
    sly += x * y;
  }
  return (n * sly - sl * sy) / (n * sll - sl * sl);
}

std::vector<GateResult> run_gates(const std::vector<std::string>& groups,
                                  const CorrectionFn& closed_form) {
  static const std::vector<std::string> kKnown{"drift", "lemmas", "refinement", "norms"};
  for (const auto& g : groups) {
    if (std::find(kKnown.begin(), kKnown.end(), g) == kKnown.end()) {
      throw std::invalid_argument("unknown gate group: " + g);
    }
  }
  std::vector<GateResult> out;
  if (wants(groups, "drift")) out.push_back(drift_gate(closed_form));
  if (wants(groups, "lemmas")) {
    out.push_back(expint_gate());
    out.push_back(liminf_gate());
  }
  if (wants(groups, "refinement")) {
    for (auto& g : refinement_gates()) out.push_back(std::move(g));
  }
  if (wants(groups, "norms")) {
    for (auto& g : norm_gates()) out.push_back(std::move(g));
  }
  return out;
}

std::vector<GateResult> run_gates(const std::vector<std::string>& groups) {
  return run_gates(groups, [](const Vec3& x, double alpha) {
    return strato_drift_correction(x, alpha);
  });
}

std::string gates_to_csv(const std::vector<GateResult>& gates) {
  std::string out = "group,gate,value,lower,upper,pass\n";
  char buf[160];
  for (const auto& g : gates) {
    std::snprintf(buf, sizeof buf, ",%.6g,%.6g,%.6g,%s\n", g.value, g.lower, g.upper,
                  g.pass ? "pass" : "FAIL");
    out += g.group + "," + g.name + buf;
  }
  return out;
}

}  // namespace spinsde
