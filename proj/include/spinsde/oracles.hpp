#pragma once

// Independent numerical checks of the closed-form results used elsewhere in
// the library. Nothing here calls the closed forms it is meant to verify.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spinsde/dynamics.hpp"

namespace spinsde {

using RealFn = std::function<double(double)>;

struct QuadratureSpec {
  RealFn integrand;
  double t0 = 0.0;
  double t1 = 1.0;
  double tol = 1e-10;
};

/// Adaptive Simpson quadrature.
double adaptive_simpson(const QuadratureSpec& q);

/// sum_j (D_j A)(x) A(x)^T e_j with D_j A from central differences of A.
Vec3 fd_drift_correction(const Vec3& x, double alpha, double h = 1e-5);

/// exp(-F(T)) int_0^T exp(F(u)) g(u) du, accumulated panel by panel with a
/// per-panel exponent shift so that exp(F) is never formed.
double lemma_expint_value(const RealFn& F, const RealFn& g, double T, double tol = 1e-10);

/// True iff min over the tail of t_grid of exp(-F(T)) int_0^T exp(F) g is at
/// least inf_{tail} g / a - tol. The tail is the last `tail_fraction` of the
/// grid points; inf g is sampled on a fine grid over the same interval.
bool lemma_liminf_check(const RealFn& F, double a, const RealFn& g,
                        const std::vector<double>& t_grid, double tol = 1e-3,
                        double tail_fraction = 0.5);

/// RMS terminal differences between successive levels l and l + 1 (level l
/// uses dt / 2^l), l = 0..levels-1, over `replicas` Brownian paths derived
/// from `seed`. Coarse increments are sums of the finest ones.
std::vector<double> refinement_errors(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0,
                                      double T, std::uint64_t seed, int levels,
                                      int replicas = 8);

/// Least-squares slope of -log2(error) against level. NaN if any error is 0.
double refinement_order(const ModelSpec& m, const SchemeSpec& s, const Vec3& x0, double T,
                        std::uint64_t seed, int levels, int replicas = 8);

// --- verification gates -----------------------------------------------------

struct GateResult {
  std::string group;
  std::string name;
  double value = 0.0;
  double lower = 0.0;  // pass iff lower <= value <= upper
  double upper = 0.0;
  bool pass = false;
};

/// Closed-form drift correction under test (x, alpha) -> vector.
using CorrectionFn = std::function<Vec3(const Vec3&, double)>;

/// Gate groups: "drift", "lemmas", "refinement", "norms". An empty list runs
/// all of them.
std::vector<GateResult> run_gates(const std::vector<std::string>& groups,
                                  const CorrectionFn& closed_form);
std::vector<GateResult> run_gates(const std::vector<std::string>& groups = {});

std::string gates_to_csv(const std::vector<GateResult>& gates);

}  // namespace spinsde
