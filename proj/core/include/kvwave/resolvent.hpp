#pragma once

#include "kvwave/spectral.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace kvwave {

struct ComplexState {
  Eigen::VectorXcd u, v, y, z;

  static ComplexState zero(int N, int blocks = 4);
};

struct SolveResult {
  ComplexState U;
  double residual = 0.0;  // ||(i lambda - A_h) U - F|| / ||F||
  bool singular = false;
};

// Solves (i lambda - A_h) U = F through the real 2x-size block embedding
// [[-A, -lambda I], [lambda I, -A]], with iterative refinement to residual
// <= 1e-10 ||F||. Reports singular systems instead of returning garbage.
SolveResult resolvent_solve(const DiscreteGenerator& gen, double lambda,
                            const ComplexState& F);

struct NormResult {
  double norm = 0.0;
  double estimator_residual = 0.0;  // certified relative-error bound at stop
  double solve_residual = 0.0;  // worst backward error of the inner solves
  int iterations = 0;
  bool converged = false;
  bool singular = false;
};

// Operator norm of (i lambda - A_h)^-1 in the energy inner product
// G = h^d diag(aK, I, K, I) (the metric in which the undamped uncoupled
// generator is skew-adjoint, so the norm equals 1/dist(lambda, spectrum)
// there). Block power iteration on G^-1 R^* G R with Aitken-extrapolated
// termination at relative change < tol.
NormResult resolvent_norm(const DiscreteGenerator& gen, double lambda,
                          double tol = 1e-6,
                          std::uint64_t seed = 0x9e3779b97f4a7c15ull);

struct LambdaSchedule {
  enum class Kind { AtModes, LogUniform };
  Kind kind = Kind::AtModes;
  ModeSet modes;  // AtModes: snapped per label to the grid's discrete
                  // frequencies (the resonance peaks sit there, not at the
                  // continuous mu_k)
  double lo = 1.0, hi = 10.0;
  int count = 10;

  static LambdaSchedule at_modes(ModeSet modes);
  static LambdaSchedule log_uniform(double lo, double hi, int count);
};

// flag bits per sweep point
inline constexpr int kFlagAboveNyquist = 1;
inline constexpr int kFlagSolveFailure = 2;

struct ResolventSweep {
  std::vector<double> lambdas;  // ascending, duplicates removed
  std::vector<double> norms;
  std::vector<double> solve_residuals;
  std::vector<double> estimator_residuals;
  std::vector<int> flags;
  double worst_residual = 0.0;
  double nyquist = 0.0;  // min(1, sqrt(a)) * pi / (2h); points above flagged
};

ResolventSweep sweep(const DiscreteGenerator& gen,
                     const LambdaSchedule& schedule, double tol = 1e-6,
                     int workers = 1,
                     std::uint64_t seed = 0x9e3779b97f4a7c15ull);

struct GrowthFit {
  double exponent = 0.0;  // l in ||R(i lambda)|| ~ lambda^l
  double constant = 0.0;
  double r_squared = 0.0;
  std::array<double, 2> window{0.0, 0.0};
  double implied_decay = 0.0;  // 2 / exponent: energy ~ t^(-implied_decay)
  int points_used = 0;
};

// Log-log least squares over unflagged points inside the window (>= 8
// points required). Flagged points never enter fits.
GrowthFit fit_growth_exponent(const ResolventSweep& swp,
                              std::array<double, 2> window);

// Reference value: 1/sigma_min of the energy-metric similarity transform of
// (i lambda - A_h), computed densely. Cross-validation only; rejects
// interior dimension > 1250.
double dense_resolvent_norm(const DiscreteGenerator& gen, double lambda);

}  // namespace kvwave
