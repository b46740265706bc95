#pragma once

#include "kvwave/operators.hpp"

#include <Eigen/SparseLU>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace kvwave {

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energies;
  std::vector<double> dissipations;
};

enum class DecayModel { Polynomial, Exponential };

// Polynomial: E ~ constant * t^-exponent (log-log least squares);
// Exponential: E ~ constant * exp(-exponent t) (semi-log least squares).
struct DecayFit {
  DecayModel model = DecayModel::Polynomial;
  double exponent = 0.0;
  double constant = 0.0;
  double r_squared = 0.0;
  std::array<double, 2> window{0.0, 0.0};
  int samples_used = 0;
  bool truncated = false;  // energies hit zero inside the window
};

// (I - dt/2 A_h) U_{k+1} = (I + dt/2 A_h) U_k. One sparse factorization per
// (generator, dt), reused across steps. Accepts negative dt (the exact
// inverse of the +dt map), which the reversibility property uses.
class MidpointStepper {
 public:
  MidpointStepper(const DiscreteGenerator& gen, double dt);
  SystemState step(const SystemState& state) const;
  double dt() const { return dt_; }

 private:
  const DiscreteGenerator* gen_;
  double dt_;
  SpMat minus_, plus_;
  std::unique_ptr<Eigen::SparseLU<SpMat>> lu_;
};

// Single midpoint step; factorizes on every call, so loops should use
// MidpointStepper. Rejects dt <= 0.
SystemState step_implicit_midpoint(const DiscreteGenerator& gen,
                                   const SystemState& state, double dt);

// Samples t = 0 and every sample_every-th step up to t_final.
EnergyTrace simulate(const DiscreteGenerator& gen, const SystemState& initial,
                     double dt, double t_final, int sample_every);

// Fits over samples with t inside the window and E > 0; requires at least 10
// such samples. A sample with E == 0 truncates the fit data at that point.
DecayFit fit_decay_rate(const EnergyTrace& trace,
                        std::array<double, 2> window, DecayModel model);

// Spectral abscissa of A_h and the horizon t* = 1/(2 |abscissa|) past which
// the slowest discrete mode's exponential tail dominates any polynomial fit;
// fit windows must end before t*. Conservative generators get t* = inf.
struct CaveatReport {
  double abscissa = 0.0;
  double t_star = 0.0;
};

CaveatReport semidiscrete_decay_caveat(const DiscreteGenerator& gen);

// Smooth separable bump: u = product of sin(pi x / L) factors, v = y = z = 0.
SystemState default_initial_bump(const DiscreteGenerator& gen);

// Uniform [-1, 1] entries in every block; deterministic in the seed.
SystemState random_state(const DiscreteGenerator& gen, std::uint64_t seed);

}  // namespace kvwave
