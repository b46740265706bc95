#include "kvwave/dynamics.hpp"

#include "kvwave/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace kvwave {

namespace {

SpMat sparse_identity(int n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

}  // namespace

MidpointStepper::MidpointStepper(const DiscreteGenerator& gen, double dt)
    : gen_(&gen), dt_(dt) {
  if (dt == 0.0) throw std::invalid_argument("midpoint step: dt must be nonzero");
  const SpMat A = block_matrix(gen);
  const SpMat I = sparse_identity(gen.full_dim());
  minus_ = I - (dt / 2.0) * A;
  plus_ = I + (dt / 2.0) * A;
  minus_.makeCompressed();
  plus_.makeCompressed();
  lu_ = std::make_unique<Eigen::SparseLU<SpMat>>();
  lu_->compute(minus_);
  if (lu_->info() != Eigen::Success) {
    throw std::runtime_error("midpoint step: factorization failed");
  }
}

SystemState MidpointStepper::step(const SystemState& state) const {
  const Eigen::VectorXd rhs = plus_ * stack(state);
  Eigen::VectorXd x = lu_->solve(rhs);
  const double rhs_norm = rhs.norm();
  double residual = (minus_ * x - rhs).norm();
  if (residual > 1e-10 * rhs_norm && rhs_norm > 0.0) {
    x += lu_->solve(rhs - minus_ * x);
    residual = (minus_ * x - rhs).norm();
    if (residual > 1e-10 * rhs_norm) {
      std::ostringstream msg;
      msg << "midpoint step: linear solve residual " << residual / rhs_norm
          << " exceeds 1e-10";
      throw std::runtime_error(msg.str());
    }
  }
  return unstack(x, gen_->N(), gen_->blocks);
}

SystemState step_implicit_midpoint(const DiscreteGenerator& gen,
                                   const SystemState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("midpoint step: dt must be positive");
  return MidpointStepper(gen, dt).step(state);
}

EnergyTrace simulate(const DiscreteGenerator& gen, const SystemState& initial,
                     double dt, double t_final, int sample_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  if (!(t_final > 0.0)) {
    throw std::invalid_argument("simulate: t_final must be positive");
  }
  if (sample_every < 1) {
    throw std::invalid_argument("simulate: sample_every must be >= 1");
  }
  const long nsteps = std::lround(t_final / dt);
  MidpointStepper stepper(gen, dt);

  EnergyTrace trace;
  trace.times.push_back(0.0);
  trace.energies.push_back(energy(gen, initial));
  trace.dissipations.push_back(dissipation(gen, initial));

  SystemState state = initial;
  for (long k = 1; k <= nsteps; ++k) {
    state = stepper.step(state);
    if (k % sample_every == 0) {
      trace.times.push_back(k * dt);
      trace.energies.push_back(energy(gen, state));
      trace.dissipations.push_back(dissipation(gen, state));
    }
  }
  return trace;
}

DecayFit fit_decay_rate(const EnergyTrace& trace,
                        std::array<double, 2> window, DecayModel model) {
  if (!(window[0] < window[1])) {
    throw std::invalid_argument("decay fit: window needs t_lo < t_hi");
  }
  std::vector<double> X, Y;
  bool truncated = false;
  for (size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    const double e = trace.energies[i];
    if (t < window[0] || t > window[1]) continue;
    if (e <= 0.0) {
      truncated = true;
      break;  // energies hit zero: fit the prefix only
    }
    if (model == DecayModel::Polynomial) {
      if (t <= 0.0) continue;
      X.push_back(std::log(t));
    } else {
      X.push_back(t);
    }
    Y.push_back(std::log(e));
  }
  if (X.size() < 10) {
    throw std::invalid_argument(
        "decay fit: window must contain at least 10 samples with E > 0");
  }

  const size_t m = X.size();
  double sx = 0, sy = 0;
  for (size_t i = 0; i < m; ++i) {
    sx += X[i];
    sy += Y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < m; ++i) {
    const double fit = slope * X[i] + intercept;
    ss_res += (Y[i] - fit) * (Y[i] - fit);
    ss_tot += (Y[i] - my) * (Y[i] - my);
  }

  DecayFit fit;
  fit.model = model;
  fit.exponent = -slope;
  fit.constant = std::exp(intercept);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.window = window;
  fit.samples_used = static_cast<int>(m);
  fit.truncated = truncated;
  return fit;
}

CaveatReport semidiscrete_decay_caveat(const DiscreteGenerator& gen) {
  const auto evs = generator_spectrum(gen);
  double abscissa = -std::numeric_limits<double>::infinity();
  for (const auto& ev : evs) abscissa = std::max(abscissa, ev.real());

  // eigensolver noise floor: treat |Re| below 1e-12 * ||A||_1 as zero
  const SpMat A = block_matrix(gen);
  double norm1 = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    double col = 0.0;
    for (SpMat::InnerIterator it(A, k); it; ++it) col += std::abs(it.value());
    norm1 = std::max(norm1, col);
  }
  const double tol_zero = 1e-12 * (1.0 + norm1);

  CaveatReport report;
  report.abscissa = abscissa;
  report.t_star = abscissa < -tol_zero
                      ? 1.0 / (2.0 * std::abs(abscissa))
                      : std::numeric_limits<double>::infinity();
  return report;
}

SystemState default_initial_bump(const DiscreteGenerator& gen) {
  const int n = gen.grid.n;
  const double L = gen.grid.domain.L;
  SystemState s = SystemState::zero(gen.N(), gen.blocks);
  if (gen.grid.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      s.u(i) = std::sin(std::numbers::pi * gen.grid.coord(i) / L);
    }
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        s.u(j * n + i) =
            std::sin(std::numbers::pi * gen.grid.coord(i) / L) *
            std::sin(std::numbers::pi * gen.grid.coord(j) / L);
      }
    }
  }
  return s;
}

SystemState random_state(const DiscreteGenerator& gen, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SystemState s = SystemState::zero(gen.N(), gen.blocks);
  for (int i = 0; i < gen.N(); ++i) s.u(i) = dist(rng);
  for (int i = 0; i < gen.N(); ++i) s.v(i) = dist(rng);
  if (gen.blocks == 4) {
    for (int i = 0; i < gen.N(); ++i) s.y(i) = dist(rng);
    for (int i = 0; i < gen.N(); ++i) s.z(i) = dist(rng);
  }
  return s;
}

}  // namespace kvwave
