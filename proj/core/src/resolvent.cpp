#include "kvwave/resolvent.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace kvwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (i lambda - A) z = f over the reals: M [Re z; Im z] = [Re f; Im f] with
// M = [[-A, -lambda I], [lambda I, -A]].
SpMat embed(const SpMat& A, double lambda) {
  const int F = static_cast<int>(A.rows());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * static_cast<size_t>(A.nonZeros()) + 2 * F);
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      trip.emplace_back(it.row(), it.col(), -it.value());
      trip.emplace_back(F + it.row(), F + it.col(), -it.value());
    }
  }
  for (int i = 0; i < F; ++i) {
    trip.emplace_back(i, F + i, -lambda);
    trip.emplace_back(F + i, i, lambda);
  }
  SpMat M(2 * F, 2 * F);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();
  return M;
}

struct EmbeddedSolver {
  SpMat M;
  double norm1 = 0.0;    // max column abs sum
  double norminf = 0.0;  // max row abs sum (= 1-norm of M^T)
  Eigen::SparseLU<SpMat> lu;
  bool factored = false;
  double worst_residual = 0.0;  // worst backward error seen

  EmbeddedSolver(const SpMat& A, double lambda) : M(embed(A, lambda)) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(M.cols());
    Eigen::VectorXd row = Eigen::VectorXd::Zero(M.rows());
    for (int k = 0; k < M.outerSize(); ++k) {
      for (SpMat::InnerIterator it(M, k); it; ++it) {
        col(it.col()) += std::abs(it.value());
        row(it.row()) += std::abs(it.value());
      }
    }
    norm1 = col.maxCoeff();
    norminf = row.maxCoeff();
    lu.compute(M);
    factored = lu.info() == Eigen::Success;
  }

  // One refinement pass, then record the backward error
  // ||r|| / (||f|| + ||M|| ||x||), the resolution limit of a stable solve.
  Eigen::VectorXd solve(const Eigen::VectorXd& f, bool adjoint) {
    const double fn = f.norm();
    if (fn == 0.0) return Eigen::VectorXd::Zero(f.size());
    Eigen::VectorXd x =
        adjoint ? Eigen::VectorXd(lu.transpose().solve(f)) : Eigen::VectorXd(lu.solve(f));
    auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return adjoint ? Eigen::VectorXd(f - M.transpose() * v)
                     : Eigen::VectorXd(f - M * v);
    };
    const double mn = adjoint ? norminf : norm1;
    auto backward = [&](const Eigen::VectorXd& r, const Eigen::VectorXd& v) {
      return r.norm() / (fn + mn * v.norm());
    };
    Eigen::VectorXd r = residual(x);
    if (backward(r, x) > 1e-14) {
      x += adjoint ? Eigen::VectorXd(lu.transpose().solve(r))
                   : Eigen::VectorXd(lu.solve(r));
      r = residual(x);
    }
    worst_residual = std::max(worst_residual, backward(r, x));
    return x;
  }
};

Eigen::VectorXd stack_part(const ComplexState& F, int blocks, bool imag) {
  const int N = static_cast<int>(F.u.size());
  Eigen::VectorXd x(blocks * N);
  auto put = [&](int at, const Eigen::VectorXcd& w) {
    if (imag) {
      x.segment(at * N, N) = w.imag();
    } else {
      x.segment(at * N, N) = w.real();
    }
  };
  put(0, F.u);
  put(1, F.v);
  if (blocks == 4) {
    put(2, F.y);
    put(3, F.z);
  }
  return x;
}

// Energy metric G = h^d diag(aK, I[, K, I]) applied to both halves of the
// embedded vector (real parts, then imaginary parts).
Eigen::VectorXd apply_G(const DiscreteGenerator& gen, const Eigen::VectorXd& x) {
  const int N = gen.N();
  const int full = gen.full_dim();
  const double hd = gen.hd();
  Eigen::VectorXd w(x.size());
  for (int at = 0; at < static_cast<int>(x.size()); at += full) {
    w.segment(at, N) = hd * gen.a * (gen.K * x.segment(at, N));
    w.segment(at + N, N) = hd * x.segment(at + N, N);
    if (gen.blocks == 4) {
      w.segment(at + 2 * N, N) = hd * (gen.K * x.segment(at + 2 * N, N));
      w.segment(at + 3 * N, N) = hd * x.segment(at + 3 * N, N);
    }
  }
  return w;
}

Eigen::VectorXd apply_G_inv(const DiscreteGenerator& gen,
                            const Eigen::SimplicialLLT<SpMat>& kllt,
                            const Eigen::VectorXd& w) {
  const int N = gen.N();
  const int full = gen.full_dim();
  const double hd = gen.hd();
  Eigen::VectorXd x(w.size());
  for (int at = 0; at < static_cast<int>(w.size()); at += full) {
    x.segment(at, N) = kllt.solve(w.segment(at, N)) / (hd * gen.a);
    x.segment(at + N, N) = w.segment(at + N, N) / hd;
    if (gen.blocks == 4) {
      x.segment(at + 2 * N, N) = kllt.solve(w.segment(at + 2 * N, N)) / hd;
      x.segment(at + 3 * N, N) = w.segment(at + 3 * N, N) / hd;
    }
  }
  return x;
}

// <p, q>_G summed over the real and imaginary halves of the embedding.
double gdot2(const DiscreteGenerator& gen, const Eigen::VectorXd& p,
             const Eigen::VectorXd& q) {
  const int F = gen.full_dim();
  return energy_dot(gen, p.head(F), q.head(F)) +
         energy_dot(gen, p.tail(F), q.tail(F));
}

}  // namespace

ComplexState ComplexState::zero(int N, int blocks) {
  ComplexState s;
  s.u = Eigen::VectorXcd::Zero(N);
  s.v = Eigen::VectorXcd::Zero(N);
  if (blocks == 4) {
    s.y = Eigen::VectorXcd::Zero(N);
    s.z = Eigen::VectorXcd::Zero(N);
  }
  return s;
}

SolveResult resolvent_solve(const DiscreteGenerator& gen, double lambda,
                            const ComplexState& F) {
  const int N = gen.N();
  const int full = gen.full_dim();
  if (static_cast<int>(F.u.size()) != N) {
    throw std::invalid_argument("resolvent solve: state size mismatch");
  }

  SolveResult out;
  out.U = ComplexState::zero(N, gen.blocks);

  Eigen::VectorXd f(2 * full);
  f.head(full) = stack_part(F, gen.blocks, false);
  f.tail(full) = stack_part(F, gen.blocks, true);
  const double fn = f.norm();
  if (fn == 0.0) return out;

  EmbeddedSolver solver(block_matrix(gen), lambda);
  if (!solver.factored) {
    out.residual = kInf;
    out.singular = true;
    return out;
  }

  Eigen::VectorXd x = solver.lu.solve(f);
  Eigen::VectorXd r = f - solver.M * x;
  for (int pass = 0; pass < 3 && r.norm() > 1e-10 * fn; ++pass) {
    x += solver.lu.solve(r);
    r = f - solver.M * x;
  }
  out.residual = r.norm() / fn;
  out.singular = out.residual > 1e-10;

  auto get = [&](int at) {
    Eigen::VectorXcd w(N);
    w.real() = x.segment(at * N, N);
    w.imag() = x.segment(full + at * N, N);
    return w;
  };
  out.U.u = get(0);
  out.U.v = get(1);
  if (gen.blocks == 4) {
    out.U.y = get(2);
    out.U.z = get(3);
  }
  return out;
}

NormResult resolvent_norm(const DiscreteGenerator& gen, double lambda,
                          double tol, std::uint64_t seed) {
  if (!(tol > 0.0)) throw std::invalid_argument("resolvent norm: tol must be positive");
  const int full = gen.full_dim();

  NormResult out;
  EmbeddedSolver solver(block_matrix(gen), lambda);
  if (!solver.factored) {
    out.norm = kInf;
    out.singular = true;
    return out;
  }

  Eigen::SimplicialLLT<SpMat> kllt(gen.K);
  if (kllt.info() != Eigen::Success) {
    throw std::runtime_error("resolvent norm: stiffness factorization failed");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  // Block power iteration on W = G^-1 E^T G E^-1 in the G inner product
  // (E = real embedding of i*lambda - A). Each singular value of the
  // resolvent appears as a doubled eigenvalue of W, and near-coincident
  // singular values stall a single iterate, so iterate a small G-orthonormal
  // block and read off the top Rayleigh-Ritz value. The Ritz estimates rise
  // geometrically toward the norm; Aitken extrapolation projects the
  // remaining error for the stopping test and sharpens the returned value.
  const int dim = 2 * full;
  const int p = std::min(8, dim);
  Eigen::MatrixXd X(dim, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < dim; ++i) X(i, j) = dist(rng);
  }
  auto orthonormalize = [&](Eigen::MatrixXd& B) {
    for (int j = 0; j < B.cols(); ++j) {
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < j; ++i) {
          B.col(j) -= gdot2(gen, B.col(j), B.col(i)) * B.col(i);
        }
      }
      double nrm = std::sqrt(gdot2(gen, B.col(j), B.col(j)));
      if (!(nrm > 1e-150)) {
        for (int i = 0; i < dim; ++i) B(i, j) = dist(rng);
        for (int i = 0; i < j; ++i) {
          B.col(j) -= gdot2(gen, B.col(j), B.col(i)) * B.col(i);
        }
        nrm = std::sqrt(gdot2(gen, B.col(j), B.col(j)));
      }
      B.col(j) /= nrm;
    }
  };
  orthonormalize(X);

  constexpr int kMaxIt = 600;
  double s = 0.0, s1 = 0.0, s2 = 0.0;
  double change = kInf, rho = -1.0;
  double shat_prev = -1.0;
  int shat_ok = 0;
  Eigen::MatrixXd Y(dim, p), GY(dim, p);
  for (int it = 1; it <= kMaxIt; ++it) {
    for (int j = 0; j < p; ++j) {
      const Eigen::VectorXd y = solver.solve(X.col(j), false);
      const Eigen::VectorXd t = solver.solve(apply_G(gen, y), true);
      Y.col(j) = apply_G_inv(gen, kllt, t);
      GY.col(j) = apply_G(gen, Y.col(j));
    }
    Eigen::MatrixXd H = X.transpose() * GY;
    H = 0.5 * (H + H.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    s2 = s1;
    s1 = s;
    s = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    out.iterations = it;
    if (it >= 2 && s > 0.0) {
      change = std::abs(s - s1) / s;
      rho = -1.0;
      if (it >= 3 && std::abs(s1 - s2) > 0.0) {
        rho = std::abs(s - s1) / std::abs(s1 - s2);
      }
      if (it >= 3) {
        // A plateau (rho >= 1) cannot certify anything; only a geometric
        // tail bounds the remaining error, by change * rho / (1 - rho).
        // Slow tails stop once the extrapolated value itself is stable
        // under the same projection, twice in a row.
        const bool tail = rho > 0.0 && rho < 1.0;
        const double projected = tail ? change * rho / (1.0 - rho) : kInf;
        double shat = s;
        double shat_bound = kInf;
        if (tail) {
          shat = s + std::abs(s - s1) * rho / (1.0 - rho);
          if (shat_prev > 0.0) {
            shat_bound = std::abs(shat - shat_prev) * rho / (1.0 - rho) / shat;
          }
        }
        shat_ok = tail && shat_bound < tol ? shat_ok + 1 : 0;
        shat_prev = tail ? shat : -1.0;
        out.estimator_residual = change;
        if (change < 1e-13) {
          out.converged = true;
          break;
        }
        if (change < tol && projected < tol) {
          out.estimator_residual = projected;
          out.converged = true;
          break;
        }
        if (shat_ok >= 2) {
          out.estimator_residual = shat_bound;
          out.converged = true;
          break;
        }
      }
    }
    X = Y;
    orthonormalize(X);
  }

  out.norm = s;
  if (rho > 0.0 && rho < 1.0) {
    out.norm = s + std::abs(s - s1) * rho / (1.0 - rho);
  }
  out.solve_residual = solver.worst_residual;
  out.singular = solver.worst_residual > 1e-10;
  return out;
}

LambdaSchedule LambdaSchedule::at_modes(ModeSet modes) {
  LambdaSchedule s;
  s.kind = Kind::AtModes;
  s.modes = std::move(modes);
  return s;
}

LambdaSchedule LambdaSchedule::log_uniform(double lo, double hi, int count) {
  LambdaSchedule s;
  s.kind = Kind::LogUniform;
  s.lo = lo;
  s.hi = hi;
  s.count = count;
  return s;
}

ResolventSweep sweep(const DiscreteGenerator& gen,
                     const LambdaSchedule& schedule, double tol, int workers,
                     std::uint64_t seed) {
  std::vector<double> lambdas;
  if (schedule.kind == LambdaSchedule::Kind::AtModes) {
    if (schedule.modes.labels.empty()) {
      throw std::invalid_argument("sweep: empty mode schedule");
    }
    // Sample at the grid's own frequencies: the resolvent peaks sit at the
    // discrete eigenfrequencies, not at the continuum ones.
    for (const auto& label : schedule.modes.labels) {
      if (gen.grid.dim() == 1) {
        lambdas.push_back(discrete_frequency(gen.grid, label[0]));
      } else {
        lambdas.push_back(discrete_frequency_2d(gen.grid, label[0], label[1]));
      }
    }
  } else {
    if (!(schedule.lo > 0.0) || !(schedule.hi >= schedule.lo)) {
      throw std::invalid_argument("sweep: needs 0 < lo <= hi");
    }
    if (schedule.count < 1) {
      throw std::invalid_argument("sweep: count must be >= 1");
    }
    if (schedule.count == 1) {
      lambdas.push_back(schedule.lo);
    } else {
      const double llo = std::log(schedule.lo);
      const double lhi = std::log(schedule.hi);
      for (int i = 0; i < schedule.count; ++i) {
        lambdas.push_back(
            std::exp(llo + (lhi - llo) * i / (schedule.count - 1)));
      }
    }
  }
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end(),
                            [](double p, double q) {
                              return std::abs(p - q) <= 1e-9 * std::max(p, q);
                            }),
                lambdas.end());

  const int npts = static_cast<int>(lambdas.size());
  ResolventSweep swp;
  swp.lambdas = lambdas;
  swp.norms.resize(npts);
  swp.solve_residuals.resize(npts);
  swp.estimator_residuals.resize(npts);
  swp.flags.resize(npts);
  swp.nyquist = std::min(1.0, std::sqrt(gen.a)) * std::numbers::pi /
                (2.0 * gen.grid.h);

  auto run_point = [&](int i) {
    const NormResult r =
        resolvent_norm(gen, lambdas[i], tol, seed + 1000003ull * i);
    swp.norms[i] = r.norm;
    swp.solve_residuals[i] = r.solve_residual;
    swp.estimator_residuals[i] = r.estimator_residual;
    int flag = 0;
    if (lambdas[i] > swp.nyquist) flag |= kFlagAboveNyquist;
    if (r.singular || !r.converged) flag |= kFlagSolveFailure;
    swp.flags[i] = flag;
  };

  const int nthreads = std::min(std::max(workers, 1), npts);
  if (nthreads <= 1) {
    for (int i = 0; i < npts; ++i) run_point(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < npts; i = next.fetch_add(1)) {
          run_point(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  swp.worst_residual = 0.0;
  for (double r : swp.solve_residuals) {
    swp.worst_residual = std::max(swp.worst_residual, r);
  }
  return swp;
}

GrowthFit fit_growth_exponent(const ResolventSweep& swp,
                              std::array<double, 2> window) {
  if (!(window[0] < window[1])) {
    throw std::invalid_argument("growth fit: window needs lo < hi");
  }
  std::vector<double> X, Y;
  for (size_t i = 0; i < swp.lambdas.size(); ++i) {
    if (swp.flags[i] != 0) continue;
    const double lam = swp.lambdas[i];
    if (lam < window[0] || lam > window[1]) continue;
    if (!(swp.norms[i] > 0.0) || !std::isfinite(swp.norms[i])) continue;
    X.push_back(std::log(lam));
    Y.push_back(std::log(swp.norms[i]));
  }
  if (X.size() < 8) {
    throw std::invalid_argument(
        "growth fit: needs at least 8 unflagged points in the window");
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

  GrowthFit fit;
  fit.exponent = slope;
  fit.constant = std::exp(intercept);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.window = window;
  fit.implied_decay = slope != 0.0 ? 2.0 / slope : kInf;
  fit.points_used = static_cast<int>(m);
  return fit;
}

double dense_resolvent_norm(const DiscreteGenerator& gen, double lambda) {
  if (gen.N() > 1250) {
    throw std::invalid_argument(
        "dense resolvent norm: interior dimension above 1250");
  }
  using CMat = Eigen::MatrixXcd;
  const int N = gen.N();
  const int full = gen.full_dim();
  const std::complex<double> ilam(0.0, lambda);

  CMat M = (-Eigen::MatrixXd(block_matrix(gen))).cast<std::complex<double>>();
  M.diagonal().array() += ilam;

  // Similarity transform S M S^-1 with S'S = G turns the energy-metric norm
  // into a plain 2-norm; S is upper triangular from Cholesky K = LL'.
  Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(gen.K));
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("dense resolvent norm: Cholesky failed");
  }
  const Eigen::MatrixXd Lt = llt.matrixL().transpose();
  const double hd = gen.hd();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(full, full);
  S.block(0, 0, N, N) = std::sqrt(gen.a * hd) * Lt;
  S.block(N, N, N, N) = std::sqrt(hd) * Eigen::MatrixXd::Identity(N, N);
  if (gen.blocks == 4) {
    S.block(2 * N, 2 * N, N, N) = std::sqrt(hd) * Lt;
    S.block(3 * N, 3 * N, N, N) =
        std::sqrt(hd) * Eigen::MatrixXd::Identity(N, N);
  }
  const CMat Sc = S.cast<std::complex<double>>();
  CMat T = Sc * M;
  T = Sc.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(T);

  std::vector<double> sv(full);
  std::vector<double> superb(full > 1 ? full - 1 : 1);
  const lapack_int info = LAPACKE_zgesvd(
      LAPACK_COL_MAJOR, 'N', 'N', full, full,
      reinterpret_cast<lapack_complex_double*>(T.data()), full, sv.data(),
      nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) {
    std::ostringstream msg;
    msg << "dense resolvent norm: SVD failed with info " << info;
    throw std::runtime_error(msg.str());
  }
  const double smin = sv[full - 1];
  return smin > 0.0 ? 1.0 / smin : kInf;
}

}  // namespace kvwave
