#include "kvwave/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace kvwave {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::complex<double>> dense_eigenvalues(Eigen::MatrixXd A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  std::vector<double> wr(n), wi(n);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, A.data(), n, wr.data(),
                    wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw std::runtime_error("dense eigensolve did not converge (info=" +
                             std::to_string(info) + ")");
  }
  std::vector<std::complex<double>> evs(n);
  for (lapack_int i = 0; i < n; ++i) evs[i] = {wr[i], wi[i]};
  return evs;
}

void sort_by_re_im(std::vector<std::complex<double>>& evs) {
  std::sort(evs.begin(), evs.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

// 1D flux-form weighted stiffness from an x-profile (wall edges included).
SpMat weighted_stiffness_1d(const Eigen::VectorXd& vals, double wall_left,
                            double wall_right, double h) {
  const int n = static_cast<int>(vals.size());
  const double inv_h2 = 1.0 / (h * h);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * n + 2);
  for (int i = 0; i + 1 < n; ++i) {
    const double w = 0.5 * (vals(i) + vals(i + 1)) * inv_h2;
    if (w == 0.0) continue;
    trips.emplace_back(i, i, w);
    trips.emplace_back(i + 1, i + 1, w);
    trips.emplace_back(i, i + 1, -w);
    trips.emplace_back(i + 1, i, -w);
  }
  trips.emplace_back(0, 0, 0.5 * (wall_left + vals(0)) * inv_h2);
  trips.emplace_back(n - 1, n - 1, 0.5 * (vals(n - 1) + wall_right) * inv_h2);
  SpMat K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
  K.makeCompressed();
  return K;
}

}  // namespace

ModeSet dirichlet_modes(const Domain& domain, int count) {
  if (count < 1) throw std::invalid_argument("modes: count must be >= 1");
  ModeSet ms;
  ms.domain = domain;
  ms.mus.reserve(count);
  ms.labels.reserve(count);

  if (domain.kind == DomainKind::Interval) {
    for (int k = 1; k <= count; ++k) {
      ms.mus.push_back(k * kPi / domain.L);
      ms.labels.push_back({k, 0});
    }
    return ms;
  }

  const int M = static_cast<int>(std::ceil(std::sqrt(2.0 * count))) + 2;
  std::vector<std::array<int, 2>> pairs;
  pairs.reserve(M * M);
  for (int m = 1; m <= M; ++m) {
    for (int n = 1; n <= M; ++n) pairs.push_back({m, n});
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    const long ra = long(a[0]) * a[0] + long(a[1]) * a[1];
    const long rb = long(b[0]) * b[0] + long(b[1]) * b[1];
    if (ra != rb) return ra < rb;
    return a < b;
  });
  for (int i = 0; i < count; ++i) {
    const auto& p = pairs[i];
    ms.mus.push_back(kPi * std::sqrt(double(p[0]) * p[0] + double(p[1]) * p[1]) /
                     domain.L);
    ms.labels.push_back(p);
  }
  return ms;
}

QuarticRoots characteristic_roots(double a, double b, double c, double mu) {
  if (!(a > 0.0) || !(b > 0.0) || !(mu > 0.0)) {
    throw std::invalid_argument("quartic: need a > 0, b > 0, mu > 0");
  }
  const double cc = c * c;
  const bool scaled = mu > 1e3;

  // monic coefficients of the working polynomial (in xi = lambda/mu when
  // scaled, in lambda otherwise)
  double c3, c2, c1, c0;
  if (scaled) {
    c3 = b * mu;
    c2 = (1.0 + a) + cc / (mu * mu);
    c1 = b * mu;
    c0 = a;
  } else {
    c3 = b * mu * mu;
    c2 = (1.0 + a) * mu * mu + cc;
    c1 = b * mu * mu * mu * mu;
    c0 = a * mu * mu * mu * mu;
  }

  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  comp(0, 3) = -c0;
  comp(1, 3) = -c1;
  comp(2, 3) = -c2;
  comp(3, 3) = -c3;
  Eigen::EigenSolver<Eigen::Matrix4d> es(comp, false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("quartic: companion eigensolve failed");
  }

  auto horner = [&](std::complex<double> y) {
    return (((y + c3) * y + c2) * y + c1) * y + c0;
  };
  auto dhorner = [&](std::complex<double> y) {
    return ((4.0 * y + 3.0 * c3) * y + 2.0 * c2) * y + c1;
  };

  QuarticRoots qr;
  qr.mu = mu;
  const double mu2 = mu * mu, mu4 = mu2 * mu2;

  for (int i = 0; i < 4; ++i) {
    std::complex<double> y = es.eigenvalues()(i);
    for (int it = 0; it < 5; ++it) {
      const std::complex<double> dp = dhorner(y);
      if (std::abs(dp) == 0.0) break;
      y -= horner(y) / dp;
    }
    const std::complex<double> root = scaled ? y * mu : y;
    // |P(root)| evaluated through the scaled form to avoid overflow
    const std::complex<double> xi = root / mu;
    const std::complex<double> q =
        (((xi + b * mu) * xi + ((1.0 + a) + cc / mu2)) * xi + b * mu) * xi + a;
    const double residual = mu4 * std::abs(q);
    // fp noise of the Horner evaluation itself is eps * sum |c_k| |root|^k;
    // gate the residual against that per-root scale
    const double r = std::abs(root);
    const double eval_scale =
        mu4 * ((((r / mu + b * mu) * (r / mu) + ((1.0 + a) + cc / mu2)) *
                    (r / mu) +
                b * mu) *
                   (r / mu) +
               a);
    if (!(residual < 1e-9 * eval_scale)) {
      std::ostringstream msg;
      msg << "quartic: root polishing left residual " << residual
          << " (tolerance " << 1e-9 * eval_scale << ") at a=" << a
          << " b=" << b << " c=" << c << " mu=" << mu;
      throw std::runtime_error(msg.str());
    }
    qr.roots[i] = root;
    qr.residuals[i] = residual;
  }

  // deterministic order
  std::array<int, 4> perm{0, 1, 2, 3};
  std::sort(perm.begin(), perm.end(), [&](int i, int j) {
    if (qr.roots[i].real() != qr.roots[j].real()) {
      return qr.roots[i].real() < qr.roots[j].real();
    }
    return qr.roots[i].imag() < qr.roots[j].imag();
  });
  QuarticRoots sorted = qr;
  for (int i = 0; i < 4; ++i) {
    sorted.roots[i] = qr.roots[perm[i]];
    sorted.residuals[i] = qr.residuals[perm[i]];
  }
  return sorted;
}

std::pair<std::complex<double>, std::complex<double>> asymptotic_branch(
    double a, double b, double c, double mu) {
  (void)a;
  if (!(b > 0.0) || !(mu > 0.0)) {
    throw std::invalid_argument("asymptotic branch: need b > 0, mu > 0");
  }
  const double re = -c * c / (2.0 * b * mu * mu);
  return {{re, mu}, {re, -mu}};
}

std::complex<double> branch_root(const QuarticRoots& qr) {
  const std::complex<double> target(0.0, qr.mu);
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  int best_i = -1;
  for (int i = 0; i < 4; ++i) {
    if (!(qr.roots[i].imag() > 0.0)) continue;
    const double d = std::abs(qr.roots[i] - target);
    if (d < best) {
      second = best;
      best = d;
      best_i = i;
    } else if (d < second) {
      second = d;
    }
  }
  if (best_i < 0) {
    throw std::runtime_error(
        "branch root: no root with positive imaginary part");
  }
  if (std::isfinite(second) &&
      second - best < 1e-9 * std::max(qr.mu, 1.0)) {
    throw std::runtime_error("branch root: selection ambiguous");
  }
  return qr.roots[best_i];
}

SpectrumReport verify_asymptotics(double a, double b, double c,
                                  const ModeSet& modes, int k_min) {
  if (k_min < 1 || k_min > static_cast<int>(modes.mus.size())) {
    throw std::invalid_argument("verify asymptotics: empty mode tail");
  }
  SpectrumReport report;
  const double target = c * c / (2.0 * b);
  for (int k = k_min; k <= static_cast<int>(modes.mus.size()); ++k) {
    const double mu = modes.mus[k - 1];
    const QuarticRoots qr = characteristic_roots(a, b, c, mu);
    SpectrumRecord rec;
    rec.k = k;
    rec.mu = mu;
    rec.exact = branch_root(qr);
    rec.asym = asymptotic_branch(a, b, c, mu).first;
    rec.abs_re_times_mu2 = std::abs(rec.exact.real()) * mu * mu;
    rec.rel_gap = target > 0.0
                      ? std::abs(rec.abs_re_times_mu2 - target) / target
                      : rec.abs_re_times_mu2;
    report.records.push_back(rec);
  }
  report.max_rel_gap_tail = 0.0;
  for (const auto& rec : report.records) {
    report.max_rel_gap_tail = std::max(report.max_rel_gap_tail, rec.rel_gap);
  }
  return report;
}

std::vector<std::complex<double>> generator_spectrum(
    const DiscreteGenerator& gen) {
  std::vector<std::complex<double>> evs;

  const bool separable = gen.blocks == 4 && gen.grid.dim() == 2 &&
                         gen.xsep.has_value() && gen.B4.rows() == 0;
  if (separable) {
    const int n = gen.grid.n;
    if (n > 2500) {
      throw std::invalid_argument(
          "generator spectrum: grid too large for per-mode eigensolves");
    }
    const Grid line = build_grid({DomainKind::Interval, gen.grid.domain.L}, n);
    const Eigen::MatrixXd Kx = Eigen::MatrixXd(laplacian_stiffness(line));
    const Eigen::MatrixXd Kbx = Eigen::MatrixXd(weighted_stiffness_1d(
        gen.xsep->b, gen.xsep->b_wall_left, gen.xsep->b_wall_right,
        gen.grid.h));
    const Eigen::VectorXd& bx = gen.xsep->b;
    const Eigen::VectorXd& cx = gen.xsep->c;
    evs.reserve(4 * n * n);
    Eigen::MatrixXd A(4 * n, 4 * n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    for (int m = 1; m <= n; ++m) {
      const double nu2 = std::pow(discrete_frequency(gen.grid, m), 2);
      const Eigen::MatrixXd Km = Kx + nu2 * I;
      const Eigen::MatrixXd Kbm =
          Kbx + nu2 * Eigen::MatrixXd(bx.asDiagonal());
      A.setZero();
      A.block(0, n, n, n) = I;
      A.block(n, 0, n, n) = -gen.a * Km;
      A.block(n, n, n, n) = -Kbm;
      A.block(n, 3 * n, n, n) = -Eigen::MatrixXd(cx.asDiagonal());
      A.block(2 * n, 3 * n, n, n) = I;
      A.block(3 * n, n, n, n) = Eigen::MatrixXd(cx.asDiagonal());
      A.block(3 * n, 2 * n, n, n) = -Km;
      auto block_evs = dense_eigenvalues(A);
      evs.insert(evs.end(), block_evs.begin(), block_evs.end());
    }
    sort_by_re_im(evs);
    return evs;
  }

  if (gen.N() > 2500) {
    throw std::invalid_argument(
        "generator spectrum: grid too large for a dense eigensolve "
        "(interior dimension > 2500 per block)");
  }
  evs = dense_eigenvalues(Eigen::MatrixXd(block_matrix(gen)));
  sort_by_re_im(evs);
  return evs;
}

double discrete_frequency(const Grid& grid, int k) {
  if (k < 1 || k > grid.n) {
    throw std::invalid_argument("discrete frequency: mode index out of range");
  }
  const double L = grid.domain.L;
  return (2.0 / grid.h) * std::sin(k * kPi * grid.h / (2.0 * L));
}

double discrete_frequency_2d(const Grid& grid, int m, int n) {
  const double a = discrete_frequency(grid, m);
  const double b = discrete_frequency(grid, n);
  return std::sqrt(a * a + b * b);
}

}  // namespace kvwave
