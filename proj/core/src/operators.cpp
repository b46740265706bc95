#include "kvwave/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kvwave {

SystemState SystemState::zero(int N, int blocks) {
  SystemState s;
  s.u = Eigen::VectorXd::Zero(N);
  s.v = Eigen::VectorXd::Zero(N);
  if (blocks == 4) {
    s.y = Eigen::VectorXd::Zero(N);
    s.z = Eigen::VectorXd::Zero(N);
  }
  return s;
}

double DiscreteGenerator::hd() const {
  return grid.dim() == 2 ? grid.h * grid.h : grid.h;
}

SpMat laplacian_stiffness(const Grid& grid) {
  const int n = grid.n;
  const double w = 1.0 / (grid.h * grid.h);
  std::vector<Eigen::Triplet<double>> trips;

  if (grid.dim() == 1) {
    trips.reserve(3 * n);
    for (int i = 0; i < n; ++i) {
      trips.emplace_back(i, i, 2.0 * w);
      if (i + 1 < n) {
        trips.emplace_back(i, i + 1, -w);
        trips.emplace_back(i + 1, i, -w);
      }
    }
    SpMat K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    K.makeCompressed();
    return K;
  }

  const int N = n * n;
  trips.reserve(5 * N);
  auto idx = [n](int i, int j) { return j * n + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = idx(i, j);
      trips.emplace_back(p, p, 4.0 * w);
      if (i + 1 < n) {
        trips.emplace_back(p, idx(i + 1, j), -w);
        trips.emplace_back(idx(i + 1, j), p, -w);
      }
      if (j + 1 < n) {
        trips.emplace_back(p, idx(i, j + 1), -w);
        trips.emplace_back(idx(i, j + 1), p, -w);
      }
    }
  }
  SpMat K(N, N);
  K.setFromTriplets(trips.begin(), trips.end());
  K.makeCompressed();
  return K;
}

namespace {

void check_field_nonnegative(const CoefficientField& f) {
  auto bad = [](const Eigen::VectorXd& v) {
    return v.size() > 0 && v.minCoeff() < 0.0;
  };
  if (bad(f.values) || bad(f.wall_left) || bad(f.wall_right) ||
      bad(f.wall_bottom) || bad(f.wall_top)) {
    throw std::invalid_argument("weighted stiffness: field must be >= 0");
  }
}

void check_field_matches(const CoefficientField& f, const Grid& grid) {
  if (f.n != grid.n || f.dim != grid.dim()) {
    throw std::invalid_argument("field does not match the grid");
  }
}

}  // namespace

SpMat weighted_stiffness(const Grid& grid, const CoefficientField& field) {
  check_field_matches(field, grid);
  check_field_nonnegative(field);
  const int n = grid.n;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  std::vector<Eigen::Triplet<double>> trips;

  if (grid.dim() == 1) {
    trips.reserve(3 * n + 2);
    for (int i = 0; i + 1 < n; ++i) {
      const double w = 0.5 * (field.values(i) + field.values(i + 1)) * inv_h2;
      if (w == 0.0) continue;
      trips.emplace_back(i, i, w);
      trips.emplace_back(i + 1, i + 1, w);
      trips.emplace_back(i, i + 1, -w);
      trips.emplace_back(i + 1, i, -w);
    }
    trips.emplace_back(0, 0,
                       0.5 * (field.wall_left(0) + field.values(0)) * inv_h2);
    trips.emplace_back(
        n - 1, n - 1,
        0.5 * (field.values(n - 1) + field.wall_right(0)) * inv_h2);
    SpMat K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    K.makeCompressed();
    return K;
  }

  const int N = n * n;
  trips.reserve(8 * N);
  auto idx = [n](int i, int j) { return j * n + i; };
  auto add_edge = [&](int p, int q, double w) {
    if (w == 0.0) return;
    trips.emplace_back(p, p, w);
    trips.emplace_back(q, q, w);
    trips.emplace_back(p, q, -w);
    trips.emplace_back(q, p, -w);
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = idx(i, j);
      if (i + 1 < n) {
        add_edge(p, idx(i + 1, j),
                 0.5 * (field.values(p) + field.values(idx(i + 1, j))) *
                     inv_h2);
      }
      if (j + 1 < n) {
        add_edge(p, idx(i, j + 1),
                 0.5 * (field.values(p) + field.values(idx(i, j + 1))) *
                     inv_h2);
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    trips.emplace_back(idx(0, j), idx(0, j),
                       0.5 * (field.wall_left(j) + field.values(idx(0, j))) *
                           inv_h2);
    trips.emplace_back(
        idx(n - 1, j), idx(n - 1, j),
        0.5 * (field.values(idx(n - 1, j)) + field.wall_right(j)) * inv_h2);
  }
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(idx(i, 0), idx(i, 0),
                       0.5 * (field.wall_bottom(i) + field.values(idx(i, 0))) *
                           inv_h2);
    trips.emplace_back(
        idx(i, n - 1), idx(i, n - 1),
        0.5 * (field.values(idx(i, n - 1)) + field.wall_top(i)) * inv_h2);
  }
  SpMat K(N, N);
  K.setFromTriplets(trips.begin(), trips.end());
  K.makeCompressed();
  return K;
}

DiscreteGenerator assemble_generator(const Grid& grid, double a,
                                     const CoefficientField& b_field,
                                     const CoefficientField& c_field) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("generator: a must be positive");
  }
  check_field_matches(b_field, grid);
  check_field_matches(c_field, grid);

  DiscreteGenerator gen;
  gen.grid = grid;
  gen.a = a;
  gen.blocks = 4;
  gen.K = laplacian_stiffness(grid);
  gen.B2 = weighted_stiffness(grid, b_field);
  gen.c_diag = c_field.values;
  if (gen.c_diag.isZero(0.0)) gen.c_diag.resize(0);

  if (grid.dim() == 2) {
    auto bp = x_profile(b_field);
    auto cp = x_profile(c_field);
    if (bp && cp) {
      XSeparable xs;
      xs.b = bp->values;
      xs.c = cp->values;
      xs.b_wall_left = bp->wall_left;
      xs.b_wall_right = bp->wall_right;
      gen.xsep = std::move(xs);
    }
  }
  return gen;
}

DiscreteGenerator assemble_viscous_generator(const Grid& grid, double a,
                                             const CoefficientField& d_field,
                                             const CoefficientField& c_field,
                                             bool single) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("generator: a must be positive");
  }
  check_field_matches(d_field, grid);
  check_field_nonnegative(d_field);
  if (!single) check_field_matches(c_field, grid);

  const int N = grid.size();
  SpMat D(N, N);
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(N);
    for (int i = 0; i < N; ++i) {
      if (d_field.values(i) != 0.0) {
        trips.emplace_back(i, i, d_field.values(i));
      }
    }
    D.setFromTriplets(trips.begin(), trips.end());
    D.makeCompressed();
  }

  DiscreteGenerator gen;
  gen.grid = grid;
  gen.K = laplacian_stiffness(grid);
  gen.B2 = D;
  if (single) {
    gen.blocks = 2;
    gen.a = 1.0;  // the single damped wave is the unit-speed model
  } else {
    gen.blocks = 4;
    gen.a = a;
    gen.B4 = D;
    gen.c_diag = c_field.values;
    if (gen.c_diag.isZero(0.0)) gen.c_diag.resize(0);
  }
  return gen;
}

namespace {

void check_state(const DiscreteGenerator& gen, const SystemState& s) {
  const int N = gen.N();
  bool ok = s.u.size() == N && s.v.size() == N;
  if (gen.blocks == 4) ok = ok && s.y.size() == N && s.z.size() == N;
  if (!ok) throw std::invalid_argument("state does not match the generator");
}

}  // namespace

SystemState apply_generator(const DiscreteGenerator& gen,
                            const SystemState& state) {
  check_state(gen, state);
  SystemState r;
  r.u = state.v;
  r.v = -gen.a * (gen.K * state.u) - gen.B2 * state.v;
  if (gen.blocks == 2) return r;

  if (gen.c_diag.size() > 0) {
    r.v -= gen.c_diag.cwiseProduct(state.z);
  }
  r.y = state.z;
  r.z = -(gen.K * state.y);
  if (gen.B4.rows() > 0) r.z -= gen.B4 * state.z;
  if (gen.c_diag.size() > 0) {
    r.z += gen.c_diag.cwiseProduct(state.v);
  }
  return r;
}

double energy(const DiscreteGenerator& gen, const SystemState& state) {
  check_state(gen, state);
  double e = gen.a * state.u.dot(gen.K * state.u) + state.v.squaredNorm();
  if (gen.blocks == 4) {
    e += state.y.dot(gen.K * state.y) + state.z.squaredNorm();
  }
  return 0.5 * gen.hd() * e;
}

double dissipation(const DiscreteGenerator& gen, const SystemState& state) {
  check_state(gen, state);
  double d = state.v.dot(gen.B2 * state.v);
  if (gen.blocks == 4 && gen.B4.rows() > 0) {
    d += state.z.dot(gen.B4 * state.z);
  }
  return -gen.hd() * d;
}

SpMat block_matrix(const DiscreteGenerator& gen) {
  const int N = gen.N();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * N + 2 * gen.K.nonZeros() + gen.B2.nonZeros() +
                (gen.B4.rows() > 0 ? gen.B4.nonZeros() : 0) +
                2 * gen.c_diag.size());

  auto add_block = [&](int row0, int col0, const SpMat& m, double scale) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SpMat::InnerIterator it(m, k); it; ++it) {
        trips.emplace_back(row0 + static_cast<int>(it.row()),
                           col0 + static_cast<int>(it.col()),
                           scale * it.value());
      }
    }
  };

  for (int i = 0; i < N; ++i) trips.emplace_back(i, N + i, 1.0);
  add_block(N, 0, gen.K, -gen.a);
  add_block(N, N, gen.B2, -1.0);

  if (gen.blocks == 4) {
    if (gen.c_diag.size() > 0) {
      for (int i = 0; i < N; ++i) {
        if (gen.c_diag(i) != 0.0) {
          trips.emplace_back(N + i, 3 * N + i, -gen.c_diag(i));
          trips.emplace_back(3 * N + i, N + i, gen.c_diag(i));
        }
      }
    }
    for (int i = 0; i < N; ++i) trips.emplace_back(2 * N + i, 3 * N + i, 1.0);
    add_block(3 * N, 2 * N, gen.K, -1.0);
    if (gen.B4.rows() > 0) add_block(3 * N, 3 * N, gen.B4, -1.0);
  }

  SpMat A(gen.full_dim(), gen.full_dim());
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd stack(const SystemState& state) {
  const int N = static_cast<int>(state.u.size());
  const int blocks = state.y.size() > 0 ? 4 : 2;
  Eigen::VectorXd x(blocks * N);
  x.segment(0, N) = state.u;
  x.segment(N, N) = state.v;
  if (blocks == 4) {
    x.segment(2 * N, N) = state.y;
    x.segment(3 * N, N) = state.z;
  }
  return x;
}

SystemState unstack(const Eigen::VectorXd& x, int N, int blocks) {
  SystemState s;
  s.u = x.segment(0, N);
  s.v = x.segment(N, N);
  if (blocks == 4) {
    s.y = x.segment(2 * N, N);
    s.z = x.segment(3 * N, N);
  }
  return s;
}

double energy_dot(const DiscreteGenerator& gen, const Eigen::VectorXd& p,
                  const Eigen::VectorXd& q) {
  const int N = gen.N();
  double e = gen.a * p.segment(0, N).dot(gen.K * q.segment(0, N)) +
             p.segment(N, N).dot(q.segment(N, N));
  if (gen.blocks == 4) {
    e += p.segment(2 * N, N).dot(gen.K * q.segment(2 * N, N)) +
         p.segment(3 * N, N).dot(q.segment(3 * N, N));
  }
  return gen.hd() * e;
}

}  // namespace kvwave
