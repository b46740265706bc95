// Acceptance gate: every numbered criterion prints exactly one PASS/FAIL
// line; the process exits 0 only when all of them pass.

#include "kvwave/dynamics.hpp"
#include "kvwave/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kvwave;
using Cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

Grid grid1d(int n, double L = 1.0) {
  return build_grid(Domain{DomainKind::Interval, L}, n);
}

Grid grid2d(int n, double L = 1.0) {
  return build_grid(Domain{DomainKind::Square, L}, n);
}

DiscreteGenerator preset_gen(const Grid& grid, Preset preset, double a = 1.0) {
  const auto [b_field, c_field] = preset_config(
      grid, preset, PresetParams::defaults(preset, grid.domain.L));
  return assemble_generator(grid, a, b_field, c_field);
}

DiscreteGenerator uniform_gen(const Grid& grid, double a, double b0,
                              double c0) {
  const CoefficientField b_field =
      indicator_field(grid, RegionSpec::all(), b0, true);
  const CoefficientField c_field =
      indicator_field(grid, RegionSpec::all(), c0, false);
  return assemble_generator(grid, a, b_field, c_field);
}

std::vector<Cplx> sorted_by_re_im(std::vector<Cplx> v) {
  std::sort(v.begin(), v.end(), [](const Cplx& p, const Cplx& q) {
    if (p.real() != q.real()) return p.real() < q.real();
    return p.imag() < q.imag();
  });
  return v;
}

// ---- 1: high-frequency law |Re lambda| ~ c^2 / (2 b mu^2) -----------------

Outcome criterion1() {
  const ModeSet modes = dirichlet_modes(Domain{DomainKind::Interval, kPi}, 120);
  const SpectrumReport tail = verify_asymptotics(1.0, 1.0, 1.0, modes, 100);
  const SpectrumReport full = verify_asymptotics(1.0, 1.0, 1.0, modes, 20);
  bool monotone = true;
  for (size_t i = 1; i < full.records.size(); ++i) {
    monotone = monotone &&
               full.records[i].rel_gap <= full.records[i - 1].rel_gap + 1e-9;
  }
  Outcome out;
  out.pass = tail.max_rel_gap_tail < 0.02 && monotone;
  out.detail = "worst tail gap " + fmt(tail.max_rel_gap_tail) +
               " (tol 0.02), gaps " +
               (monotone ? "monotone over modes 20..120"
                         : "NOT monotone over modes 20..120");
  return out;
}

// ---- 2: the branch's real part scales as mu^-2 ----------------------------

Outcome criterion2() {
  auto plateau = [](int K) {
    double worst = 0.0;
    for (int k = K; k <= K + 20; ++k) {
      const Cplx root =
          branch_root(characteristic_roots(1.0, 1.0, 1.0, double(k)));
      worst = std::max(worst, std::abs(root.real()));
    }
    return worst;
  };
  const double m20 = plateau(20), m40 = plateau(40), m80 = plateau(80);
  const double r1 = m20 / m40, r2 = m40 / m80;
  Outcome out;
  out.pass = std::abs(r1 / 4.0 - 1.0) <= 0.2 && std::abs(r2 / 4.0 - 1.0) <= 0.2;
  out.detail = "max|Re| ratios across octaves " + fmt(r1) + ", " + fmt(r2) +
               " (want 4 within 20%)";
  return out;
}

// ---- 3: c = 0 decouples into the free wave and the damped factor ----------

Outcome criterion3() {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> coeff(0.2, 5.0);
  std::uniform_real_distribution<double> freq(1.0, 50.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double a = coeff(rng), b = coeff(rng), mu = freq(rng);
    const QuarticRoots qr = characteristic_roots(a, b, 0.0, mu);
    const Cplx disc =
        std::sqrt(Cplx(b * b * mu * mu * mu * mu - 4.0 * a * mu * mu, 0.0));
    std::vector<Cplx> want = {Cplx(0.0, mu), Cplx(0.0, -mu),
                              (-b * mu * mu + disc) / 2.0,
                              (-b * mu * mu - disc) / 2.0};
    std::vector<Cplx> got(qr.roots.begin(), qr.roots.end());
    want = sorted_by_re_im(want);
    got = sorted_by_re_im(got);
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(got[i] - want[i]));
    }
  }
  Outcome out;
  out.pass = worst <= 1e-10;
  out.detail =
      "worst root mismatch " + fmt(worst) + " over 50 draws (tol 1e-10)";
  return out;
}

// ---- 4: discrete energy identity dE/dt = -h^d (v'B2 v + z'B4 z) -----------

Outcome criterion4() {
  std::vector<DiscreteGenerator> gens;
  gens.push_back(preset_gen(grid1d(30), Preset::OneD_bc, 1.0));
  gens.push_back(preset_gen(grid1d(25), Preset::H2_sample, 2.2));
  gens.push_back(preset_gen(grid2d(10), Preset::H4, 1.0));
  gens.push_back(preset_gen(grid2d(9), Preset::H3_sample, 0.8));
  gens.push_back(preset_gen(grid2d(10), Preset::H5, 1.5));

  double worst = 0.0;
  bool nonpositive = true;
  std::uint64_t seed = 1;
  for (const auto& gen : gens) {
    for (int trial = 0; trial < 200; ++trial) {
      const SystemState U = random_state(gen, seed++);
      const Eigen::VectorXd x = stack(U);
      const Eigen::VectorXd Ax = stack(apply_generator(gen, U));
      const double lhs = energy_dot(gen, Ax, x);
      const double rhs = dissipation(gen, U);
      const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
      nonpositive = nonpositive && rhs <= 0.0;
    }
  }
  Outcome out;
  out.pass = worst <= 1e-12 && nonpositive;
  out.detail = "worst relative identity error " + fmt(worst) +
               " over 1000 states (tol 1e-12), dissipation " +
               (nonpositive ? "never positive" : "WENT POSITIVE");
  return out;
}

// ---- 5: generator eigenvalues = per-mode quartic roots (constant coeff) ---

Outcome criterion5() {
  const Grid grid = grid1d(40);
  const DiscreteGenerator gen = uniform_gen(grid, 1.0, 1.0, 1.0);
  const std::vector<Cplx> evs = sorted_by_re_im(generator_spectrum(gen));
  std::vector<Cplx> want;
  for (int k = 1; k <= grid.n; ++k) {
    const QuarticRoots qr =
        characteristic_roots(1.0, 1.0, 1.0, discrete_frequency(grid, k));
    want.insert(want.end(), qr.roots.begin(), qr.roots.end());
  }
  want = sorted_by_re_im(want);
  Outcome out;
  if (evs.size() != want.size()) {
    out.detail = "eigenvalue count mismatch";
    return out;
  }
  double worst = 0.0;
  for (size_t i = 0; i < evs.size(); ++i) {
    worst = std::max(worst, std::abs(evs[i] - want[i]));
  }
  out.pass = worst <= 1e-8;
  out.detail = "worst sorted eigenvalue mismatch " + fmt(worst) +
               " across " + std::to_string(evs.size()) + " values (tol 1e-8)";
  return out;
}

// ---- 6: time integration honors the energy law ----------------------------

Outcome criterion6() {
  const DiscreteGenerator cons = uniform_gen(grid1d(30), 1.7, 0.0, 0.0);
  SystemState state = default_initial_bump(cons);
  const double e0 = energy(cons, state);
  const MidpointStepper stepper(cons, 0.01);
  double drift = 0.0;
  for (int k = 0; k < 1000; ++k) {
    state = stepper.step(state);
    drift = std::max(drift, std::abs(energy(cons, state) - e0) / e0);
  }

  const DiscreteGenerator damped = preset_gen(grid1d(30), Preset::OneD_bc);
  const double dt = 0.02;
  const MidpointStepper dstep(damped, dt);
  SystemState prev = default_initial_bump(damped);
  double eprev = energy(damped, prev);
  const double escale = eprev;
  bool monotone = true;
  double worst_balance = 0.0;
  for (int k = 0; k < 500; ++k) {
    const SystemState next = dstep.step(prev);
    const double enext = energy(damped, next);
    monotone = monotone && enext <= eprev + 1e-12 * escale;
    SystemState mid;
    mid.u = 0.5 * (prev.u + next.u);
    mid.v = 0.5 * (prev.v + next.v);
    mid.y = 0.5 * (prev.y + next.y);
    mid.z = 0.5 * (prev.z + next.z);
    const double diss = dissipation(damped, mid);
    const double scale = std::max({eprev, enext, dt * std::abs(diss)});
    worst_balance =
        std::max(worst_balance, std::abs((enext - eprev) - dt * diss) / scale);
    prev = next;
    eprev = enext;
  }

  Outcome out;
  out.pass = drift < 1e-8 && monotone && worst_balance <= 1e-8;
  out.detail = "conservative drift " + fmt(drift) +
               " over 1000 steps (tol 1e-8); damped energy " +
               (monotone ? "nonincreasing" : "INCREASED") +
               ", worst step balance error " + fmt(worst_balance) +
               " (tol 1e-8)";
  return out;
}

// ---- 7: uniform damping and coupling: resolvent grows like lambda^2 -------

Outcome criterion7() {
  const Grid grid = grid1d(2000);
  const DiscreteGenerator gen = uniform_gen(grid, 1.0, 1.0, 1.0);
  ModeSet modes = dirichlet_modes(grid.domain, 60);
  modes.mus.erase(modes.mus.begin(), modes.mus.begin() + 9);
  modes.labels.erase(modes.labels.begin(), modes.labels.begin() + 9);
  const ResolventSweep swp =
      sweep(gen, LambdaSchedule::at_modes(modes), 1e-6, 2);
  const GrowthFit fit = fit_growth_exponent(
      swp, {swp.lambdas.front() * (1.0 - 1e-12),
            swp.lambdas.back() * (1.0 + 1e-12)});
  Outcome out;
  const bool exponent_ok = fit.exponent >= 1.7 && fit.exponent <= 2.3;
  const bool implied_ok = fit.implied_decay >= 0.86 && fit.implied_decay <= 1.18;
  out.pass = exponent_ok && fit.r_squared > 0.95 && implied_ok;
  out.detail = "growth exponent " + fmt(fit.exponent) +
               " (want within [1.7, 2.3]), r^2 " + fmt(fit.r_squared) +
               " (> 0.95), implied energy decay t^-" + fmt(fit.implied_decay) +
               " bracketing t^-1, " + std::to_string(fit.points_used) +
               " modes";
  return out;
}

// ---- 8: strip-damped squares visibly decay well before the discrete tail --

Outcome criterion8() {
  Outcome out;
  out.pass = true;
  for (Preset preset : {Preset::H4, Preset::H5}) {
    const DiscreteGenerator gen = preset_gen(grid2d(40), preset);
    const CaveatReport caveat = semidiscrete_decay_caveat(gen);
    const double T = 5.0;
    const EnergyTrace trace =
        simulate(gen, default_initial_bump(gen), 0.05, T, 100);
    const double ratio = trace.energies.back() / trace.energies.front();
    const bool ok = ratio < 0.1 && T < caveat.t_star;
    out.pass = out.pass && ok;
    out.detail += preset_name(preset) + ": E(5)/E(0) = " + fmt(ratio) +
                  " (tol 0.1), horizon t* = " + fmt(caveat.t_star) + "; ";
  }
  return out;
}

// ---- 9: decay exponents sit between the guaranteed floor and the ceiling --

Outcome criterion9() {
  struct Case {
    Preset preset;
    double floor;    // guaranteed decay exponent minus margin
    double ceiling;  // 2 + 4 beta plus margin
  };
  const std::vector<Case> cases = {{Preset::H4, 0.15, 10.5},
                                   {Preset::H5, 0.20, 8.5}};
  Outcome out;
  out.pass = true;
  for (const Case& c : cases) {
    const Grid grid = grid2d(32);
    const DiscreteGenerator gen = preset_gen(grid, c.preset);

    const EnergyTrace trace =
        simulate(gen, default_initial_bump(gen), 0.05, 400.0, 10);
    const DecayFit fit =
        fit_decay_rate(trace, {5.0, 320.0}, DecayModel::Polynomial);
    const CaveatReport caveat = semidiscrete_decay_caveat(gen);
    const bool window_ok = 320.0 < caveat.t_star;

    // distinct discrete frequencies, ranks 5..36
    std::vector<std::pair<double, std::array<int, 2>>> freqs;
    for (int m = 1; m <= grid.n; ++m) {
      for (int n2 = 1; n2 <= grid.n; ++n2) {
        freqs.push_back({discrete_frequency_2d(grid, m, n2), {m, n2}});
      }
    }
    std::sort(freqs.begin(), freqs.end());
    ModeSet modes;
    modes.domain = grid.domain;
    for (const auto& [mu, label] : freqs) {
      if (!modes.mus.empty() && mu <= modes.mus.back() * (1.0 + 1e-9)) {
        continue;
      }
      modes.mus.push_back(mu);
      modes.labels.push_back(label);
    }
    const int lo = 4, hi = 36;  // ranks 5..36
    ModeSet picked;
    picked.domain = modes.domain;
    picked.mus.assign(modes.mus.begin() + lo, modes.mus.begin() + hi);
    picked.labels.assign(modes.labels.begin() + lo, modes.labels.begin() + hi);
    const ResolventSweep swp =
        sweep(gen, LambdaSchedule::at_modes(picked), 1e-6, 2);
    const GrowthFit growth = fit_growth_exponent(
        swp, {swp.lambdas.front() * (1.0 - 1e-12),
              swp.lambdas.back() * (1.0 + 1e-12)});

    const bool ok = window_ok && fit.exponent >= c.floor &&
                    growth.exponent <= c.ceiling;
    out.pass = out.pass && ok;
    out.detail += preset_name(c.preset) + ": decay exponent " +
                  fmt(fit.exponent) + " (floor " + fmt(c.floor) +
                  "), resolvent growth " + fmt(growth.exponent) +
                  " (ceiling " + fmt(c.ceiling) + "), fit window below t* = " +
                  fmt(caveat.t_star) + "; ";
  }
  return out;
}

// ---- 10: iterative norm estimates agree with the dense reference ----------

Outcome criterion10() {
  std::vector<DiscreteGenerator> gens;
  gens.push_back(preset_gen(grid1d(40), Preset::OneD_bc, 1.0));
  gens.push_back(preset_gen(grid1d(90), Preset::OneD_bc, 1.3));
  gens.push_back(preset_gen(grid1d(120), Preset::H2_sample, 1.0));
  gens.push_back(preset_gen(grid2d(8), Preset::H4, 1.0));
  gens.push_back(preset_gen(grid2d(7), Preset::H3_sample, 2.0));
  gens.push_back(preset_gen(grid2d(9), Preset::H5, 1.0));

  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  int checked = 0;
  for (int pair = 0; pair < 20; ++pair) {
    const DiscreteGenerator& gen = gens[pair % gens.size()];
    const double lambda =
        0.5 * std::pow(100.0, unif(rng));  // log-uniform in [0.5, 50]
    const NormResult est = resolvent_norm(gen, lambda, 1e-8);
    const double ref = dense_resolvent_norm(gen, lambda);
    worst = std::max(worst, std::abs(est.norm - ref) / ref);
    ++checked;
  }
  Outcome out;
  out.pass = worst <= 1e-5 && checked == 20;
  out.detail = "worst relative disagreement " + fmt(worst) + " over " +
               std::to_string(checked) + " pairs (tol 1e-5)";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> gate = {
      {"high-frequency eigenvalue gap", criterion1},
      {"mu^-2 scaling of the spectral abscissa branch", criterion2},
      {"uncoupled quartic factorization", criterion3},
      {"energy dissipation identity", criterion4},
      {"constant-coefficient spectrum vs quartic union", criterion5},
      {"midpoint integrator energy law", criterion6},
      {"uniform-coefficient resolvent growth", criterion7},
      {"strip-damped energy drop before the discrete horizon", criterion8},
      {"decay floors and resolvent ceilings", criterion9},
      {"iterative vs dense resolvent norms", criterion10},
  };

  int passed = 0;
  for (size_t i = 0; i < gate.size(); ++i) {
    Outcome out;
    try {
      out = gate[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    passed += out.pass ? 1 : 0;
    std::printf("criterion %2zu [%s] %s: %s\n", i + 1,
                out.pass ? "PASS" : "FAIL", gate[i].first.c_str(),
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", passed, gate.size());
  return passed == static_cast<int>(gate.size()) ? 0 : 1;
}
