#include <doctest.h>

#include "kvwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

using namespace kvwave;
using Cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Cplx> sorted_by_re_im(std::vector<Cplx> v) {
  std::sort(v.begin(), v.end(), [](const Cplx& p, const Cplx& q) {
    if (p.real() != q.real()) return p.real() < q.real();
    return p.imag() < q.imag();
  });
  return v;
}

double hausdorff(const std::vector<Cplx>& A, const std::vector<Cplx>& B) {
  double worst = 0.0;
  for (const Cplx& a : A) {
    double best = 1e300;
    for (const Cplx& b : B) best = std::min(best, std::abs(a - b));
    worst = std::max(worst, best);
  }
  return worst;
}

Cplx quartic_value(double a, double b, double c, double mu, Cplx lam) {
  const double mu2 = mu * mu;
  return ((((lam + b * mu2) * lam + ((1.0 + a) * mu2 + c * c)) * lam +
           b * mu2 * mu2) *
              lam +
          a * mu2 * mu2);
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("frozen quartic regression roots at a=b=c=1, mu=pi") {
  const QuarticRoots qr = characteristic_roots(1.0, 1.0, 1.0, kPi);
  const std::vector<Cplx> want = {
      {-8.6226007753343978e+00, 0.0},
      {-1.1446203597088838e+00, 0.0},
      {-5.1191633023038405e-02, -3.1411755471157279e+00},
      {-5.1191633023038405e-02, +3.1411755471157279e+00}};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(qr.roots[i] - want[i]) < 1e-9);
    CHECK(qr.residuals[i] < 1e-9 * kPi * kPi * kPi * kPi);
  }
}

TEST_CASE("root sums and products match the coefficients") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coeff(0.2, 5.0);
  std::uniform_real_distribution<double> freq(1.0, 80.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = coeff(rng), b = coeff(rng), c = coeff(rng);
    const double mu = freq(rng);
    const double mu2 = mu * mu;
    const QuarticRoots qr = characteristic_roots(a, b, c, mu);
    const auto& r = qr.roots;
    const Cplx sum = r[0] + r[1] + r[2] + r[3];
    const Cplx pairs = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] +
                       r[1] * r[2] + r[1] * r[3] + r[2] * r[3];
    const Cplx prod = r[0] * r[1] * r[2] * r[3];
    CHECK(std::abs(sum + b * mu2) < 1e-8 * (1.0 + b * mu2));
    CHECK(std::abs(pairs - ((1.0 + a) * mu2 + c * c)) <
          1e-8 * (1.0 + (1.0 + a) * mu2 + c * c));
    CHECK(std::abs(prod - a * mu2 * mu2) < 1e-8 * (1.0 + a * mu2 * mu2));
  }
}

TEST_CASE("roots close under conjugation") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> coeff(0.2, 5.0);
  std::uniform_real_distribution<double> freq(1.0, 200.0);
  for (int trial = 0; trial < 100; ++trial) {
    const QuarticRoots qr = characteristic_roots(coeff(rng), coeff(rng),
                                                 coeff(rng), freq(rng));
    std::vector<Cplx> roots(qr.roots.begin(), qr.roots.end());
    std::vector<Cplx> conj;
    for (const Cplx& r : roots) conj.push_back(std::conj(r));
    CHECK(hausdorff(sorted_by_re_im(roots), sorted_by_re_im(conj)) < 1e-12);
  }
}

TEST_CASE("c = 0 splits into the free wave and the damped factor") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> coeff(0.2, 5.0);
  std::uniform_real_distribution<double> freq(1.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = coeff(rng), b = coeff(rng), mu = freq(rng);
    const QuarticRoots qr = characteristic_roots(a, b, 0.0, mu);
    const Cplx disc =
        std::sqrt(Cplx(b * b * mu * mu * mu * mu - 4.0 * a * mu * mu, 0.0));
    std::vector<Cplx> want = {Cplx(0.0, mu), Cplx(0.0, -mu),
                              (-b * mu * mu + disc) / 2.0,
                              (-b * mu * mu - disc) / 2.0};
    std::vector<Cplx> got(qr.roots.begin(), qr.roots.end());
    CHECK(hausdorff(sorted_by_re_im(got), sorted_by_re_im(want)) < 1e-10);
  }
}

TEST_CASE("quartic equals the uncoupled product plus the c^2 lambda^2 shift") {
  // pins the adopted lambda^2 coefficient: P = (l^2+mu^2)(l^2+b mu^2 l+a mu^2)
  // + c^2 l^2
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> coeff(0.2, 5.0);
  std::uniform_real_distribution<double> part(-20.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = coeff(rng), b = coeff(rng), c = coeff(rng);
    const double mu = coeff(rng) * 4.0;
    const Cplx lam(part(rng), part(rng));
    const Cplx lhs = quartic_value(a, b, c, mu, lam);
    const Cplx rhs = (lam * lam + mu * mu) *
                         (lam * lam + b * mu * mu * lam + a * mu * mu) +
                     c * c * lam * lam;
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("rescaled path handles huge frequencies") {
  const double a = 2.0, b = 0.5, c = 3.0, mu = 1e6;
  const QuarticRoots qr = characteristic_roots(a, b, c, mu);
  const Cplx root = branch_root(qr);
  const double want_re = -c * c / (2.0 * b * mu * mu);
  CHECK(std::abs(root.real() - want_re) < 0.01 * std::abs(want_re));
  CHECK(root.imag() == doctest::Approx(mu).epsilon(1e-6));
}

TEST_CASE("asymptotic branch formula") {
  const auto [plus, minus] = asymptotic_branch(1.0, 1.0, 1.0, 10.0);
  CHECK(plus == Cplx(-0.005, 10.0));
  CHECK(minus == Cplx(-0.005, -10.0));
}

TEST_CASE("branch root picks the oscillatory root near i mu") {
  const QuarticRoots qr = characteristic_roots(1.0, 1.0, 1.0, kPi);
  const Cplx root = branch_root(qr);
  CHECK(root.imag() > 0.0);
  CHECK(std::abs(root - Cplx(-5.1191633023038405e-02,
                             3.1411755471157279e+00)) < 1e-9);
}

TEST_CASE("interval modes are k pi / L") {
  const ModeSet modes = dirichlet_modes(Domain{DomainKind::Interval, kPi}, 6);
  REQUIRE(modes.mus.size() == 6);
  for (int k = 1; k <= 6; ++k) {
    CHECK(modes.mus[k - 1] == doctest::Approx(k).epsilon(1e-14));
    CHECK(modes.labels[k - 1][0] == k);
  }
}

TEST_CASE("square modes ascend through m^2 + n^2 with multiplicity") {
  const ModeSet modes = dirichlet_modes(Domain{DomainKind::Square, 1.0}, 11);
  const std::vector<int> sums = {2, 5, 5, 8, 10, 10, 13, 13, 17, 17, 18};
  REQUIRE(modes.mus.size() == 11);
  for (size_t i = 0; i < sums.size(); ++i) {
    CHECK(modes.mus[i] == doctest::Approx(kPi * std::sqrt(sums[i])));
    const auto& l = modes.labels[i];
    CHECK(l[0] * l[0] + l[1] * l[1] == sums[i]);
  }
  for (size_t i = 1; i < modes.mus.size(); ++i) {
    CHECK(modes.mus[i] >= modes.mus[i - 1]);
  }
}

TEST_CASE("tail asymptotics: gap under 2% and decreasing") {
  const ModeSet modes = dirichlet_modes(Domain{DomainKind::Interval, kPi}, 120);
  const SpectrumReport tail = verify_asymptotics(1.0, 1.0, 1.0, modes, 100);
  REQUIRE(tail.records.size() == 21);
  CHECK(tail.max_rel_gap_tail < 0.02);
  for (const auto& rec : tail.records) {
    CHECK(rec.abs_re_times_mu2 == doctest::Approx(0.5).epsilon(0.02));
  }

  const SpectrumReport full = verify_asymptotics(1.0, 1.0, 1.0, modes, 20);
  for (size_t i = 1; i < full.records.size(); ++i) {
    CHECK(full.records[i].rel_gap <= full.records[i - 1].rel_gap + 1e-9);
  }

  const SpectrumReport un = verify_asymptotics(1.0, 1.0, 0.0, modes, 100);
  CHECK(un.max_rel_gap_tail < 1e-10);  // c = 0: branch sits on the axis
}

TEST_CASE("undamped uncoupled spectrum is the two imaginary fans") {
  const Grid grid = build_grid(Domain{DomainKind::Interval, 1.0}, 10);
  const double a = 2.25;
  const CoefficientField zero =
      indicator_field(grid, RegionSpec::all(), 0.0, true);
  const DiscreteGenerator gen = assemble_generator(grid, a, zero, zero);
  const auto evs = generator_spectrum(gen);
  REQUIRE(evs.size() == 40);

  std::vector<Cplx> want;
  for (int k = 1; k <= 10; ++k) {
    const double mu = discrete_frequency(grid, k);
    want.emplace_back(0.0, std::sqrt(a) * mu);
    want.emplace_back(0.0, -std::sqrt(a) * mu);
    want.emplace_back(0.0, mu);
    want.emplace_back(0.0, -mu);
  }
  for (const Cplx& ev : evs) CHECK(std::abs(ev.real()) < 1e-10);
  CHECK(hausdorff(evs, want) < 1e-8);
  CHECK(hausdorff(want, evs) < 1e-8);
}

TEST_CASE("constant-coefficient spectrum equals the per-mode quartic union") {
  for (int n : {10, 20}) {
    const Grid grid = build_grid(Domain{DomainKind::Interval, 1.0}, n);
    const CoefficientField one =
        indicator_field(grid, RegionSpec::all(), 1.0, true);
    const DiscreteGenerator gen = assemble_generator(grid, 1.0, one, one);
    const auto evs = sorted_by_re_im(generator_spectrum(gen));

    std::vector<Cplx> want;
    for (int k = 1; k <= n; ++k) {
      const QuarticRoots qr =
          characteristic_roots(1.0, 1.0, 1.0, discrete_frequency(grid, k));
      want.insert(want.end(), qr.roots.begin(), qr.roots.end());
    }
    want = sorted_by_re_im(want);
    REQUIRE(evs.size() == want.size());
    double worst = 0.0;
    for (size_t i = 0; i < evs.size(); ++i) {
      worst = std::max(worst, std::abs(evs[i] - want[i]));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("separable 2D path matches the dense solve") {
  const Grid grid = build_grid(Domain{DomainKind::Square, 1.0}, 8);
  const auto [b_field, c_field] =
      preset_config(grid, Preset::H4, PresetParams::defaults(Preset::H4, 1.0));
  const DiscreteGenerator gen = assemble_generator(grid, 1.5, b_field, c_field);
  REQUIRE(gen.xsep.has_value());

  DiscreteGenerator dense = gen;
  dense.xsep.reset();
  const auto fast = generator_spectrum(gen);
  const auto slow = generator_spectrum(dense);
  REQUIRE(fast.size() == slow.size());
  double scale = 0.0;
  for (const Cplx& ev : slow) scale = std::max(scale, std::abs(ev));
  CHECK(hausdorff(fast, slow) < 1e-7 * (1.0 + scale));
  CHECK(hausdorff(slow, fast) < 1e-7 * (1.0 + scale));
}

TEST_CASE("dense spectra beyond the cutoff are rejected") {
  const Grid big = build_grid(Domain{DomainKind::Interval, 1.0}, 2501);
  const CoefficientField zero =
      indicator_field(big, RegionSpec::all(), 0.0, true);
  const DiscreteGenerator gen = assemble_generator(big, 1.0, zero, zero);
  CHECK_THROWS_AS(generator_spectrum(gen), std::invalid_argument);

  const Grid sq = build_grid(Domain{DomainKind::Square, 1.0}, 51);
  const auto [b3, c3] = preset_config(
      sq, Preset::H3_sample, PresetParams::defaults(Preset::H3_sample, 1.0));
  const DiscreteGenerator g3 = assemble_generator(sq, 1.0, b3, c3);
  REQUIRE_FALSE(g3.xsep.has_value());
  CHECK_THROWS_AS(generator_spectrum(g3), std::invalid_argument);
}

TEST_CASE("discrete frequencies undershoot the continuum ones") {
  const Grid grid = build_grid(Domain{DomainKind::Interval, 1.0}, 50);
  CHECK(discrete_frequency(grid, 1) ==
        doctest::Approx(kPi).epsilon(1e-3));
  CHECK(discrete_frequency(grid, 1) < kPi);
  CHECK_THROWS_AS(discrete_frequency(grid, 0), std::invalid_argument);
  CHECK_THROWS_AS(discrete_frequency(grid, 51), std::invalid_argument);

  const Grid sq = build_grid(Domain{DomainKind::Square, 1.0}, 20);
  const double f1 = discrete_frequency(sq, 1);
  const double f2 = discrete_frequency(sq, 2);
  CHECK(discrete_frequency_2d(sq, 1, 2) ==
        doctest::Approx(std::sqrt(f1 * f1 + f2 * f2)).epsilon(1e-14));
}

TEST_CASE("branch root requires a root above the axis") {
  QuarticRoots flat;
  flat.mu = 1.0;
  flat.roots = {Cplx(-1.0, 0.0), Cplx(-2.0, 0.0), Cplx(-3.0, 0.0),
                Cplx(-4.0, 0.0)};
  CHECK_THROWS_AS(branch_root(flat), std::runtime_error);
}

TEST_CASE("characteristic_roots validates inputs") {
  CHECK_THROWS_AS(characteristic_roots(0.0, 1.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(characteristic_roots(1.0, -1.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(characteristic_roots(1.0, 1.0, 1.0, 0.0),
                  std::invalid_argument);
}

}  // TEST_SUITE
