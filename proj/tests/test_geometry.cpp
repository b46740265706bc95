#include <doctest.h>

#include "kvwave/geometry.hpp"

#include <cmath>

using namespace kvwave;

namespace {

Domain interval(double L = 1.0) { return Domain{DomainKind::Interval, L}; }
Domain square(double L = 1.0) { return Domain{DomainKind::Square, L}; }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("grid spacing and interior coordinates") {
  const Grid g = build_grid(interval(2.0), 3);
  CHECK(g.h == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.dim() == 1);
  CHECK(g.size() == 3);
  CHECK(g.coord(0) == doctest::Approx(0.5));
  CHECK(g.coord(2) == doctest::Approx(1.5));

  const Grid s = build_grid(square(1.0), 4);
  CHECK(s.dim() == 2);
  CHECK(s.size() == 16);
  CHECK(s.h == doctest::Approx(0.2));

  CHECK_THROWS_AS(build_grid(interval(0.0), 3), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(interval(1.0), 0), std::invalid_argument);
}

TEST_CASE("region membership is half-open") {
  const RegionSpec r = RegionSpec::interval(0.2, 0.6);
  CHECK(r.contains(0.2));
  CHECK(r.contains(0.59999));
  CHECK_FALSE(r.contains(0.6));
  CHECK_FALSE(r.contains(0.19999));

  const RegionSpec sx = RegionSpec::strip(0, 0.1, 0.5);
  CHECK(sx.contains(0.1, 0.99));
  CHECK_FALSE(sx.contains(0.5, 0.0));

  const RegionSpec sy = RegionSpec::strip(1, 0.1, 0.5);
  CHECK(sy.contains(0.9, 0.1));
  CHECK_FALSE(sy.contains(0.1, 0.5));

  const RegionSpec b = RegionSpec::box(0.0, 0.5, 0.25, 0.75);
  CHECK(b.contains(0.0, 0.25));
  CHECK_FALSE(b.contains(0.5, 0.5));
  CHECK_FALSE(b.contains(0.25, 0.75));

  CHECK(RegionSpec::all().contains(123.0, -4.0));
}

TEST_CASE("region validation names the violated constraint") {
  const Grid g1 = build_grid(interval(), 5);
  const Grid g2 = build_grid(square(), 5);
  CHECK_THROWS_AS(validate_region(RegionSpec::interval(0.5, 0.2), g1),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_region(RegionSpec::interval(0.1, 1.2), g1),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_region(RegionSpec::strip(1, 0.1, 0.4), g1),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_region(RegionSpec::box(0.1, 0.4, 0.1, 0.4), g1),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_region(RegionSpec::box(0.1, 0.4, 0.1, 0.4), g2));
  CHECK_NOTHROW(validate_region(RegionSpec::all(), g1));
}

TEST_CASE("indicator fields sample interior nodes and walls") {
  const Grid g = build_grid(interval(1.0), 9);  // h = 0.1, x_i = 0.1 (i+1)
  const CoefficientField f =
      indicator_field(g, RegionSpec::interval(0.0, 0.35), 2.0, true);
  CHECK(f.values(0) == 2.0);  // x = 0.1
  CHECK(f.values(2) == 2.0);  // x = 0.3
  CHECK(f.values(3) == 0.0);  // x = 0.4
  CHECK(f.wall_left(0) == 2.0);
  CHECK(f.wall_right(0) == 0.0);

  CHECK_THROWS_AS(indicator_field(g, RegionSpec::all(), -1.0, true),
                  std::invalid_argument);
  CHECK_NOTHROW(indicator_field(g, RegionSpec::all(), -1.0, false));

  const Grid s = build_grid(square(1.0), 4);  // h = 0.2
  const CoefficientField fs =
      indicator_field(s, RegionSpec::strip(0, 0.3, 0.7), 1.0);
  CHECK(fs.values(0 + 4 * 1) == 0.0);  // x = 0.2
  CHECK(fs.values(1 + 4 * 1) == 1.0);  // x = 0.4
  CHECK(fs.values(2 + 4 * 2) == 1.0);  // x = 0.6
  CHECK(fs.values(3 + 4 * 0) == 0.0);  // x = 0.8
  CHECK(fs.wall_bottom(1) == 1.0);     // (0.4, 0)
  CHECK(fs.wall_top(3) == 0.0);        // (0.8, 1)
  CHECK(fs.wall_left(0) == 0.0);
  CHECK(fs.wall_right(2) == 0.0);
}

TEST_CASE("preset defaults and nesting") {
  const double L = 2.0;
  const PresetParams h4 = PresetParams::defaults(Preset::H4, L);
  CHECK(h4.bounds[0] == doctest::Approx(0.4));
  CHECK(h4.bounds[3] == doctest::Approx(1.6));

  const Grid s = build_grid(square(L), 19);  // h = 0.1
  const auto [b4, c4] = preset_config(s, Preset::H4, h4);
  // c support strictly inside b support, both x-strips
  for (int j = 0; j < 19; ++j) {
    for (int i = 0; i < 19; ++i) {
      const double bv = b4.values(i + 19 * j);
      const double cv = c4.values(i + 19 * j);
      if (cv != 0.0) CHECK(bv != 0.0);
      const double x = s.coord(i);
      CHECK(bv == ((x >= 0.4 && x < 1.6) ? 1.0 : 0.0));
      CHECK(cv == ((x >= 0.8 && x < 1.2) ? 1.0 : 0.0));
    }
  }

  const auto [b5, c5] = preset_config(s, Preset::H5,
                                      PresetParams::defaults(Preset::H5, L));
  for (int i = 0; i < 19; ++i) {
    const double x = s.coord(i);
    CHECK(b5.values(i) == ((x < 1.0) ? 1.0 : 0.0));
    CHECK(c5.values(i) == ((x < 0.5) ? 1.0 : 0.0));
  }
  CHECK(b5.wall_left(0) == 1.0);  // boundary strips keep wall strength
  CHECK(c5.wall_left(0) == 1.0);
  CHECK(b5.wall_right(0) == 0.0);

  const Grid g = build_grid(interval(1.0), 9);
  const auto [b1, c1] = preset_config(
      g, Preset::OneD_bc, PresetParams::defaults(Preset::OneD_bc, 1.0));
  for (int i = 0; i < 9; ++i) {
    const double x = g.coord(i);
    CHECK(b1.values(i) == ((x >= 0.1 && x < 0.5) ? 1.0 : 0.0));
    CHECK(c1.values(i) == ((x >= 0.3 && x < 0.7) ? 1.0 : 0.0));
  }
}

TEST_CASE("preset validation names ordering constraints") {
  const Domain s = square(1.0);
  PresetParams bad = PresetParams::defaults(Preset::H5, 1.0);
  std::swap(bad.bounds[0], bad.bounds[1]);  // eps1 > eps2
  CHECK_THROWS_WITH_AS(validate_preset_params(Preset::H5, bad, s),
                       doctest::Contains("eps1"), std::invalid_argument);

  CHECK_THROWS_AS(validate_preset_params(
                      Preset::H4, PresetParams::defaults(Preset::H4, 1.0),
                      interval(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_preset_params(
                      Preset::H2_sample,
                      PresetParams::defaults(Preset::H2_sample, 1.0), s),
                  std::invalid_argument);

  PresetParams negb = PresetParams::defaults(Preset::H4, 1.0);
  negb.b0 = -0.5;
  CHECK_THROWS_AS(validate_preset_params(Preset::H4, negb, s),
                  std::invalid_argument);
}

TEST_CASE("preset names round-trip") {
  for (Preset p : {Preset::H1_sample, Preset::H2_sample, Preset::H3_sample,
                   Preset::H4, Preset::H5, Preset::OneD_bc}) {
    const auto back = preset_from_name(preset_name(p));
    REQUIRE(back.has_value());
    CHECK(*back == p);
  }
  CHECK_FALSE(preset_from_name("H9").has_value());
}

TEST_CASE("x-profile detection") {
  const Grid s = build_grid(square(1.0), 6);
  const CoefficientField xs =
      indicator_field(s, RegionSpec::strip(0, 0.2, 0.6), 3.0);
  const auto px = x_profile(xs);
  REQUIRE(px.has_value());
  for (int i = 0; i < 6; ++i) {
    const double x = s.coord(i);
    CHECK(px->values(i) == ((x >= 0.2 && x < 0.6) ? 3.0 : 0.0));
  }
  CHECK(px->wall_left == 0.0);

  CHECK_FALSE(x_profile(indicator_field(s, RegionSpec::strip(1, 0.2, 0.6), 1.0))
                  .has_value());
  CHECK_FALSE(
      x_profile(indicator_field(s, RegionSpec::box(0.2, 0.6, 0.2, 0.6), 1.0))
          .has_value());
  CHECK(x_profile(indicator_field(s, RegionSpec::all(), 2.0)).has_value());

  const Grid g = build_grid(interval(1.0), 6);
  CHECK_FALSE(
      x_profile(indicator_field(g, RegionSpec::all(), 1.0)).has_value());
}

}  // TEST_SUITE
