#include "kvwave/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kvwave {

Grid build_grid(const Domain& domain, int n) {
  if (!(domain.L > 0.0)) {
    throw std::invalid_argument("domain: L must be positive");
  }
  if (n < 1) {
    throw std::invalid_argument("grid: need at least one interior node");
  }
  Grid g;
  g.domain = domain;
  g.n = n;
  g.h = domain.L / (n + 1);
  return g;
}

RegionSpec RegionSpec::all() { return RegionSpec{}; }

RegionSpec RegionSpec::strip(int axis, double lo, double hi) {
  RegionSpec r;
  r.kind = RegionKind::Strip;
  r.axis = axis;
  r.lo[0] = lo;
  r.hi[0] = hi;
  return r;
}

RegionSpec RegionSpec::box(double xlo, double xhi, double ylo, double yhi) {
  RegionSpec r;
  r.kind = RegionKind::Box;
  r.lo = {xlo, ylo};
  r.hi = {xhi, yhi};
  return r;
}

RegionSpec RegionSpec::interval(double lo, double hi) {
  RegionSpec r;
  r.kind = RegionKind::Interval1D;
  r.lo[0] = lo;
  r.hi[0] = hi;
  return r;
}

bool RegionSpec::contains(double x, double y) const {
  switch (kind) {
    case RegionKind::All:
      return true;
    case RegionKind::Strip: {
      const double t = axis == 0 ? x : y;
      return t >= lo[0] && t < hi[0];
    }
    case RegionKind::Box:
      return x >= lo[0] && x < hi[0] && y >= lo[1] && y < hi[1];
    case RegionKind::Interval1D:
      return x >= lo[0] && x < hi[0];
  }
  return false;
}

void validate_region(const RegionSpec& region, const Grid& grid) {
  const double L = grid.domain.L;
  auto check_bounds = [&](double lo, double hi, const char* what) {
    if (!(lo < hi)) {
      throw std::invalid_argument(std::string("region: ") + what +
                                  " needs lo < hi");
    }
    if (lo < 0.0 || hi > L) {
      throw std::invalid_argument(std::string("region: ") + what +
                                  " bounds must lie inside [0, L]");
    }
  };
  switch (region.kind) {
    case RegionKind::All:
      return;
    case RegionKind::Strip:
      if (region.axis != 0 && region.axis != 1) {
        throw std::invalid_argument("region: strip axis must be 0 or 1");
      }
      if (region.axis == 1 && grid.dim() != 2) {
        throw std::invalid_argument("region: y-strip needs a square domain");
      }
      check_bounds(region.lo[0], region.hi[0], "strip");
      return;
    case RegionKind::Box:
      if (grid.dim() != 2) {
        throw std::invalid_argument("region: box needs a square domain");
      }
      check_bounds(region.lo[0], region.hi[0], "box x");
      check_bounds(region.lo[1], region.hi[1], "box y");
      return;
    case RegionKind::Interval1D:
      if (grid.dim() != 1) {
        throw std::invalid_argument(
            "region: interval needs an interval domain");
      }
      check_bounds(region.lo[0], region.hi[0], "interval");
      return;
  }
}

CoefficientField indicator_field(const Grid& grid, const RegionSpec& region,
                                 double inside_value, bool damping) {
  if (damping && inside_value < 0.0) {
    throw std::invalid_argument("field: damping value must be nonnegative");
  }
  validate_region(region, grid);

  CoefficientField f;
  f.n = grid.n;
  f.dim = grid.dim();
  f.L = grid.domain.L;
  const int n = grid.n;
  const double L = grid.domain.L;
  auto at = [&](double x, double y) {
    return region.contains(x, y) ? inside_value : 0.0;
  };

  if (f.dim == 1) {
    f.values.resize(n);
    for (int i = 0; i < n; ++i) f.values(i) = at(grid.coord(i), 0.0);
    f.wall_left.resize(1);
    f.wall_right.resize(1);
    f.wall_left(0) = at(0.0, 0.0);
    f.wall_right(0) = at(L, 0.0);
  } else {
    f.values.resize(n * n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        f.values(j * n + i) = at(grid.coord(i), grid.coord(j));
      }
    }
    f.wall_left.resize(n);
    f.wall_right.resize(n);
    f.wall_bottom.resize(n);
    f.wall_top.resize(n);
    for (int j = 0; j < n; ++j) {
      f.wall_left(j) = at(0.0, grid.coord(j));
      f.wall_right(j) = at(L, grid.coord(j));
    }
    for (int i = 0; i < n; ++i) {
      f.wall_bottom(i) = at(grid.coord(i), 0.0);
      f.wall_top(i) = at(grid.coord(i), L);
    }
  }
  return f;
}

PresetParams PresetParams::defaults(Preset preset, double L) {
  PresetParams p;
  switch (preset) {
    case Preset::H1_sample:
      break;
    case Preset::H2_sample:
      p.bounds = {0.15 * L, 0.30 * L, 0.0, 0.0};
      break;
    case Preset::H3_sample:
      p.bounds = {0.25 * L, 0.375 * L, 0.625 * L, 0.75 * L};
      break;
    case Preset::H4:
      p.bounds = {0.2 * L, 0.4 * L, 0.6 * L, 0.8 * L};
      break;
    case Preset::H5:
      p.bounds = {0.25 * L, 0.5 * L, 0.0, 0.0};
      break;
    case Preset::OneD_bc:
      p.bounds = {0.1 * L, 0.3 * L, 0.5 * L, 0.7 * L};
      break;
  }
  return p;
}

namespace {

[[noreturn]] void ordering_error(const std::string& what) {
  throw std::invalid_argument("preset: " + what);
}

}  // namespace

void validate_preset_params(Preset preset, const PresetParams& params,
                            const Domain& domain) {
  const double L = domain.L;
  const auto& q = params.bounds;
  const bool square = domain.kind == DomainKind::Square;
  if (params.b0 < 0.0) ordering_error("b0 must be nonnegative");

  switch (preset) {
    case Preset::H1_sample:
      if (!square) ordering_error("H1_sample needs a square domain");
      return;
    case Preset::H2_sample:
      if (square) ordering_error("H2_sample needs an interval domain");
      if (!(0.0 < q[0] && q[0] < q[1] && q[1] < L)) {
        ordering_error("H2_sample requires 0 < bound1 < bound2 < L");
      }
      return;
    case Preset::H3_sample:
      if (!square) ordering_error("H3_sample needs a square domain");
      if (!(0.0 < q[0] && q[0] < q[1] && q[1] < q[2] && q[2] < q[3] &&
            q[3] < L)) {
        ordering_error("H3_sample requires 0 < q1 < q2 < q3 < q4 < L");
      }
      return;
    case Preset::H4:
      if (!square) ordering_error("H4 needs a square domain");
      if (!(0.0 < q[0] && q[0] < q[1] && q[1] < q[2] && q[2] < q[3] &&
            q[3] < L)) {
        ordering_error("H4 requires 0 < eps1 < eps2 < eps3 < eps4 < L");
      }
      return;
    case Preset::H5:
      if (!square) ordering_error("H5 needs a square domain");
      if (!(0.0 < q[0] && q[0] < q[1] && q[1] < L)) {
        ordering_error("H5 requires 0 < eps1 < eps2 < L");
      }
      return;
    case Preset::OneD_bc:
      if (square) ordering_error("OneD_bc needs an interval domain");
      if (!(0.0 < q[0] && q[0] < q[1] && q[1] < q[2] && q[2] < q[3] &&
            q[3] < L)) {
        ordering_error(
            "OneD_bc requires 0 < alpha1 < alpha2 < alpha3 < alpha4 < L");
      }
      return;
  }
}

std::pair<CoefficientField, CoefficientField> preset_config(
    const Grid& grid, Preset preset, const PresetParams& params) {
  validate_preset_params(preset, params, grid.domain);
  const auto& q = params.bounds;
  RegionSpec b_region, c_region;

  switch (preset) {
    case Preset::H1_sample:
      b_region = RegionSpec::all();
      c_region = RegionSpec::all();
      break;
    case Preset::H2_sample:
      b_region = RegionSpec::interval(0.0, q[1]);
      c_region = RegionSpec::interval(0.0, q[0]);
      break;
    case Preset::H3_sample:
      b_region = RegionSpec::box(q[0], q[3], q[0], q[3]);
      c_region = RegionSpec::box(q[1], q[2], q[1], q[2]);
      break;
    case Preset::H4:
      b_region = RegionSpec::strip(0, q[0], q[3]);
      c_region = RegionSpec::strip(0, q[1], q[2]);
      break;
    case Preset::H5:
      b_region = RegionSpec::strip(0, 0.0, q[1]);
      c_region = RegionSpec::strip(0, 0.0, q[0]);
      break;
    case Preset::OneD_bc:
      b_region = RegionSpec::interval(q[0], q[2]);
      c_region = RegionSpec::interval(q[1], q[3]);
      break;
  }
  return {indicator_field(grid, b_region, params.b0, true),
          indicator_field(grid, c_region, params.c0, false)};
}

std::string preset_name(Preset preset) {
  switch (preset) {
    case Preset::H1_sample: return "H1_sample";
    case Preset::H2_sample: return "H2_sample";
    case Preset::H3_sample: return "H3_sample";
    case Preset::H4: return "H4";
    case Preset::H5: return "H5";
    case Preset::OneD_bc: return "OneD_bc";
  }
  return "";
}

std::optional<Preset> preset_from_name(const std::string& name) {
  if (name == "H1_sample") return Preset::H1_sample;
  if (name == "H2_sample") return Preset::H2_sample;
  if (name == "H3_sample") return Preset::H3_sample;
  if (name == "H4") return Preset::H4;
  if (name == "H5") return Preset::H5;
  if (name == "OneD_bc") return Preset::OneD_bc;
  return std::nullopt;
}

std::optional<XProfile> x_profile(const CoefficientField& field) {
  if (field.dim != 2) return std::nullopt;
  const int n = field.n;
  XProfile p;
  p.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double col = field.values(i);
    for (int j = 1; j < n; ++j) {
      if (field.values(j * n + i) != col) return std::nullopt;
    }
    if (field.wall_bottom(i) != col || field.wall_top(i) != col) {
      return std::nullopt;
    }
    p.values(i) = col;
  }
  for (int j = 1; j < n; ++j) {
    if (field.wall_left(j) != field.wall_left(0)) return std::nullopt;
    if (field.wall_right(j) != field.wall_right(0)) return std::nullopt;
  }
  p.wall_left = field.wall_left(0);
  p.wall_right = field.wall_right(0);
  return p;
}

}  // namespace kvwave
