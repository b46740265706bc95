#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <utility>

namespace kvwave {

enum class DomainKind { Interval, Square };

// Bounded open set: an interval (0,L) or a square (0,L)x(0,L).
struct Domain {
  DomainKind kind = DomainKind::Interval;
  double L = 1.0;
};

// Uniform grid with homogeneous Dirichlet elimination: only interior nodes
// are unknowns, node coordinates x_i = i*h for i = 1..n, h = L/(n+1).
struct Grid {
  Domain domain;
  int n = 0;
  double h = 0.0;

  int dim() const { return domain.kind == DomainKind::Square ? 2 : 1; }
  int size() const { return dim() == 2 ? n * n : n; }
  double coord(int i) const { return (i + 1) * h; }  // 0-based interior index
};

Grid build_grid(const Domain& domain, int n);

enum class RegionKind { All, Strip, Box, Interval1D };

// Axis-aligned region; membership is half-open, lo <= x < hi, so nested
// presets are unambiguous at shared endpoints.
struct RegionSpec {
  RegionKind kind = RegionKind::All;
  int axis = 0;  // Strip only: 0 = x, 1 = y
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};

  static RegionSpec all();
  static RegionSpec strip(int axis, double lo, double hi);
  static RegionSpec box(double xlo, double xhi, double ylo, double yhi);
  static RegionSpec interval(double lo, double hi);

  bool contains(double x, double y = 0.0) const;
};

// Nodal samples of a piecewise coefficient, plus samples at the wall
// coordinates so flux-form assembly can weight wall-touching edges (regions
// reaching the boundary keep their full strength there).
struct CoefficientField {
  int n = 0;
  int dim = 1;
  double L = 0.0;
  Eigen::VectorXd values;       // interior nodes, x-fastest in 2D
  Eigen::VectorXd wall_left;    // x = 0 (size 1 in 1D, n in 2D)
  Eigen::VectorXd wall_right;   // x = L
  Eigen::VectorXd wall_bottom;  // y = 0 (2D only, size n)
  Eigen::VectorXd wall_top;     // y = L
};

// Throws with a message naming the violated constraint (bounds inside the
// domain, lo < hi, axis/dimension compatibility).
void validate_region(const RegionSpec& region, const Grid& grid);

// damping = true rejects negative inside_value (damping fields must be >= 0).
CoefficientField indicator_field(const Grid& grid, const RegionSpec& region,
                                 double inside_value, bool damping = false);

enum class Preset { H1_sample, H2_sample, H3_sample, H4, H5, OneD_bc };

// bounds are absolute coordinates in (0, L); their meaning depends on the
// preset (see preset_config). defaults() fills the canonical values for a
// given L.
struct PresetParams {
  double b0 = 1.0;
  double c0 = 1.0;
  std::array<double, 4> bounds{0.0, 0.0, 0.0, 0.0};

  static PresetParams defaults(Preset preset, double L);
};

// Returns (b field, c field) for the named configuration:
//   H1_sample: square, both fields on all of the domain
//   H2_sample: interval, b on (0, bounds[1]), c on (0, bounds[0]) nested
//   H3_sample: square, b box (bounds[0],bounds[3])^2, c box (bounds[1],bounds[2])^2
//   H4:        square, b strip (bounds[0],bounds[3]) x (0,L),
//              c strip (bounds[1],bounds[2]) x (0,L), strictly nested
//   H5:        square, b strip (0,bounds[1]) x (0,L), c strip (0,bounds[0]) x (0,L)
//   OneD_bc:   interval, b on (bounds[0],bounds[2]), c on (bounds[1],bounds[3])
std::pair<CoefficientField, CoefficientField> preset_config(
    const Grid& grid, Preset preset, const PresetParams& params);

// Throws with a message naming the violated constraint; used by preset_config
// and by config validation.
void validate_preset_params(Preset preset, const PresetParams& params,
                            const Domain& domain);

std::string preset_name(Preset preset);
std::optional<Preset> preset_from_name(const std::string& name);

// x-profile of a 2D field that depends on x only (column-constant interior
// values, matching top/bottom wall samples, constant left/right walls).
struct XProfile {
  Eigen::VectorXd values;  // size n
  double wall_left = 0.0;
  double wall_right = 0.0;
};

std::optional<XProfile> x_profile(const CoefficientField& field);

}  // namespace kvwave
