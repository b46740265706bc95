#pragma once

#include "kvwave/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace kvwave {

struct ScheduleConfig {
  std::string kind = "at_modes";  // at_modes | log_uniform
  int k_lo = 10;
  int k_hi = 60;
  double lo = 1.0;
  double hi = 100.0;
  int count = 40;

  bool operator==(const ScheduleConfig&) const = default;
};

// Either a preset name with parameters, or explicit regions with amplitudes.
struct CoefficientConfig {
  std::string preset;  // empty means explicit regions
  double b0 = 1.0;
  double c0 = 1.0;
  std::array<double, 4> bounds{0.0, 0.0, 0.0, 0.0};  // preset bounds; all
                                                     // zero means defaults
  RegionSpec b_region = RegionSpec::all();
  RegionSpec c_region = RegionSpec::all();

  bool operator==(const CoefficientConfig&) const = default;
};

inline bool operator==(const RegionSpec& a, const RegionSpec& b) {
  return a.kind == b.kind && a.axis == b.axis && a.lo == b.lo && a.hi == b.hi;
}

struct ExperimentConfig {
  std::string pipeline;  // simulate | spectrum | resolvent | decay-fit
  std::string domain_kind = "interval";  // interval | square
  double L = 1.0;
  int n = 40;
  double a = 1.0;
  CoefficientConfig coefficients;

  // simulate / decay-fit
  double dt = 0.05;
  double t_final = 10.0;
  int sample_every = 10;
  std::string initial = "bump";  // bump | zero | random

  // spectrum
  int mode_count = 120;
  int k_min = 100;

  // resolvent
  ScheduleConfig schedule;
  double resolvent_tol = 1e-6;

  // fits
  std::array<double, 2> fit_window{0.0, 0.0};  // {0,0} means default window
  std::string fit_model = "polynomial";        // polynomial | exponential

  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int workers = 0;  // 0 means hardware concurrency

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig load_config_file(const std::string& path);

// "field: reason" strings; empty means valid.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// Environment overrides, prefix KVWAVE_: OUT_DIR, SEED, WORKERS, N, DT,
// T_FINAL, MODE_COUNT, L. Returns the names of the overridden fields.
std::vector<std::string> apply_env_overrides(ExperimentConfig& cfg);

Domain domain_from_config(const ExperimentConfig& cfg);
Grid grid_from_config(const ExperimentConfig& cfg);
std::pair<CoefficientField, CoefficientField> fields_from_config(
    const ExperimentConfig& cfg, const Grid& grid);

std::uint64_t fnv1a(const std::string& text);

}  // namespace kvwave
