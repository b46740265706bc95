#include "kvwave/config.hpp"

#include "kvwave/spectral.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace kvwave {

namespace {

using nlohmann::json;

std::string region_kind_name(RegionKind kind) {
  switch (kind) {
    case RegionKind::All: return "all";
    case RegionKind::Strip: return "strip";
    case RegionKind::Box: return "box";
    case RegionKind::Interval1D: return "interval";
  }
  return "";
}

RegionKind region_kind_from_name(const std::string& name) {
  if (name == "all") return RegionKind::All;
  if (name == "strip") return RegionKind::Strip;
  if (name == "box") return RegionKind::Box;
  if (name == "interval") return RegionKind::Interval1D;
  throw std::invalid_argument("config: unknown region kind '" + name + "'");
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw std::invalid_argument("config: unknown field '" + where +
                                  item.key() + "'");
    }
  }
}

json region_to_json(const RegionSpec& r) {
  return json{{"kind", region_kind_name(r.kind)},
              {"axis", r.axis},
              {"lo", {r.lo[0], r.lo[1]}},
              {"hi", {r.hi[0], r.hi[1]}}};
}

RegionSpec region_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw std::invalid_argument("config: " + where + " must be an object");
  }
  reject_unknown(j, {"kind", "axis", "lo", "hi"}, where + ".");
  RegionSpec r;
  r.kind = region_kind_from_name(j.value("kind", std::string("all")));
  r.axis = j.value("axis", 0);
  if (j.contains("lo")) {
    r.lo = {j["lo"].at(0).get<double>(), j["lo"].at(1).get<double>()};
  }
  if (j.contains("hi")) {
    r.hi = {j["hi"].at(0).get<double>(), j["hi"].at(1).get<double>()};
  }
  return r;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }

  try {
    reject_unknown(j,
                   {"pipeline", "domain_kind", "L", "n", "a", "coefficients",
                    "dt", "t_final", "sample_every", "initial", "mode_count",
                    "k_min", "schedule", "resolvent_tol", "fit_window",
                    "fit_model", "out_dir", "seed", "workers"},
                   "");
    ExperimentConfig cfg;
    cfg.pipeline = j.value("pipeline", cfg.pipeline);
    cfg.domain_kind = j.value("domain_kind", cfg.domain_kind);
    cfg.L = j.value("L", cfg.L);
    cfg.n = j.value("n", cfg.n);
    cfg.a = j.value("a", cfg.a);

    if (j.contains("coefficients")) {
      const json& c = j["coefficients"];
      reject_unknown(c, {"preset", "b0", "c0", "bounds", "b_region", "c_region"},
                     "coefficients.");
      cfg.coefficients.preset = c.value("preset", cfg.coefficients.preset);
      cfg.coefficients.b0 = c.value("b0", cfg.coefficients.b0);
      cfg.coefficients.c0 = c.value("c0", cfg.coefficients.c0);
      if (c.contains("bounds")) {
        for (int i = 0; i < 4; ++i) {
          cfg.coefficients.bounds[i] = c["bounds"].at(i).get<double>();
        }
      }
      if (c.contains("b_region")) {
        cfg.coefficients.b_region =
            region_from_json(c["b_region"], "coefficients.b_region");
      }
      if (c.contains("c_region")) {
        cfg.coefficients.c_region =
            region_from_json(c["c_region"], "coefficients.c_region");
      }
    }

    cfg.dt = j.value("dt", cfg.dt);
    cfg.t_final = j.value("t_final", cfg.t_final);
    cfg.sample_every = j.value("sample_every", cfg.sample_every);
    cfg.initial = j.value("initial", cfg.initial);
    cfg.mode_count = j.value("mode_count", cfg.mode_count);
    cfg.k_min = j.value("k_min", cfg.k_min);

    if (j.contains("schedule")) {
      const json& s = j["schedule"];
      reject_unknown(s, {"kind", "k_lo", "k_hi", "lo", "hi", "count"},
                     "schedule.");
      cfg.schedule.kind = s.value("kind", cfg.schedule.kind);
      cfg.schedule.k_lo = s.value("k_lo", cfg.schedule.k_lo);
      cfg.schedule.k_hi = s.value("k_hi", cfg.schedule.k_hi);
      cfg.schedule.lo = s.value("lo", cfg.schedule.lo);
      cfg.schedule.hi = s.value("hi", cfg.schedule.hi);
      cfg.schedule.count = s.value("count", cfg.schedule.count);
    }

    cfg.resolvent_tol = j.value("resolvent_tol", cfg.resolvent_tol);
    if (j.contains("fit_window")) {
      cfg.fit_window = {j["fit_window"].at(0).get<double>(),
                        j["fit_window"].at(1).get<double>()};
    }
    cfg.fit_model = j.value("fit_model", cfg.fit_model);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    return cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j{
      {"pipeline", cfg.pipeline},
      {"domain_kind", cfg.domain_kind},
      {"L", cfg.L},
      {"n", cfg.n},
      {"a", cfg.a},
      {"coefficients",
       {{"preset", cfg.coefficients.preset},
        {"b0", cfg.coefficients.b0},
        {"c0", cfg.coefficients.c0},
        {"bounds",
         {cfg.coefficients.bounds[0], cfg.coefficients.bounds[1],
          cfg.coefficients.bounds[2], cfg.coefficients.bounds[3]}},
        {"b_region", region_to_json(cfg.coefficients.b_region)},
        {"c_region", region_to_json(cfg.coefficients.c_region)}}},
      {"dt", cfg.dt},
      {"t_final", cfg.t_final},
      {"sample_every", cfg.sample_every},
      {"initial", cfg.initial},
      {"mode_count", cfg.mode_count},
      {"k_min", cfg.k_min},
      {"schedule",
       {{"kind", cfg.schedule.kind},
        {"k_lo", cfg.schedule.k_lo},
        {"k_hi", cfg.schedule.k_hi},
        {"lo", cfg.schedule.lo},
        {"hi", cfg.schedule.hi},
        {"count", cfg.schedule.count}}},
      {"resolvent_tol", cfg.resolvent_tol},
      {"fit_window", {cfg.fit_window[0], cfg.fit_window[1]}},
      {"fit_model", cfg.fit_model},
      {"out_dir", cfg.out_dir},
      {"seed", cfg.seed},
      {"workers", cfg.workers}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_config_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("config: cannot open " + path);
  std::string text;
  char buf[4096];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, got);
  std::fclose(f);
  return parse_config(text);
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> errs;
  auto bad = [&](const std::string& field, const std::string& why) {
    errs.push_back(field + ": " + why);
  };

  const bool pipeline_ok = cfg.pipeline == "simulate" ||
                           cfg.pipeline == "spectrum" ||
                           cfg.pipeline == "resolvent" ||
                           cfg.pipeline == "decay-fit";
  if (!pipeline_ok) {
    bad("pipeline", "must be simulate, spectrum, resolvent or decay-fit");
  }
  const bool domain_ok =
      cfg.domain_kind == "interval" || cfg.domain_kind == "square";
  if (!domain_ok) bad("domain_kind", "must be interval or square");
  if (!(cfg.L > 0.0)) bad("L", "must be positive");
  if (cfg.n < 1) bad("n", "needs at least one interior node");
  if (!(cfg.a > 0.0)) bad("a", "must be positive");

  if (!(cfg.dt > 0.0)) bad("dt", "must be positive");
  if (!(cfg.t_final > 0.0)) bad("t_final", "must be positive");
  if (cfg.sample_every < 1) bad("sample_every", "must be >= 1");
  if (cfg.initial != "bump" && cfg.initial != "zero" &&
      cfg.initial != "random") {
    bad("initial", "must be bump, zero or random");
  }
  if (cfg.mode_count < 1) bad("mode_count", "must be >= 1");
  if (cfg.k_min < 1 || cfg.k_min > cfg.mode_count) {
    bad("k_min", "must lie in [1, mode_count]");
  }

  const bool at_modes = cfg.schedule.kind == "at_modes";
  if (!at_modes && cfg.schedule.kind != "log_uniform") {
    bad("schedule.kind", "must be at_modes or log_uniform");
  } else if (at_modes) {
    if (cfg.schedule.k_lo < 1) bad("schedule.k_lo", "must be >= 1");
    if (cfg.schedule.k_lo > cfg.schedule.k_hi) {
      bad("schedule.k_hi", "must be >= k_lo");
    }
  } else {
    if (!(cfg.schedule.lo > 0.0)) bad("schedule.lo", "must be positive");
    if (!(cfg.schedule.hi >= cfg.schedule.lo)) {
      bad("schedule.hi", "must be >= lo");
    }
    if (cfg.schedule.count < 1) bad("schedule.count", "must be >= 1");
  }
  if (!(cfg.resolvent_tol > 0.0)) bad("resolvent_tol", "must be positive");

  const bool default_window = cfg.fit_window[0] == 0.0 && cfg.fit_window[1] == 0.0;
  if (!default_window &&
      !(cfg.fit_window[0] >= 0.0 && cfg.fit_window[0] < cfg.fit_window[1])) {
    bad("fit_window", "needs 0 <= lo < hi (or [0, 0] for the default)");
  }
  if (cfg.fit_model != "polynomial" && cfg.fit_model != "exponential") {
    bad("fit_model", "must be polynomial or exponential");
  }
  if (cfg.out_dir.empty()) bad("out_dir", "must not be empty");
  if (cfg.workers < 0) bad("workers", "must be >= 0");

  if (domain_ok && cfg.L > 0.0 && cfg.n >= 1) {
    const Domain domain = domain_from_config(cfg);
    const Grid grid = build_grid(domain, cfg.n);
    if (!cfg.coefficients.preset.empty()) {
      const auto preset = preset_from_name(cfg.coefficients.preset);
      if (!preset) {
        bad("coefficients.preset",
            "unknown preset '" + cfg.coefficients.preset + "'");
      } else {
        try {
          PresetParams params;
          params.b0 = cfg.coefficients.b0;
          params.c0 = cfg.coefficients.c0;
          const std::array<double, 4> zero{0.0, 0.0, 0.0, 0.0};
          params.bounds = cfg.coefficients.bounds == zero
                              ? PresetParams::defaults(*preset, cfg.L).bounds
                              : cfg.coefficients.bounds;
          validate_preset_params(*preset, params, domain);
        } catch (const std::exception& e) {
          bad("coefficients", e.what());
        }
      }
    } else {
      if (cfg.coefficients.b0 < 0.0) {
        bad("coefficients.b0", "damping amplitude must be nonnegative");
      }
      try {
        validate_region(cfg.coefficients.b_region, grid);
      } catch (const std::exception& e) {
        bad("coefficients.b_region", e.what());
      }
      try {
        validate_region(cfg.coefficients.c_region, grid);
      } catch (const std::exception& e) {
        bad("coefficients.c_region", e.what());
      }
    }

    if (pipeline_ok && cfg.pipeline == "resolvent" && at_modes &&
        cfg.schedule.k_lo >= 1 && cfg.schedule.k_lo <= cfg.schedule.k_hi) {
      // AtModes snaps to grid frequencies; the labels must be resolvable.
      bool fits = true;
      if (grid.dim() == 1) {
        fits = cfg.schedule.k_hi <= cfg.n;
      } else {
        const ModeSet modes = dirichlet_modes(domain, cfg.schedule.k_hi);
        for (const auto& label : modes.labels) {
          if (label[0] > cfg.n || label[1] > cfg.n) fits = false;
        }
      }
      if (!fits) bad("schedule.k_hi", "mode index exceeds the grid resolution");
    }
  }
  return errs;
}

std::vector<std::string> apply_env_overrides(ExperimentConfig& cfg) {
  std::vector<std::string> applied;
  auto text = [](const char* name) -> const char* { return std::getenv(name); };
  auto number = [&](const char* name) -> std::optional<double> {
    const char* s = text(name);
    if (!s) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0') {
      throw std::invalid_argument(std::string("env ") + name +
                                  ": not a number");
    }
    return v;
  };

  if (const char* s = text("KVWAVE_OUT_DIR")) {
    cfg.out_dir = s;
    applied.push_back("out_dir");
  }
  if (const char* s = text("KVWAVE_SEED")) {
    char* end = nullptr;
    cfg.seed = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0') {
      throw std::invalid_argument("env KVWAVE_SEED: not a number");
    }
    applied.push_back("seed");
  }
  if (auto v = number("KVWAVE_WORKERS")) {
    cfg.workers = static_cast<int>(*v);
    applied.push_back("workers");
  }
  if (auto v = number("KVWAVE_N")) {
    cfg.n = static_cast<int>(*v);
    applied.push_back("n");
  }
  if (auto v = number("KVWAVE_DT")) {
    cfg.dt = *v;
    applied.push_back("dt");
  }
  if (auto v = number("KVWAVE_T_FINAL")) {
    cfg.t_final = *v;
    applied.push_back("t_final");
  }
  if (auto v = number("KVWAVE_MODE_COUNT")) {
    cfg.mode_count = static_cast<int>(*v);
    applied.push_back("mode_count");
  }
  if (auto v = number("KVWAVE_L")) {
    cfg.L = *v;
    applied.push_back("L");
  }
  return applied;
}

Domain domain_from_config(const ExperimentConfig& cfg) {
  Domain d;
  if (cfg.domain_kind == "interval") {
    d.kind = DomainKind::Interval;
  } else if (cfg.domain_kind == "square") {
    d.kind = DomainKind::Square;
  } else {
    throw std::invalid_argument("config: unknown domain kind '" +
                                cfg.domain_kind + "'");
  }
  d.L = cfg.L;
  return d;
}

Grid grid_from_config(const ExperimentConfig& cfg) {
  return build_grid(domain_from_config(cfg), cfg.n);
}

std::pair<CoefficientField, CoefficientField> fields_from_config(
    const ExperimentConfig& cfg, const Grid& grid) {
  if (!cfg.coefficients.preset.empty()) {
    const auto preset = preset_from_name(cfg.coefficients.preset);
    if (!preset) {
      throw std::invalid_argument("config: unknown preset '" +
                                  cfg.coefficients.preset + "'");
    }
    PresetParams params;
    params.b0 = cfg.coefficients.b0;
    params.c0 = cfg.coefficients.c0;
    const std::array<double, 4> zero{0.0, 0.0, 0.0, 0.0};
    params.bounds = cfg.coefficients.bounds == zero
                        ? PresetParams::defaults(*preset, grid.domain.L).bounds
                        : cfg.coefficients.bounds;
    return preset_config(grid, *preset, params);
  }
  return {indicator_field(grid, cfg.coefficients.b_region, cfg.coefficients.b0,
                          true),
          indicator_field(grid, cfg.coefficients.c_region,
                          cfg.coefficients.c0, false)};
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace kvwave
