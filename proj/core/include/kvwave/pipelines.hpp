#pragma once

#include "kvwave/config.hpp"

#include <string>
#include <vector>

namespace kvwave {

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPipelineError = 3;

// Runs the configured pipeline and writes its outputs plus manifest.json
// (config hash, version, wall time, output list, config echo) into
// cfg.out_dir. Errors are printed to stderr with the offending field or
// stage named.
int run_pipeline(const ExperimentConfig& cfg);

// Loads the file, applies env overrides, then the non-empty CLI overrides,
// validates, and runs. pipeline_override selects the subcommand's pipeline.
int run_config_file(const std::string& config_path,
                    const std::string& pipeline_override,
                    const std::string& out_override, int workers_override,
                    std::int64_t seed_override);

// validate subcommand: parse + validate only.
int validate_config_file(const std::string& config_path);

// Consolidates manifests into report.json and report.txt under out_dir:
// one row per measured quantity, grouped by the prediction it targets,
// marked PASS (criterion met) or INFO (descriptive).
int write_report(const std::vector<std::string>& manifest_paths,
                 const std::string& out_dir);

}  // namespace kvwave
