#include "kvwave/pipelines.hpp"
#include "kvwave/version.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{
      "kvwave: numerical laboratory for a pair of waves coupled through "
      "their velocities, one carrying Kelvin-Voigt damping"};
  app.set_version_flag("--version", kvwave::kVersion);
  app.require_subcommand(1);
  app.footer(
      "Environment overrides (read before CLI flags, prefix KVWAVE_):\n"
      "  KVWAVE_OUT_DIR KVWAVE_SEED KVWAVE_WORKERS KVWAVE_N KVWAVE_DT\n"
      "  KVWAVE_T_FINAL KVWAVE_MODE_COUNT KVWAVE_L");

  std::string config_path;
  std::string out_dir;
  int workers = -1;
  std::int64_t seed = -1;

  auto add_pipeline = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "experiment config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--workers", workers,
                    "worker threads (overrides config; 0 = hardware)");
    sub->add_option("--seed", seed, "random seed (overrides config)");
    return sub;
  };

  CLI::App* cmd_simulate = add_pipeline(
      "simulate", "integrate the semidiscrete system, emit the energy trace");
  CLI::App* cmd_spectrum = add_pipeline(
      "spectrum", "per-mode quartic eigenvalues vs the high-frequency law");
  CLI::App* cmd_resolvent = add_pipeline(
      "resolvent", "resolvent norms along the imaginary axis + growth fit");
  CLI::App* cmd_decay = add_pipeline(
      "decay-fit", "simulate, then fit the energy decay law before t*");

  CLI::App* cmd_validate =
      app.add_subcommand("validate", "parse and validate a config, run nothing");
  cmd_validate->add_option("--config", config_path, "experiment config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  std::vector<std::string> manifests;
  std::string report_out = "report";
  CLI::App* cmd_report = app.add_subcommand(
      "report", "consolidate run manifests into report.json / report.txt");
  cmd_report->add_option("manifests", manifests, "manifest.json paths")
      ->required();
  cmd_report->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (cmd_simulate->parsed()) {
    return kvwave::run_config_file(config_path, "simulate", out_dir, workers,
                                   seed);
  }
  if (cmd_spectrum->parsed()) {
    return kvwave::run_config_file(config_path, "spectrum", out_dir, workers,
                                   seed);
  }
  if (cmd_resolvent->parsed()) {
    return kvwave::run_config_file(config_path, "resolvent", out_dir, workers,
                                   seed);
  }
  if (cmd_decay->parsed()) {
    return kvwave::run_config_file(config_path, "decay-fit", out_dir, workers,
                                   seed);
  }
  if (cmd_validate->parsed()) {
    return kvwave::validate_config_file(config_path);
  }
  return kvwave::write_report(manifests, report_out);
}
