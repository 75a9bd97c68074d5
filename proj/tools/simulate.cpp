// Sweep driver: runs the (scheme x power x distance) grid described by a
// config file or preset and writes the result tables.

#include "cofdm/config.hpp"
#include "cofdm/sweep.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"CO-OFDM superchannel nonlinearity-compensation sweep"};

  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::int64_t seed_override = -1;
  int workers = 0;

  app.add_option("--config", config_path, "Experiment config file");
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--preset", preset, "Built-in preset: desk | paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--seed", seed_override, "Override the config seed");
  app.add_option("--workers", workers,
                 "Worker threads (default: COFDM_WORKERS env or hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (config_path.empty() == preset.empty()) {
      std::cerr << "error: exactly one of --config or --preset is required\n";
      return 2;
    }

    cofdm::ExperimentConfig cfg;
    if (!preset.empty())
      cfg = preset == "desk" ? cofdm::desk_preset() : cofdm::paper_preset();
    else
      cfg = cofdm::parse_config_file(config_path);

    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);

    if (workers <= 0) {
      if (const char* env = std::getenv("COFDM_WORKERS")) workers = std::atoi(env);
    }

    const cofdm::SweepOutput out = cofdm::run_sweep(cfg, workers);
    cofdm::emit_results(out, cfg, out_dir);

    std::cout << out.records.size() << " records written to " << out_dir << "\n";
    if (!out.failures.empty()) {
      std::cerr << out.failures.size() << " grid point(s) failed:\n";
      for (const auto& f : out.failures) std::cerr << "  " << f << "\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
