#pragma once

#include "cofdm/config.hpp"
#include "cofdm/metrics.hpp"

#include <string>
#include <vector>

namespace cofdm {

enum class TxMode { polmux, pctw };

/// One transmitter realization: the assembled superchannel plus everything
/// the measured channel's receiver needs.
struct TxBuild {
  DualPolWaveform aggregate; // at modulator output power (set_power before launch)
  Bits tx_bits;              // measured-channel payload (x then y for polmux)
  RxContext rx_ctx;
};

/// Builds the n-channel superchannel for one seed: per-channel payload bits,
/// pilots and training from independent substreams, PCTW twin encoding when
/// requested, FFT upsampling and grid placement.
TxBuild build_superchannel(const ExperimentConfig& cfg, std::uint64_t seed, TxMode mode);

struct SweepOutput {
  std::vector<SweepRecord> records; // scheme-major, then power, then distance
  std::vector<std::string> failures;
};

/// Runs the full (scheme x power x distance) grid, averaging n_seeds
/// consecutive seeds per record. Propagation jobs (seed x tx-mode x power)
/// run on `workers` threads (0 = hardware concurrency); results are
/// accumulated by grid index so the output is byte-identical for any worker
/// count.
SweepOutput run_sweep(const ExperimentConfig& cfg, int workers = 0);

/// Master results table in the pinned CSV dialect.
std::string results_csv_text(const SweepOutput& out);

/// Writes results.csv, the per-figure plot data (q_vs_power.csv,
/// reach_curve.csv, reach_estimates.csv, complexity_vs_spans.csv) and
/// metadata.txt into out_dir.
void emit_results(const SweepOutput& out, const ExperimentConfig& cfg,
                  const std::string& out_dir);

} // namespace cofdm
