#pragma once

#include "cofdm/channel.hpp"
#include "cofdm/compensation.hpp"
#include "cofdm/ofdm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cofdm {

struct SuperchannelConfig {
  int n_channels = 4;
  double spacing_hz = 37.5e9;
  int measured_channel = -1; // -1 -> auto: inner channel (n-1)/2
};

struct SweepGrid {
  std::vector<double> power_grid_dbm;  // per-channel launch power
  std::vector<int> distance_grid_spans;
  std::size_t n_ofdm_symbols = 20;
  int n_seeds = 1;
  double fec_ber = 2.7e-2;
};

/// Full experiment description. link.n_spans is derived from the distance
/// grid when loading (the sweep checkpoints every grid distance of one
/// incremental propagation).
struct ExperimentConfig {
  std::uint64_t seed = 1;
  bool noise_enabled = true;
  OfdmConfig ofdm;
  LinkConfig link;
  SuperchannelConfig superchannel;
  std::vector<CompensationScheme> schemes;
  SweepGrid sweep;
};

void validate(const ExperimentConfig& cfg);

/// 0-based index of the channel whose BER is measured.
int measured_channel_index(const ExperimentConfig& cfg);

/// Grid slot of channel `index` relative to the superchannel center.
double channel_offset_hz(const SuperchannelConfig& sc, int index);

/// Aggregate oversampling factor: smallest integer multiple of the channel
/// rate whose Nyquist band covers the outermost selection filter plus margin
/// (1 for a single channel).
int aggregate_oversample_factor(const ExperimentConfig& cfg);
double aggregate_sample_rate_hz(const ExperimentConfig& cfg);

/// Flat key-value config format with dotted section keys, '#' comments and
/// comma-separated lists. Unknown keys are a hard error; keys under the
/// informational prefixes `derived.`, `convention.` and `run.` are accepted
/// and ignored so emitted metadata files load as configs.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical text form; parse_config_text(write_config_text(c)) == c with
/// doubles round-tripping exactly.
std::string write_config_text(const ExperimentConfig& cfg);

/// Presets for the CLI. The desk preset runs the full five-scheme comparison
/// in minutes; the paper preset is the full-scale setup (hours).
ExperimentConfig desk_preset();
ExperimentConfig paper_preset();

/// Shortest decimal representation that parses back to exactly the same
/// double.
std::string format_double(double v);

} // namespace cofdm
