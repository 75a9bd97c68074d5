#pragma once

#include "cofdm/waveform.hpp"

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace cofdm {

using Bits = std::vector<std::uint8_t>; // one bit per element, 0/1

struct OfdmConfig {
  std::size_t fft_size = 4096;
  std::size_t data_subcarriers = 3300;
  std::size_t pilot_subcarriers = 4;
  double cp_fraction = 0.03;
  std::size_t training_symbols = 2;
  unsigned qam_order = 16;
  double sample_rate_hz = 32e9;

  std::size_t occupied() const { return data_subcarriers + pilot_subcarriers; }
  std::size_t cp_length() const;
  std::size_t symbol_length() const { return fft_size + cp_length(); }
  double occupied_bandwidth_hz() const;
};

/// Throws std::invalid_argument on an inconsistent configuration.
void validate(const OfdmConfig& cfg);

/// Occupied-bin layout shared by every frame of a run: a contiguous band of
/// data+pilot subcarriers centered on DC, pilots at symmetric positions
/// +-floor((2j+1) * occupied / (2 * n_pilots)).
struct SubcarrierPlan {
  std::size_t fft_size = 0;
  std::vector<int> bins;              // signed FFT bin per occupied subcarrier, ascending
  std::vector<std::size_t> data_pos;  // indices into bins[] carrying payload
  std::vector<std::size_t> pilot_pos; // indices into bins[] carrying pilots
};

SubcarrierPlan make_plan(const OfdmConfig& cfg);

/// One OFDM symbol on one polarization: complex value per occupied
/// subcarrier, in plan order.
using SubcarrierFrame = CVec;
using FrameSeq = std::vector<SubcarrierFrame>;

/// Gray-coded 16-QAM, per-axis bit pairs (hi lo): 00 -> -3, 01 -> -1,
/// 11 -> +1, 10 -> +3; first two bits in-phase, last two quadrature; scaled
/// by 1/sqrt(10) for unit average power. Length must be divisible by 4.
CVec qam16_map(const Bits& bits);

/// Minimum-distance hard decision, exact inverse of qam16_map on clean
/// points. Boundary ties break toward the lower Gray code.
Bits qam16_demap(const CVec& symbols);

/// Per symbol: populate the occupied FFT bins, unitary inverse transform,
/// prepend the cyclic prefix, concatenate. x/y frame sequences must have
/// equal length and match the plan width.
DualPolWaveform ofdm_modulate(const FrameSeq& x_frames, const FrameSeq& y_frames,
                              const OfdmConfig& cfg);

/// Exact inverse of ofdm_modulate on an undistorted waveform. The sample
/// count must be a whole number of (fft_size + cp_length) blocks.
std::pair<FrameSeq, FrameSeq> ofdm_demodulate(const DualPolWaveform& w,
                                              const OfdmConfig& cfg);

/// One-tap equalizer: H_k averaged over training symbols as rx/known, payload
/// bins divided by H_k. Throws on |H_k| < 1e-12 ("unobservable subcarrier").
FrameSeq channel_equalize(const FrameSeq& rx_training, const FrameSeq& known_training,
                          const FrameSeq& rx_payload);

/// Pilot-aided common-phase-error recovery: per symbol,
/// theta = arg(sum_p rx_p * conj(known_p)), every bin rotated by exp(-j theta).
/// known_pilots holds one value per pilot per symbol.
FrameSeq phase_recover(const FrameSeq& frames, const SubcarrierPlan& plan,
                       const std::vector<CVec>& known_pilots);

/// Receiver-side reference data regenerated from the run seed: known QPSK
/// training frames plus per-symbol pilot values.
struct TxReference {
  FrameSeq training;
  std::vector<CVec> pilots; // [payload symbol][pilot index]
};

TxReference make_reference(const OfdmConfig& cfg, const SubcarrierPlan& plan,
                           std::uint64_t seed, std::string_view pol_tag,
                           int channel, std::size_t n_payload_symbols);

/// Payload data symbols + pilot values -> full frames in plan order.
FrameSeq assemble_payload_frames(const CVec& data_symbols,
                                 const std::vector<CVec>& pilots,
                                 const SubcarrierPlan& plan);

/// Data-bin contents of a frame sequence, symbol-major.
CVec extract_data_symbols(const FrameSeq& frames, const SubcarrierPlan& plan);

} // namespace cofdm
