#pragma once

#include "cofdm/channel.hpp"
#include "cofdm/ofdm.hpp"
#include "cofdm/waveform.hpp"

#include <string>
#include <variant>

namespace cofdm {

// ---------------------------------------------------------------------------
// scheme selection

struct Ldc {};
struct ScDbp {
  int steps_per_span = 1;
  double channel_bandwidth_hz = 0.0; // 0 -> default (1.1 x occupied band)
};
struct McDbp {
  int steps_per_span = 16;
};
struct Pctw {};
struct ScDbpPctw {
  int steps_per_span = 1;
  double channel_bandwidth_hz = 0.0;
};

using CompensationScheme = std::variant<Ldc, ScDbp, McDbp, Pctw, ScDbpPctw>;

/// CLI/config tag: ldc | sc-dbp | mc-dbp | pctw | sc-dbp-pctw.
std::string scheme_name(const CompensationScheme& scheme);
CompensationScheme scheme_from_name(const std::string& name);

/// True for schemes whose transmitter sends phase-conjugated twin waves.
bool scheme_uses_pctw(const CompensationScheme& scheme);
int scheme_steps_per_span(const CompensationScheme& scheme);

// ---------------------------------------------------------------------------
// waveform-domain compensators

/// Linear dispersion compensation: one all-pass multiplication by
/// exp(+j (beta2/2) (omega + omega_c)^2 L_total) on both polarizations.
DualPolWaveform ldc(const DualPolWaveform& w, const LinkConfig& link,
                    double band_center_offset_hz = 0.0);

struct SingleChannel {
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
};
struct MultiChannel {};
using DbpMode = std::variant<SingleChannel, MultiChannel>;

/// Digital back-propagation. Single-channel mode selects the band, shifts it
/// to baseband and back-propagates with the dispersion grid offset to the
/// channel center; multi-channel mode back-propagates the aggregate. Each
/// span removes the EDFA gain and runs the backward SSFM; output power is
/// renormalized to the pre-compensation signal power.
DualPolWaveform dbp(const DualPolWaveform& w, const LinkConfig& link,
                    int steps_per_span, const DbpMode& mode);

// ---------------------------------------------------------------------------
// PCTW

/// Twin-wave encoding: y bins are the complex conjugates of the x bins
/// (pilots and training conjugate consistently).
std::pair<FrameSeq, FrameSeq> pctw_encode(const FrameSeq& frames_x);

/// Coherent superposition E = (Ex + conj(Ey)) / 2 per bin; both inputs must
/// be equalized and phase-recovered first.
FrameSeq pctw_superpose(const FrameSeq& frames_x, const FrameSeq& frames_y);

// ---------------------------------------------------------------------------
// full receiver pipeline

/// Everything the receiver knows a priori about the measured channel.
struct RxContext {
  OfdmConfig ofdm;
  int n_channels = 1;
  double channel_offset_hz = 0.0;    // measured channel's slot in the superchannel
  double selection_bandwidth_hz = 0; // 0 -> default demux bandwidth
  TxReference ref_x;                 // known training + pilots per polarization
  TxReference ref_y;
};

struct CompensateResult {
  Bits bits;            // recovered payload (x then y for dual-payload schemes)
  FrameSeq payload_x;   // post-DSP payload frames (superposed stream for PCTW)
  FrameSeq payload_y;   // empty for PCTW schemes
  double evm_db = 0.0;  // decision-directed payload EVM
};

/// Dispatches the selected scheme: compensation in the waveform domain,
/// demodulation, one-tap equalization, carrier phase recovery and (for PCTW
/// schemes) coherent superposition, then hard-decision demapping.
CompensateResult compensate(const DualPolWaveform& rx, const CompensationScheme& scheme,
                            const LinkConfig& link, const RxContext& ctx);

/// Demux helper: band selection, shift to baseband, decimation to the
/// channel rate. The identity when the buffer already is the single channel.
DualPolWaveform extract_channel(const DualPolWaveform& aggregate, double center_hz,
                                double bandwidth_hz, double channel_rate_hz);

/// Default demux / SC-DBP selection bandwidth: 1.1 x the occupied OFDM band,
/// or the full sampled band when the superchannel holds a single channel.
double default_selection_bandwidth(const OfdmConfig& cfg, int n_channels);

} // namespace cofdm
