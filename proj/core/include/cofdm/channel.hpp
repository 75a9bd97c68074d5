#pragma once

#include "cofdm/rng.hpp"
#include "cofdm/waveform.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace cofdm {

/// Physical constants of one fiber span.
struct FiberParams {
  double length_km = 80.0;
  double alpha_db_per_km = 0.2;
  double dispersion_ps_nm_km = 16.0;
  double gamma_per_w_km = 1.22;
  double pmd_ps_sqrt_km = 0.1;
  double reference_wavelength_nm = 1550.0;

  /// beta2 = -D lambda^2 / (2 pi c); about -20.4 ps^2/km at defaults.
  double beta2_ps2_km() const;
  double beta2_s2_m() const;
  /// Power attenuation in nepers per meter.
  double alpha_per_m() const;
  double span_loss_db() const { return alpha_db_per_km * length_km; }
};

void validate(const FiberParams& fiber);

/// The span chain: amplifier settings default to exact loss compensation.
struct LinkConfig {
  int n_spans = 25;
  FiberParams fiber;
  std::optional<double> edfa_gain_db; // defaults to span loss
  double edfa_nf_db = 4.0;
  double tx_linewidth_hz = 100e3;
  double lo_linewidth_hz = 100e3;
  bool pmd_enabled = false;
  int forward_steps_per_span = 100;

  double effective_gain_db() const {
    return edfa_gain_db.value_or(fiber.span_loss_db());
  }
  double total_length_km() const { return fiber.length_km * n_spans; }
};

void validate(const LinkConfig& link);

/// One consumer's noise stream: disabled streams draw nothing.
struct NoiseStream {
  Rng rng;
  bool enabled = true;
};

/// Run-level noise control. Every consumer derives an independent substream
/// keyed by (seed, stage tag, index), so results do not depend on evaluation
/// order or worker count.
struct NoiseContext {
  bool enabled = true;
  std::uint64_t seed = 0;

  NoiseStream stream(std::string_view stage, std::uint64_t index = 0) const {
    return NoiseStream{derive_stream(seed, stage, index), enabled};
  }
};

enum class Direction { forward, backward };

/// Symmetric split-step solution of the Manakov equations (8/9-averaged
/// nonlinearity): per step, a dispersive/lossy half step in the frequency
/// domain, the Kerr phase rotation exp(j s gamma (8/9) (|x|^2+|y|^2) h_eff)
/// at the midpoint, and the second half step. The backward direction negates
/// alpha, beta2 and the nonlinear sign, making it the exact operator inverse
/// of the forward pass at equal step count.
///
/// h_eff = 2 sinh(alpha h / 2) / alpha weights the Kerr phase with the local
/// power profile (equivalent to (1-e^{-alpha h})/alpha referenced to the
/// step-start power).
///
/// band_center_offset_hz shifts the frequency grid of the dispersion
/// operator: a channel buffer brought to baseband from offset f_c propagates
/// with the absolute-frequency phase (includes the walk-off term).
DualPolWaveform ssfm_propagate(const DualPolWaveform& w, const FiberParams& fiber,
                               int n_steps, Direction direction,
                               double band_center_offset_hz = 0.0);

/// EDFA: amplitude gain 10^(gain_db/20) plus circular complex ASE per
/// polarization with per-sample variance (G-1) n_sp h nu f_s,
/// n_sp = 10^(nf_db/10)/2.
DualPolWaveform edfa_amplify(const DualPolWaveform& w, double gain_db, double nf_db,
                             NoiseStream noise,
                             double reference_wavelength_nm = 1550.0);

/// Common laser phase noise on both polarizations: Wiener phase with
/// increment variance 2 pi linewidth / f_s per sample.
DualPolWaveform apply_phase_noise(const DualPolWaveform& w, double linewidth_hz,
                                  NoiseStream noise);

/// Called after each span's amplifier with the 1-based span index.
using SpanCallback = std::function<void(int span, const DualPolWaveform& w)>;

/// Transmitter phase noise, then n_spans of (forward SSFM at
/// forward_steps_per_span, EDFA). LO phase noise is NOT applied here so
/// checkpoints can each receive their own receiver-side copy; see
/// propagate_link for the full chain.
DualPolWaveform propagate_spans(DualPolWaveform w, const LinkConfig& link,
                                const NoiseContext& noise,
                                const SpanCallback& on_span = {});

/// Full forward channel: tx phase noise, span chain, LO phase noise.
DualPolWaveform propagate_link(const DualPolWaveform& w, const LinkConfig& link,
                               const NoiseContext& noise);

/// Receiver-side LO phase noise for a checkpoint copy.
DualPolWaveform apply_lo_phase_noise(const DualPolWaveform& w, const LinkConfig& link,
                                     const NoiseContext& noise);

} // namespace cofdm
