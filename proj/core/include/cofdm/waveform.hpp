#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace cofdm {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Sampled complex baseband field on two polarizations. Samples are in
/// sqrt(W), so |x|^2 + |y|^2 is the instantaneous power in watts. Buffers are
/// FFT-periodic: every spectral operation treats them as circular.
struct DualPolWaveform {
  CVec x;
  CVec y;
  double sample_rate_hz = 0.0;
  /// Offset of this buffer's occupied band center from the superchannel
  /// center (bookkeeping for mux/demux).
  double center_offset_hz = 0.0;

  std::size_t size() const { return x.size(); }

  static DualPolWaveform zeros(std::size_t n, double sample_rate_hz,
                               double center_offset_hz = 0.0);
};

/// Throws std::invalid_argument unless both polarizations have equal nonzero
/// length and the sample rate is positive.
void validate(const DualPolWaveform& w);

/// Mean of |x|^2+|y|^2 in watts.
double mean_power_w(const DualPolWaveform& w);

/// Mean power referred to 1 mW. Throws std::domain_error on an all-zero
/// waveform (no finite dBm).
double power_dbm(const DualPolWaveform& w);

/// Uniform scaling of both polarizations so power_dbm(result) == target_dbm.
DualPolWaveform set_power(const DualPolWaveform& w, double target_dbm);

/// Multiplies sample n by exp(j 2 pi delta_hz n / fs) on both polarizations
/// and advances center_offset_hz by delta_hz. |delta_hz| must stay below
/// Nyquist.
DualPolWaveform freq_shift(const DualPolWaveform& w, double delta_hz);

/// FFT-domain band selection: unity inside [center - bw/2, center + bw/2],
/// raised-cosine decay over 5% of the passband width outside each edge, zero
/// beyond. The band itself must lie within the sampled spectrum.
DualPolWaveform bandpass_select(const DualPolWaveform& w, double center_hz,
                                double bandwidth_hz);

/// FFT resampling (spectrum zero-pad / truncation). new_rate/old_rate times
/// the sample count must be an integer; when decimating, content beyond the
/// new Nyquist must have been filtered off beforehand. Preserves time-domain
/// amplitudes.
DualPolWaveform resample(const DualPolWaveform& w, double new_rate_hz);

/// Binary dump format "FWV1": magic, u32 sample count, f64 sample rate,
/// f64 center offset, then (re,im) f64 pairs for x followed by y.
/// Little-endian.
void write_fwv(const DualPolWaveform& w, const std::string& path);
DualPolWaveform read_fwv(const std::string& path);

} // namespace cofdm
