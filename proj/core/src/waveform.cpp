#include "cofdm/waveform.hpp"

#include "cofdm/fft.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace cofdm {

namespace {
constexpr double kPi = std::numbers::pi;
}

DualPolWaveform DualPolWaveform::zeros(std::size_t n, double sample_rate_hz,
                                       double center_offset_hz) {
  DualPolWaveform w;
  w.x.assign(n, cplx{0.0, 0.0});
  w.y.assign(n, cplx{0.0, 0.0});
  w.sample_rate_hz = sample_rate_hz;
  w.center_offset_hz = center_offset_hz;
  return w;
}

void validate(const DualPolWaveform& w) {
  if (w.x.empty() || w.x.size() != w.y.size())
    throw std::invalid_argument("waveform: polarizations must have equal nonzero length");
  if (!(w.sample_rate_hz > 0.0))
    throw std::invalid_argument("waveform: sample rate must be positive");
}

double mean_power_w(const DualPolWaveform& w) {
  validate(w);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    acc += std::norm(w.x[i]) + std::norm(w.y[i]);
  return acc / static_cast<double>(w.size());
}

double power_dbm(const DualPolWaveform& w) {
  const double p = mean_power_w(w);
  if (p <= 0.0) throw std::domain_error("power_dbm: zero power waveform");
  return 10.0 * std::log10(p / 1e-3);
}

DualPolWaveform set_power(const DualPolWaveform& w, double target_dbm) {
  const double current = power_dbm(w); // throws on zero power
  const double scale = std::pow(10.0, (target_dbm - current) / 20.0);
  DualPolWaveform out = w;
  for (auto& v : out.x) v *= scale;
  for (auto& v : out.y) v *= scale;
  return out;
}

DualPolWaveform freq_shift(const DualPolWaveform& w, double delta_hz) {
  validate(w);
  if (std::abs(delta_hz) >= w.sample_rate_hz / 2.0)
    throw std::invalid_argument("freq_shift: shift beyond Nyquist");
  DualPolWaveform out = w;
  // incremental rotator instead of per-sample exp() would drift over long
  // buffers; use exact exp with per-sample phase reduced mod 2pi
  const double dphi = 2.0 * kPi * delta_hz / w.sample_rate_hz;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double ph = std::fmod(dphi * static_cast<double>(n), 2.0 * kPi);
    const cplx rot = std::polar(1.0, ph);
    out.x[n] *= rot;
    out.y[n] *= rot;
  }
  out.center_offset_hz = w.center_offset_hz + delta_hz;
  return out;
}

DualPolWaveform bandpass_select(const DualPolWaveform& w, double center_hz,
                                double bandwidth_hz) {
  validate(w);
  if (!(bandwidth_hz > 0.0))
    throw std::invalid_argument("bandpass_select: bandwidth must be positive");
  const double nyq = w.sample_rate_hz / 2.0;
  if (center_hz - bandwidth_hz / 2.0 < -nyq || center_hz + bandwidth_hz / 2.0 > nyq)
    throw std::invalid_argument("bandpass_select: band outside Nyquist range");

  const std::size_t n = w.size();
  const double half = bandwidth_hz / 2.0;
  const double roll = 0.05 * bandwidth_hz; // raised-cosine width outside the passband

  std::vector<double> h(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = std::abs(fft::bin_freq_hz(k, n, w.sample_rate_hz) - center_hz);
    if (d <= half)
      h[k] = 1.0;
    else if (d < half + roll)
      h[k] = 0.5 * (1.0 + std::cos(kPi * (d - half) / roll));
    else
      h[k] = 0.0;
  }

  DualPolWaveform out = w;
  out.center_offset_hz = center_hz;
  for (CVec* pol : {&out.x, &out.y}) {
    fft::forward(*pol);
    for (std::size_t k = 0; k < n; ++k) (*pol)[k] *= h[k];
    fft::inverse(*pol);
  }
  return out;
}

DualPolWaveform resample(const DualPolWaveform& w, double new_rate_hz) {
  validate(w);
  if (!(new_rate_hz > 0.0))
    throw std::invalid_argument("resample: rate must be positive");
  const std::size_t n = w.size();
  const double exact = static_cast<double>(n) * new_rate_hz / w.sample_rate_hz;
  const auto m = static_cast<std::size_t>(std::llround(exact));
  if (std::abs(exact - static_cast<double>(m)) > 1e-6 || m == 0)
    throw std::invalid_argument("resample: sample count must stay integral");
  if (m == n) return w;

  DualPolWaveform out = DualPolWaveform::zeros(m, new_rate_hz, w.center_offset_hz);
  const double scale = std::sqrt(static_cast<double>(m) / static_cast<double>(n));
  const std::size_t keep = std::min(n, m);
  for (auto [src, dst] : {std::pair{&w.x, &out.x}, std::pair{&w.y, &out.y}}) {
    CVec spec = *src;
    fft::forward(spec);
    // copy the band common to both grids, split at positive/negative halves
    const std::size_t pos = (keep + 1) / 2;
    const std::size_t neg = keep - pos;
    for (std::size_t k = 0; k < pos; ++k) (*dst)[k] = spec[k] * scale;
    for (std::size_t k = 0; k < neg; ++k) (*dst)[m - 1 - k] = spec[n - 1 - k] * scale;
    fft::inverse(*dst);
  }
  return out;
}

void write_fwv(const DualPolWaveform& w, const std::string& path) {
  validate(w);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_fwv: cannot open " + path);
  const char magic[4] = {'F', 'W', 'V', '1'};
  const auto count = static_cast<std::uint32_t>(w.size());
  bool ok = std::fwrite(magic, 1, 4, f) == 4;
  ok = ok && std::fwrite(&count, sizeof count, 1, f) == 1;
  ok = ok && std::fwrite(&w.sample_rate_hz, sizeof(double), 1, f) == 1;
  ok = ok && std::fwrite(&w.center_offset_hz, sizeof(double), 1, f) == 1;
  for (const CVec* pol : {&w.x, &w.y}) {
    for (const cplx& v : *pol) {
      const double re = v.real(), im = v.imag();
      ok = ok && std::fwrite(&re, sizeof re, 1, f) == 1;
      ok = ok && std::fwrite(&im, sizeof im, 1, f) == 1;
    }
  }
  std::fclose(f);
  if (!ok) throw std::runtime_error("write_fwv: short write to " + path);
}

DualPolWaveform read_fwv(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("read_fwv: cannot open " + path);
  char magic[4];
  std::uint32_t count = 0;
  DualPolWaveform w;
  bool ok = std::fread(magic, 1, 4, f) == 4 && std::memcmp(magic, "FWV1", 4) == 0;
  ok = ok && std::fread(&count, sizeof count, 1, f) == 1;
  ok = ok && std::fread(&w.sample_rate_hz, sizeof(double), 1, f) == 1;
  ok = ok && std::fread(&w.center_offset_hz, sizeof(double), 1, f) == 1;
  if (ok) {
    w.x.resize(count);
    w.y.resize(count);
    for (CVec* pol : {&w.x, &w.y}) {
      for (cplx& v : *pol) {
        double re = 0.0, im = 0.0;
        ok = ok && std::fread(&re, sizeof re, 1, f) == 1;
        ok = ok && std::fread(&im, sizeof im, 1, f) == 1;
        v = {re, im};
      }
    }
  }
  std::fclose(f);
  if (!ok) throw std::runtime_error("read_fwv: malformed FWV1 file " + path);
  return w;
}

} // namespace cofdm
