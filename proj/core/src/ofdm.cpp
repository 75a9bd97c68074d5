#include "cofdm/ofdm.hpp"

#include "cofdm/fft.hpp"
#include "cofdm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cofdm {

namespace {

constexpr double kInvSqrt10 = 0.31622776601683794; // 1/sqrt(10)
constexpr double kInvSqrt2 = 0.7071067811865476;

bool power_of_four(unsigned v) {
  if (v < 4) return false;
  while (v % 4 == 0) v /= 4;
  return v == 1;
}

// signed bin -> FFT index
std::size_t wrap_bin(int k, std::size_t n) {
  return k >= 0 ? static_cast<std::size_t>(k)
                : n - static_cast<std::size_t>(-k);
}

// per-axis Gray pair (hi, lo) -> level in {-3,-1,+1,+3}
double axis_level(std::uint8_t hi, std::uint8_t lo) {
  if (!hi) return lo ? -1.0 : -3.0;
  return lo ? +1.0 : +3.0;
}

// level decision with ties toward the lower Gray code:
// t <= -2 -> 00, -2 < t <= 0 -> 01, 0 < t < 2 -> 11, t >= 2 -> 10
void axis_bits(double t, std::uint8_t& hi, std::uint8_t& lo) {
  if (t <= -2.0) {
    hi = 0; lo = 0;
  } else if (t <= 0.0) {
    hi = 0; lo = 1;
  } else if (t < 2.0) {
    hi = 1; lo = 1;
  } else {
    hi = 1; lo = 0;
  }
}

} // namespace

std::size_t OfdmConfig::cp_length() const {
  return static_cast<std::size_t>(
      std::llround(cp_fraction * static_cast<double>(fft_size)));
}

double OfdmConfig::occupied_bandwidth_hz() const {
  return static_cast<double>(occupied()) * sample_rate_hz /
         static_cast<double>(fft_size);
}

void validate(const OfdmConfig& cfg) {
  if (cfg.fft_size == 0) throw std::invalid_argument("ofdm: fft_size must be positive");
  if (cfg.data_subcarriers == 0)
    throw std::invalid_argument("ofdm: need at least one data subcarrier");
  if (cfg.occupied() > cfg.fft_size)
    throw std::invalid_argument("ofdm: occupied subcarriers exceed fft_size");
  if (!(cfg.cp_fraction >= 0.0 && cfg.cp_fraction < 1.0))
    throw std::invalid_argument("ofdm: cp_fraction must be in [0,1)");
  if (!power_of_four(cfg.qam_order))
    throw std::invalid_argument("ofdm: qam_order must be a power of 4");
  if (!(cfg.sample_rate_hz > 0.0))
    throw std::invalid_argument("ofdm: sample rate must be positive");
  if (cfg.pilot_subcarriers % 2 != 0)
    throw std::invalid_argument("ofdm: pilot count must be even");
}

SubcarrierPlan make_plan(const OfdmConfig& cfg) {
  validate(cfg);
  const auto occ = cfg.occupied();
  SubcarrierPlan plan;
  plan.fft_size = cfg.fft_size;
  plan.bins.resize(occ);
  const int k0 = -static_cast<int>(occ / 2);
  for (std::size_t i = 0; i < occ; ++i) plan.bins[i] = k0 + static_cast<int>(i);

  std::vector<int> pilot_bins;
  const auto p = cfg.pilot_subcarriers;
  for (std::size_t j = 0; j < p / 2; ++j) {
    const int mag = static_cast<int>((2 * j + 1) * occ / (2 * p));
    pilot_bins.push_back(-mag);
    pilot_bins.push_back(+mag);
  }
  std::sort(pilot_bins.begin(), pilot_bins.end());
  if (std::adjacent_find(pilot_bins.begin(), pilot_bins.end()) != pilot_bins.end())
    throw std::invalid_argument("ofdm: pilot positions collide");

  for (std::size_t i = 0; i < occ; ++i) {
    if (std::binary_search(pilot_bins.begin(), pilot_bins.end(), plan.bins[i]))
      plan.pilot_pos.push_back(i);
    else
      plan.data_pos.push_back(i);
  }
  if (plan.pilot_pos.size() != p)
    throw std::invalid_argument("ofdm: pilot positions fall outside the occupied band");
  return plan;
}

CVec qam16_map(const Bits& bits) {
  if (bits.size() % 4 != 0)
    throw std::invalid_argument("qam16_map: bit count not divisible by 4");
  CVec out(bits.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double re = axis_level(bits[4 * i], bits[4 * i + 1]);
    const double im = axis_level(bits[4 * i + 2], bits[4 * i + 3]);
    out[i] = cplx{re, im} * kInvSqrt10;
  }
  return out;
}

Bits qam16_demap(const CVec& symbols) {
  Bits out(symbols.size() * 4);
  const double scale = 1.0 / kInvSqrt10;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    axis_bits(symbols[i].real() * scale, out[4 * i], out[4 * i + 1]);
    axis_bits(symbols[i].imag() * scale, out[4 * i + 2], out[4 * i + 3]);
  }
  return out;
}

DualPolWaveform ofdm_modulate(const FrameSeq& x_frames, const FrameSeq& y_frames,
                              const OfdmConfig& cfg) {
  validate(cfg);
  if (cfg.qam_order != 16)
    throw std::invalid_argument("ofdm_modulate: only 16-QAM configurations supported");
  const auto plan = make_plan(cfg);
  if (x_frames.empty() || x_frames.size() != y_frames.size())
    throw std::invalid_argument("ofdm_modulate: frame/config mismatch");
  const std::size_t n = cfg.fft_size;
  const std::size_t cp = cfg.cp_length();
  const std::size_t sym_len = n + cp;

  DualPolWaveform w = DualPolWaveform::zeros(x_frames.size() * sym_len, cfg.sample_rate_hz);
  CVec buf(n);
  for (std::size_t s = 0; s < x_frames.size(); ++s) {
    for (auto [frames, pol] : {std::pair{&x_frames, &w.x}, std::pair{&y_frames, &w.y}}) {
      const SubcarrierFrame& frame = (*frames)[s];
      if (frame.size() != plan.bins.size())
        throw std::invalid_argument("ofdm_modulate: frame/config mismatch");
      std::fill(buf.begin(), buf.end(), cplx{0.0, 0.0});
      for (std::size_t i = 0; i < frame.size(); ++i)
        buf[wrap_bin(plan.bins[i], n)] = frame[i];
      fft::inverse(buf);
      cplx* dst = pol->data() + s * sym_len;
      for (std::size_t i = 0; i < cp; ++i) dst[i] = buf[n - cp + i];
      std::copy(buf.begin(), buf.end(), dst + cp);
    }
  }
  return w;
}

std::pair<FrameSeq, FrameSeq> ofdm_demodulate(const DualPolWaveform& w,
                                              const OfdmConfig& cfg) {
  validate(cfg);
  validate(w);
  const auto plan = make_plan(cfg);
  const std::size_t sym_len = cfg.symbol_length();
  if (w.size() % sym_len != 0)
    throw std::invalid_argument("ofdm_demodulate: non-integral OFDM block count");
  const std::size_t n_sym = w.size() / sym_len;
  const std::size_t n = cfg.fft_size;
  const std::size_t cp = cfg.cp_length();

  std::pair<FrameSeq, FrameSeq> out;
  out.first.resize(n_sym);
  out.second.resize(n_sym);
  CVec buf(n);
  for (std::size_t s = 0; s < n_sym; ++s) {
    for (auto [pol, frames] : {std::pair{&w.x, &out.first}, std::pair{&w.y, &out.second}}) {
      const cplx* src = pol->data() + s * sym_len + cp;
      std::copy(src, src + n, buf.begin());
      fft::forward(buf);
      SubcarrierFrame& frame = (*frames)[s];
      frame.resize(plan.bins.size());
      for (std::size_t i = 0; i < frame.size(); ++i)
        frame[i] = buf[wrap_bin(plan.bins[i], n)];
    }
  }
  return out;
}

FrameSeq channel_equalize(const FrameSeq& rx_training, const FrameSeq& known_training,
                          const FrameSeq& rx_payload) {
  if (rx_training.empty() || rx_training.size() != known_training.size())
    throw std::invalid_argument("channel_equalize: training size mismatch");
  const std::size_t width = rx_training.front().size();
  CVec h(width, cplx{0.0, 0.0});
  for (std::size_t t = 0; t < rx_training.size(); ++t) {
    if (rx_training[t].size() != width || known_training[t].size() != width)
      throw std::invalid_argument("channel_equalize: frame width mismatch");
    for (std::size_t i = 0; i < width; ++i)
      h[i] += rx_training[t][i] / known_training[t][i];
  }
  for (auto& v : h) {
    v /= static_cast<double>(rx_training.size());
    if (std::abs(v) < 1e-12)
      throw std::runtime_error("channel_equalize: unobservable subcarrier");
  }
  FrameSeq out = rx_payload;
  for (auto& frame : out) {
    if (frame.size() != width)
      throw std::invalid_argument("channel_equalize: payload width mismatch");
    for (std::size_t i = 0; i < width; ++i) frame[i] /= h[i];
  }
  return out;
}

FrameSeq phase_recover(const FrameSeq& frames, const SubcarrierPlan& plan,
                       const std::vector<CVec>& known_pilots) {
  if (known_pilots.size() != frames.size())
    throw std::invalid_argument("phase_recover: pilot reference length mismatch");
  FrameSeq out = frames;
  for (std::size_t s = 0; s < out.size(); ++s) {
    if (known_pilots[s].size() != plan.pilot_pos.size())
      throw std::invalid_argument("phase_recover: pilot count mismatch");
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < plan.pilot_pos.size(); ++j)
      acc += out[s][plan.pilot_pos[j]] * std::conj(known_pilots[s][j]);
    if (std::abs(acc) < 1e-12)
      throw std::runtime_error("phase_recover: phase unobservable");
    const cplx rot = std::polar(1.0, -std::arg(acc));
    for (auto& v : out[s]) v *= rot;
  }
  return out;
}

TxReference make_reference(const OfdmConfig& cfg, const SubcarrierPlan& plan,
                           std::uint64_t seed, std::string_view pol_tag,
                           int channel, std::size_t n_payload_symbols) {
  auto qpsk = [](Rng& rng) {
    const std::uint64_t v = rng.next_u64();
    return cplx{(v & 1) ? kInvSqrt2 : -kInvSqrt2,
                (v & 2) ? kInvSqrt2 : -kInvSqrt2};
  };

  TxReference ref;
  Rng train_rng = derive_stream(seed, "train", static_cast<std::uint64_t>(channel),
                                pol_tag == "x" ? 0 : 1);
  ref.training.resize(cfg.training_symbols);
  for (auto& frame : ref.training) {
    frame.resize(plan.bins.size());
    for (auto& v : frame) v = qpsk(train_rng);
  }

  Rng pilot_rng = derive_stream(seed, "pilot", static_cast<std::uint64_t>(channel),
                                pol_tag == "x" ? 0 : 1);
  ref.pilots.resize(n_payload_symbols);
  for (auto& row : ref.pilots) {
    row.resize(plan.pilot_pos.size());
    for (auto& v : row) v = qpsk(pilot_rng);
  }
  return ref;
}

FrameSeq assemble_payload_frames(const CVec& data_symbols,
                                 const std::vector<CVec>& pilots,
                                 const SubcarrierPlan& plan) {
  const std::size_t per_sym = plan.data_pos.size();
  if (per_sym == 0 || data_symbols.size() % per_sym != 0)
    throw std::invalid_argument("assemble_payload_frames: symbol count mismatch");
  const std::size_t n_sym = data_symbols.size() / per_sym;
  if (pilots.size() != n_sym)
    throw std::invalid_argument("assemble_payload_frames: pilot row count mismatch");

  FrameSeq frames(n_sym);
  for (std::size_t s = 0; s < n_sym; ++s) {
    frames[s].assign(plan.bins.size(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < per_sym; ++i)
      frames[s][plan.data_pos[i]] = data_symbols[s * per_sym + i];
    for (std::size_t j = 0; j < plan.pilot_pos.size(); ++j)
      frames[s][plan.pilot_pos[j]] = pilots[s][j];
  }
  return frames;
}

CVec extract_data_symbols(const FrameSeq& frames, const SubcarrierPlan& plan) {
  CVec out;
  out.reserve(frames.size() * plan.data_pos.size());
  for (const auto& frame : frames)
    for (std::size_t pos : plan.data_pos) out.push_back(frame[pos]);
  return out;
}

} // namespace cofdm
