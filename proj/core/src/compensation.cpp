#include "cofdm/compensation.hpp"

#include "cofdm/fft.hpp"
#include "cofdm/metrics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cofdm {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string scheme_name(const CompensationScheme& scheme) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ldc>) return "ldc";
        else if constexpr (std::is_same_v<T, ScDbp>) return "sc-dbp";
        else if constexpr (std::is_same_v<T, McDbp>) return "mc-dbp";
        else if constexpr (std::is_same_v<T, Pctw>) return "pctw";
        else return "sc-dbp-pctw";
      },
      scheme);
}

CompensationScheme scheme_from_name(const std::string& name) {
  if (name == "ldc") return Ldc{};
  if (name == "sc-dbp") return ScDbp{};
  if (name == "mc-dbp") return McDbp{};
  if (name == "pctw") return Pctw{};
  if (name == "sc-dbp-pctw") return ScDbpPctw{};
  throw std::invalid_argument("unknown compensation scheme: " + name);
}

bool scheme_uses_pctw(const CompensationScheme& scheme) {
  return std::holds_alternative<Pctw>(scheme) ||
         std::holds_alternative<ScDbpPctw>(scheme);
}

int scheme_steps_per_span(const CompensationScheme& scheme) {
  if (const auto* s = std::get_if<ScDbp>(&scheme)) return s->steps_per_span;
  if (const auto* s = std::get_if<McDbp>(&scheme)) return s->steps_per_span;
  if (const auto* s = std::get_if<ScDbpPctw>(&scheme)) return s->steps_per_span;
  return 0;
}

DualPolWaveform ldc(const DualPolWaveform& w, const LinkConfig& link,
                    double band_center_offset_hz) {
  validate(w);
  validate(link);
  if (link.n_spans == 0) return w;
  const double beta2 = link.fiber.beta2_s2_m();
  const double total_m = link.total_length_km() * 1e3;
  const double omega0 = 2.0 * kPi * band_center_offset_hz;
  const std::size_t n = w.size();

  CVec h(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double omega = 2.0 * kPi * fft::bin_freq_hz(k, n, w.sample_rate_hz) + omega0;
    h[k] = std::polar(1.0, 0.5 * beta2 * omega * omega * total_m);
  }
  DualPolWaveform out = w;
  for (CVec* pol : {&out.x, &out.y}) {
    fft::forward(*pol);
    for (std::size_t k = 0; k < n; ++k) (*pol)[k] *= h[k];
    fft::inverse(*pol);
  }
  return out;
}

DualPolWaveform dbp(const DualPolWaveform& w, const LinkConfig& link,
                    int steps_per_span, const DbpMode& mode) {
  validate(w);
  validate(link);
  if (steps_per_span < 1)
    throw std::invalid_argument("dbp: steps_per_span must be >= 1");

  DualPolWaveform cur = w;
  const auto* sc = std::get_if<SingleChannel>(&mode);
  if (sc) {
    const double bw = sc->bandwidth_hz > 0.0 ? sc->bandwidth_hz : w.sample_rate_hz;
    // full-band selection of a centered channel is the all-pass identity;
    // anything else goes through the filter, which enforces the Nyquist bound
    if (!(bw >= w.sample_rate_hz && sc->center_hz == 0.0))
      cur = bandpass_select(cur, sc->center_hz, bw);
  }

  if (link.n_spans > 0) {
    // back-propagate with the channel still at its grid slot: the absolute
    // frequency grid carries the walk-off term, and the (generally
    // non-bin-aligned) downshift must not precede the dispersion-inverting
    // operator or its wrap seam disperses into the payload
    const double ref_power_dbm = power_dbm(cur);
    const double inv_gain = std::pow(10.0, -link.effective_gain_db() / 20.0);
    for (int span = link.n_spans; span-- > 0;) {
      for (CVec* pol : {&cur.x, &cur.y})
        for (auto& v : *pol) v *= inv_gain;
      cur = ssfm_propagate(cur, link.fiber, steps_per_span, Direction::backward);
    }
    cur = set_power(cur, ref_power_dbm);
  }
  if (sc && sc->center_hz != 0.0) cur = freq_shift(cur, -sc->center_hz);
  return cur;
}

std::pair<FrameSeq, FrameSeq> pctw_encode(const FrameSeq& frames_x) {
  FrameSeq frames_y = frames_x;
  for (auto& frame : frames_y)
    for (auto& v : frame) v = std::conj(v);
  return {frames_x, frames_y};
}

FrameSeq pctw_superpose(const FrameSeq& frames_x, const FrameSeq& frames_y) {
  if (frames_x.size() != frames_y.size())
    throw std::invalid_argument("pctw_superpose: frame count mismatch");
  FrameSeq out(frames_x.size());
  for (std::size_t s = 0; s < frames_x.size(); ++s) {
    if (frames_x[s].size() != frames_y[s].size())
      throw std::invalid_argument("pctw_superpose: frame shape mismatch");
    out[s].resize(frames_x[s].size());
    for (std::size_t i = 0; i < out[s].size(); ++i)
      out[s][i] = 0.5 * (frames_x[s][i] + std::conj(frames_y[s][i]));
  }
  return out;
}

double default_selection_bandwidth(const OfdmConfig& cfg, int n_channels) {
  if (n_channels <= 1) return cfg.sample_rate_hz; // nothing to reject
  return 1.1 * cfg.occupied_bandwidth_hz();
}

DualPolWaveform extract_channel(const DualPolWaveform& aggregate, double center_hz,
                                double bandwidth_hz, double channel_rate_hz) {
  DualPolWaveform w = aggregate;
  if (!(bandwidth_hz >= aggregate.sample_rate_hz && center_hz == 0.0))
    w = bandpass_select(w, center_hz, bandwidth_hz);
  if (center_hz != 0.0) w = freq_shift(w, -center_hz);
  if (w.sample_rate_hz != channel_rate_hz) w = resample(w, channel_rate_hz);
  w.center_offset_hz = 0.0;
  return w;
}

namespace {

struct DemodulatedChannel {
  FrameSeq train_x, train_y;
  FrameSeq payload_x, payload_y;
};

DemodulatedChannel demodulate_split(const DualPolWaveform& ch, const OfdmConfig& cfg) {
  auto [fx, fy] = ofdm_demodulate(ch, cfg);
  if (fx.size() < cfg.training_symbols + 1)
    throw std::runtime_error("compensate: too few OFDM symbols for training + payload");
  DemodulatedChannel out;
  const auto t = cfg.training_symbols;
  out.train_x.assign(fx.begin(), fx.begin() + t);
  out.train_y.assign(fy.begin(), fy.begin() + t);
  out.payload_x.assign(fx.begin() + t, fx.end());
  out.payload_y.assign(fy.begin() + t, fy.end());
  return out;
}

// decision-directed payload EVM over whichever streams carry data
double decision_evm_db(const FrameSeq& frames, const SubcarrierPlan& plan) {
  const CVec rx = extract_data_symbols(frames, plan);
  const CVec ref = qam16_map(qam16_demap(rx));
  return evm_db(rx, ref);
}

} // namespace

CompensateResult compensate(const DualPolWaveform& rx, const CompensationScheme& scheme,
                            const LinkConfig& link, const RxContext& ctx) {
  validate(ctx.ofdm);
  const auto plan = make_plan(ctx.ofdm);
  const double sel_bw = ctx.selection_bandwidth_hz > 0.0
                            ? ctx.selection_bandwidth_hz
                            : default_selection_bandwidth(ctx.ofdm, ctx.n_channels);

  // waveform-domain compensation, then demux to the measured channel
  DualPolWaveform ch = [&] {
    if (std::holds_alternative<Ldc>(scheme) || std::holds_alternative<Pctw>(scheme)) {
      return extract_channel(ldc(rx, link), ctx.channel_offset_hz, sel_bw,
                             ctx.ofdm.sample_rate_hz);
    }
    if (const auto* mc = std::get_if<McDbp>(&scheme)) {
      return extract_channel(dbp(rx, link, mc->steps_per_span, MultiChannel{}),
                             ctx.channel_offset_hz, sel_bw, ctx.ofdm.sample_rate_hz);
    }
    const auto* sd = std::get_if<ScDbp>(&scheme);
    const auto* jd = std::get_if<ScDbpPctw>(&scheme);
    const int steps = sd ? sd->steps_per_span : jd->steps_per_span;
    const double explicit_bw = sd ? sd->channel_bandwidth_hz : jd->channel_bandwidth_hz;
    const double bw = explicit_bw > 0.0 ? explicit_bw : sel_bw;
    DualPolWaveform base =
        dbp(rx, link, steps, SingleChannel{ctx.channel_offset_hz, bw});
    if (base.sample_rate_hz != ctx.ofdm.sample_rate_hz)
      base = resample(base, ctx.ofdm.sample_rate_hz);
    base.center_offset_hz = 0.0;
    return base;
  }();

  auto demod = demodulate_split(ch, ctx.ofdm);
  FrameSeq eq_x = channel_equalize(demod.train_x, ctx.ref_x.training, demod.payload_x);
  FrameSeq eq_y = channel_equalize(demod.train_y, ctx.ref_y.training, demod.payload_y);
  FrameSeq cpr_x = phase_recover(eq_x, plan, ctx.ref_x.pilots);
  FrameSeq cpr_y = phase_recover(eq_y, plan, ctx.ref_y.pilots);

  CompensateResult result;
  if (scheme_uses_pctw(scheme)) {
    result.payload_x = pctw_superpose(cpr_x, cpr_y);
    result.bits = qam16_demap(extract_data_symbols(result.payload_x, plan));
    result.evm_db = decision_evm_db(result.payload_x, plan);
  } else {
    result.payload_x = std::move(cpr_x);
    result.payload_y = std::move(cpr_y);
    Bits bx = qam16_demap(extract_data_symbols(result.payload_x, plan));
    Bits by = qam16_demap(extract_data_symbols(result.payload_y, plan));
    result.bits = std::move(bx);
    result.bits.insert(result.bits.end(), by.begin(), by.end());
    result.evm_db = 0.5 * (decision_evm_db(result.payload_x, plan) +
                           decision_evm_db(result.payload_y, plan));
  }
  return result;
}

} // namespace cofdm
