#include "cofdm/channel.hpp"

#include "cofdm/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cofdm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;  // m/s
constexpr double kPlanck = 6.62607015e-34;     // J s
constexpr double kManakovFactor = 8.0 / 9.0;

double sinc_ratio_h_eff(double alpha_per_m, double h_m) {
  // 2 sinh(alpha h / 2) / alpha; even in alpha, -> h as alpha -> 0
  const double a = alpha_per_m * h_m / 2.0;
  if (std::abs(a) < 1e-9) return h_m;
  return 2.0 * std::sinh(a) / alpha_per_m;
}

struct SsfmCoeffs {
  double alpha;   // power nepers/m, signed by direction
  double beta2;   // s^2/m, signed by direction
  double gamma;   // (8/9) gamma in 1/(W m), signed by direction
  double h;       // step length, m
  double h_eff;   // effective nonlinear length per step, m
  double omega0;  // band offset, rad/s
};

void check_finite(const DualPolWaveform& w, int step) {
  for (const CVec* pol : {&w.x, &w.y})
    for (const cplx& v : *pol)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error("ssfm_propagate: numerical blow-up at step " +
                                 std::to_string(step));
}

// frequency-domain multiplier for a linear segment of length z
CVec linear_operator(const SsfmCoeffs& c, std::size_t n, double fs, double z) {
  CVec h(n);
  const double amp = std::exp(-0.5 * c.alpha * z);
  for (std::size_t k = 0; k < n; ++k) {
    const double omega = 2.0 * kPi * fft::bin_freq_hz(k, n, fs) + c.omega0;
    h[k] = std::polar(amp, -0.5 * c.beta2 * omega * omega * z);
  }
  return h;
}

void apply_in_freq(DualPolWaveform& w, const CVec& h) {
  for (CVec* pol : {&w.x, &w.y}) {
    fft::forward(*pol);
    for (std::size_t k = 0; k < pol->size(); ++k) (*pol)[k] *= h[k];
    fft::inverse(*pol);
  }
}

void kerr_rotate(DualPolWaveform& w, const SsfmCoeffs& c) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p = std::norm(w.x[i]) + std::norm(w.y[i]);
    const cplx rot = std::polar(1.0, c.gamma * c.h_eff * p);
    w.x[i] *= rot;
    w.y[i] *= rot;
  }
}

} // namespace

double FiberParams::beta2_s2_m() const {
  const double lambda = reference_wavelength_nm * 1e-9;
  const double d_si = dispersion_ps_nm_km * 1e-6; // ps/(nm km) -> s/m^2
  return -d_si * lambda * lambda / (2.0 * kPi * kSpeedOfLight);
}

double FiberParams::beta2_ps2_km() const {
  return beta2_s2_m() * 1e27; // s^2/m -> ps^2/km
}

double FiberParams::alpha_per_m() const {
  return alpha_db_per_km * std::numbers::ln10 / 10.0 * 1e-3;
}

void validate(const FiberParams& fiber) {
  if (!(fiber.length_km > 0.0)) throw std::invalid_argument("fiber: length must be positive");
  if (fiber.alpha_db_per_km < 0.0) throw std::invalid_argument("fiber: alpha must be >= 0");
  if (fiber.gamma_per_w_km < 0.0) throw std::invalid_argument("fiber: gamma must be >= 0");
  if (!(fiber.reference_wavelength_nm > 0.0))
    throw std::invalid_argument("fiber: wavelength must be positive");
}

void validate(const LinkConfig& link) {
  validate(link.fiber);
  if (link.n_spans < 0) throw std::invalid_argument("link: n_spans must be >= 0");
  if (link.forward_steps_per_span < 1)
    throw std::invalid_argument("link: forward_steps_per_span must be >= 1");
  if (link.edfa_gain_db && *link.edfa_gain_db < 0.0)
    throw std::invalid_argument("link: edfa gain must be >= 0");
}

DualPolWaveform ssfm_propagate(const DualPolWaveform& w, const FiberParams& fiber,
                               int n_steps, Direction direction,
                               double band_center_offset_hz) {
  validate(w);
  validate(fiber);
  if (n_steps < 1) throw std::invalid_argument("ssfm_propagate: n_steps must be >= 1");

  const double sgn = direction == Direction::forward ? 1.0 : -1.0;
  SsfmCoeffs c;
  c.h = fiber.length_km * 1e3 / n_steps;
  c.alpha = sgn * fiber.alpha_per_m();
  c.beta2 = sgn * fiber.beta2_s2_m();
  c.gamma = sgn * kManakovFactor * fiber.gamma_per_w_km * 1e-3;
  c.h_eff = sinc_ratio_h_eff(c.alpha, c.h);
  c.omega0 = 2.0 * kPi * band_center_offset_hz;

  const std::size_t n = w.size();
  const double fs = w.sample_rate_hz;
  const CVec half = linear_operator(c, n, fs, c.h / 2.0);
  const CVec full = linear_operator(c, n, fs, c.h);

  DualPolWaveform out = w;
  check_finite(out, 0);
  apply_in_freq(out, half);
  for (int step = 0; step < n_steps; ++step) {
    kerr_rotate(out, c);
    check_finite(out, step + 1);
    apply_in_freq(out, step + 1 == n_steps ? half : full);
  }
  return out;
}

DualPolWaveform edfa_amplify(const DualPolWaveform& w, double gain_db, double nf_db,
                             NoiseStream noise, double reference_wavelength_nm) {
  validate(w);
  if (gain_db < 0.0) throw std::invalid_argument("edfa_amplify: gain must be >= 0 dB");
  const double gain_lin = std::pow(10.0, gain_db / 10.0);
  const double amp = std::sqrt(gain_lin);

  DualPolWaveform out = w;
  for (CVec* pol : {&out.x, &out.y})
    for (auto& v : *pol) v *= amp;

  if (noise.enabled && gain_lin > 1.0) {
    const double n_sp = std::pow(10.0, nf_db / 10.0) / 2.0;
    const double nu = kSpeedOfLight / (reference_wavelength_nm * 1e-9);
    const double s_ase = (gain_lin - 1.0) * n_sp * kPlanck * nu; // W/Hz per pol
    const double variance = s_ase * w.sample_rate_hz;
    for (CVec* pol : {&out.x, &out.y})
      for (auto& v : *pol) v += noise.rng.complex_gaussian(variance);
  }
  return out;
}

DualPolWaveform apply_phase_noise(const DualPolWaveform& w, double linewidth_hz,
                                  NoiseStream noise) {
  validate(w);
  if (linewidth_hz < 0.0)
    throw std::invalid_argument("apply_phase_noise: linewidth must be >= 0");
  if (!noise.enabled || linewidth_hz == 0.0) return w;

  DualPolWaveform out = w;
  const double inc_std = std::sqrt(2.0 * kPi * linewidth_hz / w.sample_rate_hz);
  double phi = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    phi += inc_std * noise.rng.gaussian();
    const cplx rot = std::polar(1.0, phi);
    out.x[i] *= rot;
    out.y[i] *= rot;
  }
  return out;
}

DualPolWaveform propagate_spans(DualPolWaveform w, const LinkConfig& link,
                                const NoiseContext& noise,
                                const SpanCallback& on_span) {
  validate(link);
  w = apply_phase_noise(w, link.tx_linewidth_hz, noise.stream("pn_tx"));
  for (int span = 0; span < link.n_spans; ++span) {
    w = ssfm_propagate(w, link.fiber, link.forward_steps_per_span, Direction::forward);
    if (link.pmd_enabled) {
      // coarse PMD: one random unitary rotation plus one DGD segment per span
      auto rng = derive_stream(noise.seed, "pmd", static_cast<std::uint64_t>(span));
      const double theta = 2.0 * kPi * rng.uniform();
      const double phi = std::acos(2.0 * rng.uniform() - 1.0) / 2.0;
      const double psi = 2.0 * kPi * rng.uniform();
      const cplx a = std::polar(std::cos(phi), psi);
      const cplx b = std::polar(std::sin(phi), theta);
      for (std::size_t i = 0; i < w.size(); ++i) {
        const cplx xv = w.x[i], yv = w.y[i];
        w.x[i] = a * xv + b * yv;
        w.y[i] = -std::conj(b) * xv + std::conj(a) * yv;
      }
      const double tau = link.fiber.pmd_ps_sqrt_km * 1e-12 *
                         std::sqrt(link.fiber.length_km);
      const std::size_t n = w.size();
      for (auto [pol, sign] : {std::pair{&w.x, +1.0}, std::pair{&w.y, -1.0}}) {
        fft::forward(*pol);
        for (std::size_t k = 0; k < n; ++k) {
          const double omega = 2.0 * kPi * fft::bin_freq_hz(k, n, w.sample_rate_hz);
          (*pol)[k] *= std::polar(1.0, sign * omega * tau / 2.0);
        }
        fft::inverse(*pol);
      }
    }
    w = edfa_amplify(w, link.effective_gain_db(), link.edfa_nf_db,
                     noise.stream("ase", static_cast<std::uint64_t>(span)),
                     link.fiber.reference_wavelength_nm);
    if (on_span) on_span(span + 1, w);
  }
  return w;
}

DualPolWaveform apply_lo_phase_noise(const DualPolWaveform& w, const LinkConfig& link,
                                     const NoiseContext& noise) {
  return apply_phase_noise(w, link.lo_linewidth_hz, noise.stream("pn_lo"));
}

DualPolWaveform propagate_link(const DualPolWaveform& w, const LinkConfig& link,
                               const NoiseContext& noise) {
  return apply_lo_phase_noise(propagate_spans(w, link, noise), link, noise);
}

} // namespace cofdm
