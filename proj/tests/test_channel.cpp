#include "cofdm/channel.hpp"
#include "cofdm/compensation.hpp"
#include "cofdm/fft.hpp"
#include "cofdm/metrics.hpp"
#include "cofdm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

using namespace cofdm;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kC = 299792458.0;
constexpr double kPlanck = 6.62607015e-34;

DualPolWaveform tone(std::size_t n, double fs, double freq_hz, double amp_x,
                     double amp_y = 0.0) {
  DualPolWaveform w = DualPolWaveform::zeros(n, fs);
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = 2.0 * kPi * freq_hz * static_cast<double>(i) / fs;
    w.x[i] = std::polar(amp_x, ph);
    w.y[i] = std::polar(amp_y, ph);
  }
  return w;
}

DualPolWaveform noise_wave(std::size_t n, double fs, std::uint64_t seed,
                           double var = 1.0) {
  Rng rng(seed);
  DualPolWaveform w = DualPolWaveform::zeros(n, fs);
  for (std::size_t i = 0; i < n; ++i) {
    w.x[i] = rng.complex_gaussian(var);
    w.y[i] = rng.complex_gaussian(var);
  }
  return w;
}

double rel_rms_error(const DualPolWaveform& a, const DualPolWaveform& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.x[i] - b.x[i]) + std::norm(a.y[i] - b.y[i]);
    den += std::norm(b.x[i]) + std::norm(b.y[i]);
  }
  return std::sqrt(num / den);
}

double total_energy(const DualPolWaveform& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    acc += std::norm(w.x[i]) + std::norm(w.y[i]);
  return acc;
}

} // namespace

TEST_SUITE("channel") {

TEST_CASE("fiber defaults: beta2 is about -20.4 ps^2/km") {
  const FiberParams fiber;
  CHECK(fiber.beta2_ps2_km() == doctest::Approx(-20.4).epsilon(0.005));
  // independent route: beta2 = -D lambda^2 / (2 pi c), computed inline
  const double expected = -16e-6 * 1550e-9 * 1550e-9 / (2.0 * kPi * kC) * 1e27;
  CHECK(fiber.beta2_ps2_km() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ssfm: all-zero input stays zero") {
  const FiberParams fiber;
  const DualPolWaveform w = DualPolWaveform::zeros(512, 32e9);
  const DualPolWaveform out = ssfm_propagate(w, fiber, 4, Direction::forward);
  CHECK(total_energy(out) == 0.0);
}

TEST_CASE("ssfm: dispersion-only tone picks up the analytic quadratic phase") {
  // gamma = 0, alpha = 0: output = input rotated by exp(-j beta2/2 omega^2 L).
  // Expected phase derived from D directly: phi = pi D lambda^2 f0^2 L / c.
  FiberParams fiber;
  fiber.alpha_db_per_km = 0.0;
  fiber.gamma_per_w_km = 0.0;
  fiber.length_km = 80.0;

  const std::size_t n = 4096;
  const double fs = 32e9;
  const double f0 = 40.0 * fs / static_cast<double>(n); // exact bin
  const DualPolWaveform w = tone(n, fs, f0, 1.0, 0.3);
  const DualPolWaveform out = ssfm_propagate(w, fiber, 7, Direction::forward);

  const double d_si = 16e-6;     // s/m^2
  const double lambda = 1550e-9; // m
  const double length_m = 80e3;
  const double expected_phase = kPi * d_si * lambda * lambda * f0 * f0 * length_m / kC;

  for (std::size_t i : {std::size_t{0}, std::size_t{100}, n - 1}) {
    const cplx expected = w.x[i] * std::polar(1.0, expected_phase);
    CHECK(std::abs(std::arg(out.x[i] / expected)) < 1e-6);
    CHECK(std::abs(std::arg(out.y[i] / (w.y[i] * std::polar(1.0, expected_phase)))) <
          1e-6);
  }
}

TEST_CASE("ssfm: CW self-phase modulation matches the Manakov closed form") {
  // beta2 = 0, alpha = 0, constant field of power P on one polarization:
  // uniform phase (8/9) gamma P L at any step count
  FiberParams fiber;
  fiber.alpha_db_per_km = 0.0;
  fiber.dispersion_ps_nm_km = 0.0;
  fiber.length_km = 80.0;

  const double p_w = 0.002;
  DualPolWaveform w = DualPolWaveform::zeros(256, 32e9);
  for (auto& v : w.x) v = {std::sqrt(p_w), 0.0};

  const double expected = (8.0 / 9.0) * 1.22e-3 * p_w * 80e3;
  for (int steps : {1, 3, 10}) {
    const DualPolWaveform out = ssfm_propagate(w, fiber, steps, Direction::forward);
    CHECK(std::abs(std::arg(out.x[0] / w.x[0]) - expected) < 1e-6);
  }
}

TEST_CASE("ssfm: CW nonlinear phase under loss matches the effective-length form") {
  // with loss, the accumulated CW phase is (8/9) gamma P (1-e^{-alpha L})/alpha
  FiberParams fiber;
  fiber.dispersion_ps_nm_km = 0.0;
  const double p_w = 0.003;
  DualPolWaveform w = DualPolWaveform::zeros(128, 32e9);
  for (auto& v : w.x) v = {std::sqrt(p_w / 2), 0.0};
  for (auto& v : w.y) v = {std::sqrt(p_w / 2), 0.0};

  const double alpha = 0.2 * std::numbers::ln10 / 10.0 * 1e-3; // 1/m
  const double l_eff = (1.0 - std::exp(-alpha * 80e3)) / alpha;
  const double expected = (8.0 / 9.0) * 1.22e-3 * p_w * l_eff;
  for (int steps : {1, 2, 25}) {
    const DualPolWaveform out = ssfm_propagate(w, fiber, steps, Direction::forward);
    CHECK(std::abs(std::arg(out.x[0] / w.x[0]) - expected) < 1e-9);
  }
}

TEST_CASE("ssfm: lossless propagation conserves energy to 1e-10") {
  FiberParams fiber;
  fiber.alpha_db_per_km = 0.0;
  const DualPolWaveform w = noise_wave(2048, 32e9, 7, 1e-3);
  const DualPolWaveform out = ssfm_propagate(w, fiber, 20, Direction::forward);
  CHECK(std::abs(total_energy(out) / total_energy(w) - 1.0) < 1e-10);
}

TEST_CASE("ssfm: backward pass inverts forward exactly at equal step count") {
  const FiberParams fiber; // loss, dispersion and nonlinearity all active
  const DualPolWaveform w = noise_wave(2048, 32e9, 13, 1e-3);
  for (int steps : {1, 4, 10}) {
    const DualPolWaveform fwd = ssfm_propagate(w, fiber, steps, Direction::forward);
    const DualPolWaveform back = ssfm_propagate(fwd, fiber, steps, Direction::backward);
    CHECK(rel_rms_error(back, w) < 1e-8);
  }
}

TEST_CASE("ssfm: inversion also holds with a band offset") {
  const FiberParams fiber;
  const DualPolWaveform w = noise_wave(1024, 32e9, 17, 1e-3);
  const DualPolWaveform fwd = ssfm_propagate(w, fiber, 3, Direction::forward, 18.75e9);
  const DualPolWaveform back =
      ssfm_propagate(fwd, fiber, 3, Direction::backward, 18.75e9);
  CHECK(rel_rms_error(back, w) < 1e-8);
}

TEST_CASE("ssfm: doubling steps converges toward a fine reference") {
  FiberParams fiber;
  const DualPolWaveform w = set_power(noise_wave(4096, 32e9, 23), 10.0);
  const DualPolWaveform ref = ssfm_propagate(w, fiber, 64, Direction::forward);
  const double e1 = rel_rms_error(ssfm_propagate(w, fiber, 4, Direction::forward), ref);
  const double e2 = rel_rms_error(ssfm_propagate(w, fiber, 8, Direction::forward), ref);
  const double e3 = rel_rms_error(ssfm_propagate(w, fiber, 16, Direction::forward), ref);
  CHECK(e1 > e2);
  CHECK(e2 > e3);
}

TEST_CASE("ssfm: non-finite samples raise the blow-up error") {
  const FiberParams fiber;
  DualPolWaveform w = noise_wave(64, 32e9, 2);
  w.x[10] = {std::numeric_limits<double>::infinity(), 0.0};
  CHECK_THROWS_WITH_AS(ssfm_propagate(w, fiber, 2, Direction::forward),
                       doctest::Contains("numerical blow-up"), std::runtime_error);
}

TEST_CASE("edfa: 16 dB gain scales power exactly before noise") {
  const DualPolWaveform w = noise_wave(512, 32e9, 3, 1e-4);
  NoiseStream off{Rng(0), false};
  const DualPolWaveform out = edfa_amplify(w, 16.0, 4.0, off);
  CHECK(power_dbm(out) - power_dbm(w) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("edfa: zero gain adds no noise") {
  const DualPolWaveform w = noise_wave(256, 32e9, 5, 1e-4);
  NoiseStream on{Rng(11), true};
  const DualPolWaveform out = edfa_amplify(w, 0.0, 4.0, on);
  CHECK(rel_rms_error(out, w) == 0.0);
}

TEST_CASE("edfa: measured ASE power matches the declared formula within 2%") {
  // zero input, 1e6 samples at paper-style gain and NF
  const double fs = 32e9;
  const DualPolWaveform w = DualPolWaveform::zeros(1'000'000, fs);
  NoiseStream on{Rng(1234), true};
  const DualPolWaveform out = edfa_amplify(w, 16.0, 4.0, on, 1550.0);

  const double gain_lin = std::pow(10.0, 1.6);
  const double n_sp = std::pow(10.0, 0.4) / 2.0;
  const double nu = kC / 1550e-9;
  const double expected_var = (gain_lin - 1.0) * n_sp * kPlanck * nu * fs; // per pol
  const double measured = total_energy(out) / static_cast<double>(out.size());
  CHECK(measured == doctest::Approx(2.0 * expected_var).epsilon(0.02));
}

TEST_CASE("phase noise: zero linewidth is the identity") {
  const DualPolWaveform w = noise_wave(512, 32e9, 7);
  NoiseStream on{Rng(3), true};
  CHECK(rel_rms_error(apply_phase_noise(w, 0.0, on), w) == 0.0);
}

TEST_CASE("phase noise: per-sample magnitudes are untouched") {
  const DualPolWaveform w = noise_wave(4096, 32e9, 9);
  NoiseStream on{Rng(5), true};
  const DualPolWaveform out = apply_phase_noise(w, 100e3, on);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(std::abs(out.x[i]) == doctest::Approx(std::abs(w.x[i])).epsilon(1e-12));
    CHECK(std::abs(out.y[i]) == doctest::Approx(std::abs(w.y[i])).epsilon(1e-12));
  }
}

TEST_CASE("phase noise: increment variance matches 2 pi linewidth / fs within 3%") {
  const double fs = 32e9;
  const double linewidth = 100e3;
  const std::size_t n = 10'000'000;
  DualPolWaveform w = DualPolWaveform::zeros(n, fs);
  for (auto& v : w.x) v = {1.0, 0.0};
  for (auto& v : w.y) v = {1.0, 0.0};
  NoiseStream on{Rng(77), true};
  const DualPolWaveform out = apply_phase_noise(w, linewidth, on);

  double acc = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = std::arg(out.x[i] / out.x[i - 1]);
    acc += d * d;
  }
  const double measured = acc / static_cast<double>(n - 1);
  CHECK(measured == doctest::Approx(2.0 * kPi * linewidth / fs).epsilon(0.03));
}

TEST_CASE("propagate_link: zero spans with noise off is the identity") {
  LinkConfig link;
  link.n_spans = 0;
  const DualPolWaveform w = noise_wave(256, 32e9, 21, 1e-4);
  const DualPolWaveform out = propagate_link(w, link, NoiseContext{false, 1});
  CHECK(rel_rms_error(out, w) == 0.0);
}

TEST_CASE("propagate_link: accumulated dispersion phase is linear in span count") {
  // probe tone over 25 spans vs 25x the single-span analytic phase
  LinkConfig link;
  link.n_spans = 25;
  link.fiber.gamma_per_w_km = 0.0;
  link.forward_steps_per_span = 4;

  const std::size_t n = 1024;
  const double fs = 32e9;
  const double f0 = 32.0 * fs / static_cast<double>(n);
  const DualPolWaveform w = tone(n, fs, f0, 1e-3);
  const DualPolWaveform out = propagate_link(w, link, NoiseContext{false, 1});

  const double d_si = 16e-6;
  const double lambda = 1550e-9;
  const double span_phase = kPi * d_si * lambda * lambda * f0 * f0 * 80e3 / kC;
  const double got = std::arg(out.x[0] / (w.x[0] * std::polar(1.0, 25.0 * span_phase)));
  CHECK(std::abs(got) < 1e-5);
}

TEST_CASE("propagate_link + LDC: noiseless linear link recovers the input") {
  LinkConfig link;
  link.n_spans = 5;
  link.fiber.gamma_per_w_km = 0.0;
  link.forward_steps_per_span = 3;

  const DualPolWaveform w = noise_wave(4096, 32e9, 31, 1e-4);
  const DualPolWaveform rx = propagate_link(w, link, NoiseContext{false, 9});
  const DualPolWaveform eq = ldc(rx, link);
  CVec rx_flat(eq.x.begin(), eq.x.end());
  CVec tx_flat(w.x.begin(), w.x.end());
  CHECK(evm_db(rx_flat, tx_flat) < -60.0);
  CHECK(rel_rms_error(eq, w) < 1e-8);
}

TEST_CASE("propagate_link: identical seed gives bit-identical output") {
  LinkConfig link;
  link.n_spans = 2;
  link.forward_steps_per_span = 3;
  const DualPolWaveform w = noise_wave(512, 32e9, 41, 1e-4);
  const DualPolWaveform a = propagate_link(w, link, NoiseContext{true, 42});
  const DualPolWaveform b = propagate_link(w, link, NoiseContext{true, 42});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.x[i] == b.x[i]);
    CHECK(a.y[i] == b.y[i]);
  }
}

TEST_CASE("propagate_link: different seeds give different noise") {
  LinkConfig link;
  link.n_spans = 1;
  link.forward_steps_per_span = 2;
  const DualPolWaveform w = noise_wave(512, 32e9, 43, 1e-4);
  const DualPolWaveform a = propagate_link(w, link, NoiseContext{true, 1});
  const DualPolWaveform b = propagate_link(w, link, NoiseContext{true, 2});
  CHECK(rel_rms_error(a, b) > 1e-6);
}

TEST_CASE("pmd: energy conserved, deterministic, and mixes the polarizations") {
  LinkConfig link;
  link.n_spans = 2;
  link.forward_steps_per_span = 2;
  link.pmd_enabled = true;
  link.fiber.gamma_per_w_km = 0.0;
  link.fiber.alpha_db_per_km = 0.0;
  link.edfa_gain_db = 0.0;

  const DualPolWaveform w = noise_wave(1024, 32e9, 47, 1e-4);
  const NoiseContext noise{false, 5}; // pmd draws its own substream from the seed
  const DualPolWaveform a = propagate_link(w, link, noise);
  const DualPolWaveform b = propagate_link(w, link, noise);
  CHECK(std::abs(total_energy(a) / total_energy(w) - 1.0) < 1e-10);
  CHECK(rel_rms_error(a, b) == 0.0);

  link.pmd_enabled = false;
  const DualPolWaveform c = propagate_link(w, link, noise);
  CHECK(rel_rms_error(a, c) > 1e-6); // the rotations moved energy between pols
}

} // TEST_SUITE
