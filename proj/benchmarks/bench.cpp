// Microbenchmarks for the hot kernels: the split-step loop, its FFT sizes,
// and the OFDM modem. Run from the build tree: benchmarks/microbench.

#include "cofdm/channel.hpp"
#include "cofdm/compensation.hpp"
#include "cofdm/fft.hpp"
#include "cofdm/ofdm.hpp"
#include "cofdm/rng.hpp"

#include <benchmark/benchmark.h>

#include <complex>

using namespace cofdm;

namespace {

DualPolWaveform random_wave(std::size_t n, double fs, double power_w) {
  Rng rng(99);
  DualPolWaveform w = DualPolWaveform::zeros(n, fs);
  for (std::size_t i = 0; i < n; ++i) {
    w.x[i] = rng.complex_gaussian(power_w / 2);
    w.y[i] = rng.complex_gaussian(power_w / 2);
  }
  return w;
}

void BM_FftUnitary(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CVec buf(n);
  Rng rng(1);
  for (auto& v : buf) v = rng.complex_gaussian(1.0);
  for (auto _ : state) {
    fft::forward(buf);
    fft::inverse(buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * n);
}
BENCHMARK(BM_FftUnitary)->Arg(512)->Arg(4096)->Arg(10540)->Arg(16384)->Arg(31620);

void BM_SsfmSpan(benchmark::State& state) {
  const auto steps = static_cast<int>(state.range(0));
  const FiberParams fiber;
  const DualPolWaveform w = random_wave(31620, 96e9, 1e-3);
  for (auto _ : state) {
    DualPolWaveform out = ssfm_propagate(w, fiber, steps, Direction::forward);
    benchmark::DoNotOptimize(out.x.data());
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_SsfmSpan)->Arg(1)->Arg(16)->Arg(40);

void BM_LdcAggregate(benchmark::State& state) {
  LinkConfig link;
  link.n_spans = 10;
  const DualPolWaveform w = random_wave(31620, 96e9, 1e-3);
  for (auto _ : state) {
    DualPolWaveform out = ldc(w, link);
    benchmark::DoNotOptimize(out.x.data());
  }
}
BENCHMARK(BM_LdcAggregate);

void BM_OfdmModDemod(benchmark::State& state) {
  OfdmConfig cfg;
  cfg.fft_size = 512;
  cfg.data_subcarriers = 412;
  cfg.pilot_subcarriers = 4;
  const SubcarrierPlan plan = make_plan(cfg);
  Rng rng(3);
  FrameSeq fx(20), fy(20);
  for (std::size_t s = 0; s < fx.size(); ++s) {
    fx[s].resize(plan.bins.size());
    fy[s].resize(plan.bins.size());
    for (std::size_t i = 0; i < plan.bins.size(); ++i) {
      fx[s][i] = rng.complex_gaussian(1.0);
      fy[s][i] = rng.complex_gaussian(1.0);
    }
  }
  for (auto _ : state) {
    const DualPolWaveform w = ofdm_modulate(fx, fy, cfg);
    auto frames = ofdm_demodulate(w, cfg);
    benchmark::DoNotOptimize(frames.first.data());
  }
  state.SetItemsProcessed(state.iterations() * fx.size());
}
BENCHMARK(BM_OfdmModDemod);

void BM_ChannelExtract(benchmark::State& state) {
  const DualPolWaveform w = random_wave(31620, 96e9, 1e-3);
  for (auto _ : state) {
    DualPolWaveform ch = extract_channel(w, -18.75e9, 28.6e9, 32e9);
    benchmark::DoNotOptimize(ch.x.data());
  }
}
BENCHMARK(BM_ChannelExtract);

void BM_Qam16MapDemap(benchmark::State& state) {
  Rng rng(5);
  Bits bits(4 * 4096);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
  for (auto _ : state) {
    const CVec sym = qam16_map(bits);
    Bits back = qam16_demap(sym);
    benchmark::DoNotOptimize(back.data());
  }
  state.SetItemsProcessed(state.iterations() * bits.size());
}
BENCHMARK(BM_Qam16MapDemap);

} // namespace

BENCHMARK_MAIN();
