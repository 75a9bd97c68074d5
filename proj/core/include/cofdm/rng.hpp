#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace cofdm {

/// Deterministic, platform-independent random stream (xoshiro256++ core,
/// Box-Muller gaussians). std:: distributions are implementation-defined,
/// which would break the byte-identical-output contract.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform();

  /// Standard normal.
  double gaussian();

  /// Circular complex gaussian with E|z|^2 == variance.
  std::complex<double> complex_gaussian(double variance);

private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent substream from (seed, tag, a, b). Streams with
/// different keys are statistically independent and reproducible regardless
/// of evaluation order.
Rng derive_stream(std::uint64_t seed, std::string_view tag,
                  std::uint64_t a = 0, std::uint64_t b = 0);

} // namespace cofdm
