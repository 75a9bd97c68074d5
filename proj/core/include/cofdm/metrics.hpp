#pragma once

#include "cofdm/channel.hpp"
#include "cofdm/compensation.hpp"
#include "cofdm/ofdm.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cofdm {

/// One (scheme, launch power, distance) outcome.
struct SweepRecord {
  std::string scheme;
  double launch_power_dbm = 0.0;
  double distance_km = 0.0;
  double ber = 0.0;      // in [0,1]
  double q_db = 0.0;     // +inf for error-free, NaN when BER >= 0.5 or failed
  long long real_mults_per_subcarrier = 0;
  std::uint64_t seed = 0;
  bool confident = false; // >= 100 counted bit errors
  bool failed = false;
  std::string fail_reason;
};

/// Hamming distance / length. Lengths must match and be nonzero.
double ber_count(const Bits& rx, const Bits& tx);

/// Q_lin = sqrt(2) erfcinv(2 ber), returned as 20 log10(Q_lin).
/// Defined for 0 < ber < 0.5 only.
double q_from_ber(double ber);

/// Inverse of q_from_ber: ber = erfc(Q_lin / sqrt(2)) / 2.
double ber_from_q(double q_db);

/// 10 log10(sum |rx-ref|^2 / sum |ref|^2), clamped at the -120 dB sentinel.
double evm_db(const CVec& rx, const CVec& ref);

/// Maximum distance at which the per-distance best BER crosses fec_ber,
/// by linear interpolation of log10(BER) against distance. Requires at
/// least two distinct distances and at least one crossing.
double estimate_reach(std::span<const SweepRecord> records, double fec_ber);

/// Complex multiplications of one N-point FFT under the declared counting
/// convention: (N/2) log2 N.
long long fft_complex_mults(std::size_t n);

/// Analytic real-multiplication count per occupied subcarrier under the
/// declared convention: 1 complex mult = 4 real mults; an N-point FFT costs
/// (N/2) log2 N complex mults; LDC = 2 FFTs + N per block; DBP = (2 FFTs +
/// 4N) per step, times steps x spans; MC-DBP works at n_channels x N and is
/// divided by the n_channels x occupied subcarriers it processes; PCTW adds
/// N for the superposition. Rounded per block/step, so DBP counts stay
/// exactly linear in spans and steps.
long long count_real_mults(const CompensationScheme& scheme, const OfdmConfig& cfg,
                           const LinkConfig& link, int n_channels);

} // namespace cofdm
