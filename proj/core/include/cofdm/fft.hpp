#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace cofdm::fft {

/// In-place unitary forward transform (scaled by 1/sqrt(n)).
void forward(std::complex<double>* data, std::size_t n);
void forward(std::vector<std::complex<double>>& data);

/// In-place unitary inverse transform (scaled by 1/sqrt(n)).
void inverse(std::complex<double>* data, std::size_t n);
void inverse(std::vector<std::complex<double>>& data);

/// Signed frequency of FFT bin k for an n-point transform at rate fs:
/// bins above n/2 map to negative frequencies.
double bin_freq_hz(std::size_t k, std::size_t n, double sample_rate_hz);

} // namespace cofdm::fft
