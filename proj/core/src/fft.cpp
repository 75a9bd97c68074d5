#include "cofdm/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cofdm::fft {

namespace {

// Plan creation is not thread-safe in FFTW; executing a plan on a new array
// is. Plans are created UNALIGNED so they can run on any heap buffer.
class PlanCache {
public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::complex<double>* data, std::size_t n, int sign) {
  if (n == 0) throw std::invalid_argument("fft: empty buffer");
  fftw_plan plan = cache().get(n, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, buf, buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
}

} // namespace

void forward(std::complex<double>* data, std::size_t n) { execute(data, n, FFTW_FORWARD); }
void forward(std::vector<std::complex<double>>& data) { forward(data.data(), data.size()); }

void inverse(std::complex<double>* data, std::size_t n) { execute(data, n, FFTW_BACKWARD); }
void inverse(std::vector<std::complex<double>>& data) { inverse(data.data(), data.size()); }

double bin_freq_hz(std::size_t k, std::size_t n, double sample_rate_hz) {
  // k < ceil(n/2) -> positive branch, rest wraps negative (Nyquist bin at -fs/2)
  const double idx = (k < (n + 1) / 2) ? static_cast<double>(k)
                                       : static_cast<double>(k) - static_cast<double>(n);
  return idx * sample_rate_hz / static_cast<double>(n);
}

} // namespace cofdm::fft
