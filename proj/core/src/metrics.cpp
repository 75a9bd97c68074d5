#include "cofdm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace cofdm {

namespace {

// Acklam's rational approximation of the inverse standard normal CDF,
// refined to machine precision with one Halley step against std::erfc.
double norm_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_inv: p outside (0,1)");

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement: e = Phi(x) - p
  for (int i = 0; i < 2; ++i) {
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::numbers::sqrt2 * std::sqrt(std::numbers::pi) *
                     std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
  }
  return x;
}

} // namespace

double ber_count(const Bits& rx, const Bits& tx) {
  if (rx.empty() || rx.size() != tx.size())
    throw std::invalid_argument("ber_count: bit stream length mismatch");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < rx.size(); ++i)
    errors += (rx[i] != tx[i]) ? 1 : 0;
  return static_cast<double>(errors) / static_cast<double>(rx.size());
}

double q_from_ber(double ber) {
  if (!(ber > 0.0 && ber < 0.5))
    throw std::domain_error("q_from_ber: Q undefined outside 0 < ber < 0.5");
  const double q_lin = -norm_inv(ber); // == sqrt(2) erfcinv(2 ber)
  return 20.0 * std::log10(q_lin);
}

double ber_from_q(double q_db) {
  const double q_lin = std::pow(10.0, q_db / 20.0);
  return 0.5 * std::erfc(q_lin / std::numbers::sqrt2);
}

double evm_db(const CVec& rx, const CVec& ref) {
  if (rx.size() != ref.size())
    throw std::invalid_argument("evm_db: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    num += std::norm(rx[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  if (den <= 0.0) throw std::domain_error("evm_db: zero reference energy");
  if (num <= 0.0) return -120.0; // sentinel: below -120 dB
  return std::max(10.0 * std::log10(num / den), -120.0);
}

double estimate_reach(std::span<const SweepRecord> records, double fec_ber) {
  if (!(fec_ber > 0.0)) throw std::domain_error("estimate_reach: fec_ber must be > 0");

  // best (minimum) BER per distance, over all launch powers given
  std::map<double, double> best;
  for (const auto& r : records) {
    if (r.failed || !std::isfinite(r.ber)) continue;
    auto [it, inserted] = best.emplace(r.distance_km, r.ber);
    if (!inserted) it->second = std::min(it->second, r.ber);
  }
  if (best.size() < 2)
    throw std::invalid_argument("estimate_reach: need records at >= 2 distances");

  std::vector<std::pair<double, double>> pts(best.begin(), best.end());
  const double log_fec = std::log10(fec_ber);
  auto log_ber = [](double ber) { return std::log10(std::max(ber, 1e-12)); };

  double reach = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double b0 = log_ber(pts[i].second), b1 = log_ber(pts[i + 1].second);
    const bool crosses = (b0 - log_fec) * (b1 - log_fec) <= 0.0 && b0 != b1;
    if (!crosses) continue;
    const double t = (log_fec - b0) / (b1 - b0);
    const double d = pts[i].first + t * (pts[i + 1].first - pts[i].first);
    if (!std::isfinite(reach) || d > reach) reach = d;
  }
  if (!std::isfinite(reach))
    throw std::runtime_error("estimate_reach: reach outside sweep range");
  return reach;
}

long long fft_complex_mults(std::size_t n) {
  return std::llround(0.5 * static_cast<double>(n) *
                      std::log2(static_cast<double>(n)));
}

long long count_real_mults(const CompensationScheme& scheme, const OfdmConfig& cfg,
                           const LinkConfig& link, int n_channels) {
  validate(cfg);
  validate(link);
  if (n_channels < 1) throw std::invalid_argument("count_real_mults: n_channels >= 1");

  const long long n = static_cast<long long>(cfg.fft_size);
  const long long occupied = static_cast<long long>(cfg.occupied());
  const long long spans = link.n_spans;

  // rounded to integer at the per-block/per-step level so DBP counts stay
  // exactly linear in spans and steps
  auto per_sc = [](long long complex_mults, long long divisor) {
    return std::llround(4.0 * static_cast<double>(complex_mults) /
                        static_cast<double>(divisor));
  };
  auto ldc_block = [&](long long size) { return 2 * fft_complex_mults(size) + size; };
  auto dbp_step = [&](long long size) { return 2 * fft_complex_mults(size) + 4 * size; };

  if (std::holds_alternative<Ldc>(scheme)) return per_sc(ldc_block(n), occupied);
  if (const auto* s = std::get_if<ScDbp>(&scheme))
    return spans * s->steps_per_span * per_sc(dbp_step(n), occupied);
  if (const auto* s = std::get_if<McDbp>(&scheme)) {
    const long long n_mc = n * n_channels;
    return spans * s->steps_per_span * per_sc(dbp_step(n_mc), occupied * n_channels);
  }
  if (std::holds_alternative<Pctw>(scheme))
    return per_sc(ldc_block(n), occupied) + per_sc(n, occupied);
  const auto& s = std::get<ScDbpPctw>(scheme);
  return spans * s.steps_per_span * per_sc(dbp_step(n), occupied) +
         per_sc(n, occupied);
}

} // namespace cofdm
