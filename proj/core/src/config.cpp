#include "cofdm/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cofdm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad numeric value for " + key + ": " + v);
  return d;
}

long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad integer value for " + key + ": " + v);
  return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument("config: bad boolean value for " + key + ": " + v);
}

// Raw key/value store with consumption tracking so drift (unknown keys) is a
// hard error while informational prefixes stay legal.
class Kv {
public:
  explicit Kv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                    " is not a key = value pair");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw std::invalid_argument("config: empty key on line " + std::to_string(lineno));
      if (!values_.emplace(key, value).second)
        throw std::invalid_argument("config: duplicate key " + key);
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string take(const std::string& key, const std::string& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    return it->second;
  }

  double take_double(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    return parse_double(key, it->second);
  }

  long long take_int(const std::string& key, long long fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    return parse_int(key, it->second);
  }

  bool take_bool(const std::string& key, bool fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    return parse_bool(key, it->second);
  }

  void finish() const {
    static const char* kInfoPrefixes[] = {"derived.", "convention.", "run."};
    for (const auto& [key, value] : values_) {
      if (consumed_.count(key)) continue;
      const bool informational =
          std::any_of(std::begin(kInfoPrefixes), std::end(kInfoPrefixes),
                      [&](const char* p) { return key.rfind(p, 0) == 0; });
      if (!informational)
        throw std::invalid_argument("config: unknown key " + key);
    }
  }

private:
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

} // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

int measured_channel_index(const ExperimentConfig& cfg) {
  if (cfg.superchannel.measured_channel >= 0) return cfg.superchannel.measured_channel;
  return (cfg.superchannel.n_channels - 1) / 2;
}

double channel_offset_hz(const SuperchannelConfig& sc, int index) {
  return (static_cast<double>(index) - (sc.n_channels - 1) / 2.0) * sc.spacing_hz;
}

int aggregate_oversample_factor(const ExperimentConfig& cfg) {
  const int n = cfg.superchannel.n_channels;
  if (n <= 1) return 1;
  const double outer =
      (n - 1) / 2.0 * cfg.superchannel.spacing_hz; // outermost channel slot
  const double sel_bw = 1.1 * cfg.ofdm.occupied_bandwidth_hz();
  const double need = outer + 0.55 * sel_bw + 1e9; // selection filter support + margin
  const double half_ch = cfg.ofdm.sample_rate_hz / 2.0;
  return std::max(1, static_cast<int>(std::ceil(need / half_ch)));
}

double aggregate_sample_rate_hz(const ExperimentConfig& cfg) {
  return aggregate_oversample_factor(cfg) * cfg.ofdm.sample_rate_hz;
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.ofdm);
  validate(cfg.link);
  if (cfg.superchannel.n_channels < 1)
    throw std::invalid_argument("config: n_channels must be >= 1");
  if (!(cfg.superchannel.spacing_hz > 0.0))
    throw std::invalid_argument("config: channel spacing must be positive");
  if (measured_channel_index(cfg) >= cfg.superchannel.n_channels)
    throw std::invalid_argument("config: measured channel out of range");
  if (cfg.schemes.empty())
    throw std::invalid_argument("config: schemes list must be non-empty");
  if (cfg.sweep.power_grid_dbm.empty() || cfg.sweep.distance_grid_spans.empty())
    throw std::invalid_argument("config: sweep grids must be non-empty");
  for (int d : cfg.sweep.distance_grid_spans)
    if (d < 1) throw std::invalid_argument("config: distances must be >= 1 span");
  if (cfg.sweep.n_ofdm_symbols < cfg.ofdm.training_symbols + 1)
    throw std::invalid_argument("config: n_ofdm_symbols must exceed training symbols");
  if (cfg.sweep.n_seeds < 1)
    throw std::invalid_argument("config: n_seeds must be >= 1");
  if (!(cfg.sweep.fec_ber > 0.0 && cfg.sweep.fec_ber < 0.5))
    throw std::invalid_argument("config: fec_ber must be in (0, 0.5)");
  if (cfg.superchannel.n_channels > 1 &&
      cfg.superchannel.spacing_hz < cfg.ofdm.occupied_bandwidth_hz())
    throw std::invalid_argument("config: channels overlap (spacing < occupied band)");
}

ExperimentConfig parse_config_text(const std::string& text) {
  Kv kv(text);
  ExperimentConfig cfg;

  cfg.seed = static_cast<std::uint64_t>(kv.take_int("seed", 1));
  cfg.noise_enabled = kv.take_bool("noise.enabled", true);

  cfg.ofdm.fft_size = static_cast<std::size_t>(kv.take_int("ofdm.fft_size", 4096));
  cfg.ofdm.data_subcarriers =
      static_cast<std::size_t>(kv.take_int("ofdm.data_subcarriers", 3300));
  cfg.ofdm.pilot_subcarriers =
      static_cast<std::size_t>(kv.take_int("ofdm.pilot_subcarriers", 4));
  cfg.ofdm.cp_fraction = kv.take_double("ofdm.cp_fraction", 0.03);
  cfg.ofdm.training_symbols =
      static_cast<std::size_t>(kv.take_int("ofdm.training_symbols", 2));
  cfg.ofdm.qam_order = static_cast<unsigned>(kv.take_int("ofdm.qam_order", 16));
  cfg.ofdm.sample_rate_hz = kv.take_double("ofdm.sample_rate_hz", 32e9);

  cfg.link.fiber.length_km = kv.take_double("link.span_length_km", 80.0);
  cfg.link.fiber.alpha_db_per_km = kv.take_double("link.alpha_db_per_km", 0.2);
  cfg.link.fiber.dispersion_ps_nm_km = kv.take_double("link.dispersion_ps_nm_km", 16.0);
  cfg.link.fiber.gamma_per_w_km = kv.take_double("link.gamma_per_w_km", 1.22);
  cfg.link.fiber.pmd_ps_sqrt_km = kv.take_double("link.pmd_ps_sqrt_km", 0.1);
  cfg.link.fiber.reference_wavelength_nm =
      kv.take_double("link.reference_wavelength_nm", 1550.0);
  const std::string gain = kv.take("link.edfa_gain_db", "auto");
  if (gain == "auto")
    cfg.link.edfa_gain_db.reset();
  else
    cfg.link.edfa_gain_db = parse_double("link.edfa_gain_db", gain);
  cfg.link.edfa_nf_db = kv.take_double("link.edfa_nf_db", 4.0);
  cfg.link.tx_linewidth_hz = kv.take_double("link.tx_linewidth_hz", 100e3);
  cfg.link.lo_linewidth_hz = kv.take_double("link.lo_linewidth_hz", 100e3);
  cfg.link.pmd_enabled = kv.take_bool("link.pmd_enabled", false);
  cfg.link.forward_steps_per_span =
      static_cast<int>(kv.take_int("link.forward_steps_per_span", 100));

  cfg.superchannel.n_channels =
      static_cast<int>(kv.take_int("superchannel.n_channels", 4));
  cfg.superchannel.spacing_hz = kv.take_double("superchannel.spacing_hz", 37.5e9);
  const std::string measured = kv.take("superchannel.measured_channel", "auto");
  cfg.superchannel.measured_channel =
      measured == "auto"
          ? -1
          : static_cast<int>(parse_int("superchannel.measured_channel", measured));

  const auto scheme_names = split_list(kv.take("schemes", "ldc"));
  for (const auto& name : scheme_names) {
    CompensationScheme s = scheme_from_name(name);
    const std::string prefix = "scheme." + name + ".";
    if (auto* sd = std::get_if<ScDbp>(&s)) {
      sd->steps_per_span =
          static_cast<int>(kv.take_int(prefix + "steps_per_span", sd->steps_per_span));
      const std::string bw = kv.take(prefix + "channel_bandwidth_hz", "auto");
      sd->channel_bandwidth_hz =
          bw == "auto" ? 0.0 : parse_double(prefix + "channel_bandwidth_hz", bw);
    } else if (auto* mc = std::get_if<McDbp>(&s)) {
      mc->steps_per_span =
          static_cast<int>(kv.take_int(prefix + "steps_per_span", mc->steps_per_span));
    } else if (auto* jd = std::get_if<ScDbpPctw>(&s)) {
      jd->steps_per_span =
          static_cast<int>(kv.take_int(prefix + "steps_per_span", jd->steps_per_span));
      const std::string bw = kv.take(prefix + "channel_bandwidth_hz", "auto");
      jd->channel_bandwidth_hz =
          bw == "auto" ? 0.0 : parse_double(prefix + "channel_bandwidth_hz", bw);
    }
    cfg.schemes.push_back(std::move(s));
  }

  for (const auto& p : split_list(kv.take("sweep.power_grid_dbm", "0")))
    cfg.sweep.power_grid_dbm.push_back(parse_double("sweep.power_grid_dbm", p));
  for (const auto& d : split_list(kv.take("sweep.distance_grid_spans", "25")))
    cfg.sweep.distance_grid_spans.push_back(
        static_cast<int>(parse_int("sweep.distance_grid_spans", d)));
  cfg.sweep.n_ofdm_symbols =
      static_cast<std::size_t>(kv.take_int("sweep.n_ofdm_symbols", 20));
  cfg.sweep.n_seeds = static_cast<int>(kv.take_int("sweep.n_seeds", 1));
  cfg.sweep.fec_ber = kv.take_double("sweep.fec_ber", 2.7e-2);

  kv.finish();

  cfg.link.n_spans = *std::max_element(cfg.sweep.distance_grid_spans.begin(),
                                       cfg.sweep.distance_grid_spans.end());
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string write_config_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "seed = " << cfg.seed << "\n";
  out << "noise.enabled = " << (cfg.noise_enabled ? "true" : "false") << "\n\n";

  out << "ofdm.fft_size = " << cfg.ofdm.fft_size << "\n";
  out << "ofdm.data_subcarriers = " << cfg.ofdm.data_subcarriers << "\n";
  out << "ofdm.pilot_subcarriers = " << cfg.ofdm.pilot_subcarriers << "\n";
  out << "ofdm.cp_fraction = " << format_double(cfg.ofdm.cp_fraction) << "\n";
  out << "ofdm.training_symbols = " << cfg.ofdm.training_symbols << "\n";
  out << "ofdm.qam_order = " << cfg.ofdm.qam_order << "\n";
  out << "ofdm.sample_rate_hz = " << format_double(cfg.ofdm.sample_rate_hz) << "\n\n";

  out << "link.span_length_km = " << format_double(cfg.link.fiber.length_km) << "\n";
  out << "link.alpha_db_per_km = " << format_double(cfg.link.fiber.alpha_db_per_km) << "\n";
  out << "link.dispersion_ps_nm_km = "
      << format_double(cfg.link.fiber.dispersion_ps_nm_km) << "\n";
  out << "link.gamma_per_w_km = " << format_double(cfg.link.fiber.gamma_per_w_km) << "\n";
  out << "link.pmd_ps_sqrt_km = " << format_double(cfg.link.fiber.pmd_ps_sqrt_km) << "\n";
  out << "link.reference_wavelength_nm = "
      << format_double(cfg.link.fiber.reference_wavelength_nm) << "\n";
  out << "link.edfa_gain_db = "
      << (cfg.link.edfa_gain_db ? format_double(*cfg.link.edfa_gain_db) : "auto") << "\n";
  out << "link.edfa_nf_db = " << format_double(cfg.link.edfa_nf_db) << "\n";
  out << "link.tx_linewidth_hz = " << format_double(cfg.link.tx_linewidth_hz) << "\n";
  out << "link.lo_linewidth_hz = " << format_double(cfg.link.lo_linewidth_hz) << "\n";
  out << "link.pmd_enabled = " << (cfg.link.pmd_enabled ? "true" : "false") << "\n";
  out << "link.forward_steps_per_span = " << cfg.link.forward_steps_per_span << "\n\n";

  out << "superchannel.n_channels = " << cfg.superchannel.n_channels << "\n";
  out << "superchannel.spacing_hz = " << format_double(cfg.superchannel.spacing_hz) << "\n";
  out << "superchannel.measured_channel = ";
  if (cfg.superchannel.measured_channel < 0)
    out << "auto\n\n";
  else
    out << cfg.superchannel.measured_channel << "\n\n";

  out << "schemes = ";
  for (std::size_t i = 0; i < cfg.schemes.size(); ++i)
    out << (i ? ", " : "") << scheme_name(cfg.schemes[i]);
  out << "\n";
  for (const auto& s : cfg.schemes) {
    const std::string prefix = "scheme." + scheme_name(s) + ".";
    if (const auto* sd = std::get_if<ScDbp>(&s)) {
      out << prefix << "steps_per_span = " << sd->steps_per_span << "\n";
      out << prefix << "channel_bandwidth_hz = "
          << (sd->channel_bandwidth_hz > 0 ? format_double(sd->channel_bandwidth_hz)
                                           : "auto")
          << "\n";
    } else if (const auto* mc = std::get_if<McDbp>(&s)) {
      out << prefix << "steps_per_span = " << mc->steps_per_span << "\n";
    } else if (const auto* jd = std::get_if<ScDbpPctw>(&s)) {
      out << prefix << "steps_per_span = " << jd->steps_per_span << "\n";
      out << prefix << "channel_bandwidth_hz = "
          << (jd->channel_bandwidth_hz > 0 ? format_double(jd->channel_bandwidth_hz)
                                           : "auto")
          << "\n";
    }
  }
  out << "\n";

  out << "sweep.power_grid_dbm = ";
  for (std::size_t i = 0; i < cfg.sweep.power_grid_dbm.size(); ++i)
    out << (i ? ", " : "") << format_double(cfg.sweep.power_grid_dbm[i]);
  out << "\n";
  out << "sweep.distance_grid_spans = ";
  for (std::size_t i = 0; i < cfg.sweep.distance_grid_spans.size(); ++i)
    out << (i ? ", " : "") << cfg.sweep.distance_grid_spans[i];
  out << "\n";
  out << "sweep.n_ofdm_symbols = " << cfg.sweep.n_ofdm_symbols << "\n";
  out << "sweep.n_seeds = " << cfg.sweep.n_seeds << "\n";
  out << "sweep.fec_ber = " << format_double(cfg.sweep.fec_ber) << "\n";
  return out.str();
}

ExperimentConfig desk_preset() {
  ExperimentConfig cfg;
  cfg.seed = 20101;
  cfg.noise_enabled = true;

  cfg.ofdm.fft_size = 512;
  cfg.ofdm.data_subcarriers = 412;
  cfg.ofdm.pilot_subcarriers = 4;
  cfg.ofdm.cp_fraction = 0.03;
  cfg.ofdm.training_symbols = 2;
  cfg.ofdm.qam_order = 16;
  cfg.ofdm.sample_rate_hz = 32e9;

  // 10 spans of the full-scale fiber are far too easy for 20-symbol BER
  // counting, so the desk link emulates full-scale difficulty: stronger Kerr
  // coefficient and ASE, linewidth scaled up by roughly the symbol-length
  // ratio (512 vs 4096 FFT) to keep linewidth x symbol duration near its
  // full-scale value, and tighter channel spacing for full-scale
  // cross-channel load with only two carriers. Values chosen so every
  // scheme's optimum BER is countable within the preset's bit budget.
  cfg.link.fiber = FiberParams{};
  cfg.link.fiber.gamma_per_w_km = 4.0;
  cfg.link.edfa_gain_db.reset();
  cfg.link.edfa_nf_db = 12.0;
  cfg.link.tx_linewidth_hz = 700e3;
  cfg.link.lo_linewidth_hz = 700e3;
  cfg.link.pmd_enabled = false;
  cfg.link.forward_steps_per_span = 40;

  cfg.superchannel.n_channels = 2;
  cfg.superchannel.spacing_hz = 30e9;
  cfg.superchannel.measured_channel = -1;

  cfg.schemes = {Ldc{}, ScDbp{1, 0.0}, McDbp{16}, Pctw{}, ScDbpPctw{1, 0.0}};

  cfg.sweep.power_grid_dbm = {-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5, 6};
  cfg.sweep.distance_grid_spans = {2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14};
  cfg.sweep.n_ofdm_symbols = 20;
  cfg.sweep.n_seeds = 3;
  cfg.sweep.fec_ber = 2.7e-2;

  cfg.link.n_spans = 14;
  return cfg;
}

ExperimentConfig paper_preset() {
  ExperimentConfig cfg;
  cfg.seed = 20101;
  cfg.noise_enabled = true;

  cfg.ofdm.fft_size = 4096;
  cfg.ofdm.data_subcarriers = 3300;
  cfg.ofdm.pilot_subcarriers = 4;
  cfg.ofdm.cp_fraction = 0.03;
  cfg.ofdm.training_symbols = 2;
  cfg.ofdm.qam_order = 16;
  cfg.ofdm.sample_rate_hz = 32e9;

  cfg.link.fiber = FiberParams{};
  cfg.link.edfa_gain_db.reset();
  cfg.link.edfa_nf_db = 4.0;
  cfg.link.tx_linewidth_hz = 100e3;
  cfg.link.lo_linewidth_hz = 100e3;
  cfg.link.pmd_enabled = false;
  cfg.link.forward_steps_per_span = 100;

  cfg.superchannel.n_channels = 4;
  cfg.superchannel.spacing_hz = 37.5e9;
  cfg.superchannel.measured_channel = -1;

  cfg.schemes = {Ldc{}, ScDbp{1, 0.0}, McDbp{16}, Pctw{}, ScDbpPctw{1, 0.0}};

  cfg.sweep.power_grid_dbm = {-4, -3, -2, -1, 0, 1, 2, 3, 4};
  cfg.sweep.distance_grid_spans = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75};
  cfg.sweep.n_ofdm_symbols = 50;
  cfg.sweep.n_seeds = 1;
  cfg.sweep.fec_ber = 2.7e-2;

  cfg.link.n_spans = 75;
  return cfg;
}

} // namespace cofdm
