#include "cofdm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cofdm {

namespace {

Bits random_bits(std::uint64_t seed, int channel, int pol, std::size_t count) {
  Rng rng = derive_stream(seed, "bits", static_cast<std::uint64_t>(channel),
                          static_cast<std::uint64_t>(pol));
  Bits bits(count);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
  return bits;
}

TxReference conjugate_reference(const TxReference& ref) {
  TxReference out = ref;
  for (auto& frame : out.training)
    for (auto& v : frame) v = std::conj(v);
  for (auto& row : out.pilots)
    for (auto& v : row) v = std::conj(v);
  return out;
}

} // namespace

TxBuild build_superchannel(const ExperimentConfig& cfg, std::uint64_t seed, TxMode mode) {
  validate(cfg);
  const auto plan = make_plan(cfg.ofdm);
  const std::size_t n_payload = cfg.sweep.n_ofdm_symbols - cfg.ofdm.training_symbols;
  const std::size_t bits_per_pol = n_payload * plan.data_pos.size() * 4;
  const double fs_agg = aggregate_sample_rate_hz(cfg);
  const int measured = measured_channel_index(cfg);

  TxBuild build;
  for (int ch = 0; ch < cfg.superchannel.n_channels; ++ch) {
    const double offset = channel_offset_hz(cfg.superchannel, ch);
    TxReference ref_x = make_reference(cfg.ofdm, plan, seed, "x", ch, n_payload);
    Bits bits_x = random_bits(seed, ch, 0, bits_per_pol);

    FrameSeq frames_x = ref_x.training;
    {
      FrameSeq payload = assemble_payload_frames(qam16_map(bits_x), ref_x.pilots, plan);
      frames_x.insert(frames_x.end(), payload.begin(), payload.end());
    }

    FrameSeq frames_y;
    TxReference ref_y;
    Bits bits_y;
    if (mode == TxMode::pctw) {
      frames_y = pctw_encode(frames_x).second;
      ref_y = conjugate_reference(ref_x);
    } else {
      ref_y = make_reference(cfg.ofdm, plan, seed, "y", ch, n_payload);
      bits_y = random_bits(seed, ch, 1, bits_per_pol);
      frames_y = ref_y.training;
      FrameSeq payload = assemble_payload_frames(qam16_map(bits_y), ref_y.pilots, plan);
      frames_y.insert(frames_y.end(), payload.begin(), payload.end());
    }

    DualPolWaveform wch = ofdm_modulate(frames_x, frames_y, cfg.ofdm);
    if (fs_agg != cfg.ofdm.sample_rate_hz) wch = resample(wch, fs_agg);
    if (offset != 0.0) wch = freq_shift(wch, offset);

    if (build.aggregate.size() == 0) {
      build.aggregate = std::move(wch);
    } else {
      for (std::size_t i = 0; i < build.aggregate.size(); ++i) {
        build.aggregate.x[i] += wch.x[i];
        build.aggregate.y[i] += wch.y[i];
      }
    }

    if (ch == measured) {
      build.tx_bits = bits_x;
      if (mode == TxMode::polmux)
        build.tx_bits.insert(build.tx_bits.end(), bits_y.begin(), bits_y.end());
      build.rx_ctx.ofdm = cfg.ofdm;
      build.rx_ctx.n_channels = cfg.superchannel.n_channels;
      build.rx_ctx.channel_offset_hz = offset;
      build.rx_ctx.selection_bandwidth_hz = 0.0;
      build.rx_ctx.ref_x = std::move(ref_x);
      build.rx_ctx.ref_y = std::move(ref_y);
    }
  }
  build.aggregate.center_offset_hz = 0.0;
  return build;
}

namespace {

struct Cell {
  long long errors = 0;
  long long bits = 0;
  bool done = false;
  bool failed = false;
  std::string reason;
};

struct Job {
  int seed_idx = 0;
  TxMode mode = TxMode::polmux;
  std::size_t power_idx = 0;
};

} // namespace

SweepOutput run_sweep(const ExperimentConfig& cfg, int workers) {
  validate(cfg);

  const auto& schemes = cfg.schemes;
  const std::size_t n_schemes = schemes.size();
  const std::size_t n_powers = cfg.sweep.power_grid_dbm.size();
  const std::size_t n_dist = cfg.sweep.distance_grid_spans.size();
  const int n_seeds = cfg.sweep.n_seeds;
  const int n_ch = cfg.superchannel.n_channels;

  bool need_polmux = false, need_pctw = false;
  for (const auto& s : schemes) (scheme_uses_pctw(s) ? need_pctw : need_polmux) = true;
  std::vector<TxMode> modes;
  if (need_polmux) modes.push_back(TxMode::polmux);
  if (need_pctw) modes.push_back(TxMode::pctw);

  const int max_spans =
      *std::max_element(cfg.sweep.distance_grid_spans.begin(),
                        cfg.sweep.distance_grid_spans.end());
  std::map<int, std::vector<std::size_t>> span_to_dist;
  for (std::size_t d = 0; d < n_dist; ++d)
    span_to_dist[cfg.sweep.distance_grid_spans[d]].push_back(d);

  // transmitter realizations are shared across powers
  std::map<std::pair<int, TxMode>, TxBuild> builds;
  for (int s = 0; s < n_seeds; ++s)
    for (TxMode m : modes)
      builds.emplace(std::make_pair(s, m), build_superchannel(cfg, cfg.seed + s, m));

  std::vector<Job> jobs;
  for (int s = 0; s < n_seeds; ++s)
    for (TxMode m : modes)
      for (std::size_t p = 0; p < n_powers; ++p) jobs.push_back({s, m, p});

  // per job, one cell per (scheme, distance)
  std::vector<std::vector<Cell>> cells(jobs.size(),
                                       std::vector<Cell>(n_schemes * n_dist));

  auto run_job = [&](std::size_t j) {
    const Job& job = jobs[j];
    const TxBuild& tx = builds.at({job.seed_idx, job.mode});
    std::vector<Cell>& out = cells[j];

    std::vector<std::size_t> active; // schemes transmitted in this job's mode
    for (std::size_t i = 0; i < n_schemes; ++i)
      if (scheme_uses_pctw(schemes[i]) == (job.mode == TxMode::pctw))
        active.push_back(i);
    if (active.empty()) return;

    try {
      const double launch_total_dbm = cfg.sweep.power_grid_dbm[job.power_idx] +
                                      10.0 * std::log10(static_cast<double>(n_ch));
      DualPolWaveform w = set_power(tx.aggregate, launch_total_dbm);
      NoiseContext noise{cfg.noise_enabled, cfg.seed + job.seed_idx};
      LinkConfig link = cfg.link;
      link.n_spans = max_spans;

      propagate_spans(std::move(w), link, noise,
                      [&](int span, const DualPolWaveform& here) {
        auto it = span_to_dist.find(span);
        if (it == span_to_dist.end()) return;
        const DualPolWaveform rx = apply_lo_phase_noise(here, link, noise);
        for (std::size_t sch : active) {
          LinkConfig link_d = link;
          link_d.n_spans = span;
          Cell cell;
          try {
            const CompensateResult res = compensate(rx, schemes[sch], link_d, tx.rx_ctx);
            if (res.bits.size() != tx.tx_bits.size())
              throw std::runtime_error("payload bit count mismatch");
            long long errors = 0;
            for (std::size_t b = 0; b < res.bits.size(); ++b)
              errors += (res.bits[b] != tx.tx_bits[b]) ? 1 : 0;
            cell.errors = errors;
            cell.bits = static_cast<long long>(res.bits.size());
          } catch (const std::exception& e) {
            cell.failed = true;
            cell.reason = e.what();
          }
          cell.done = true;
          for (std::size_t d : it->second) out[sch * n_dist + d] = cell;
        }
      });
    } catch (const std::exception& e) {
      for (auto& cell : out) {
        cell.done = cell.failed = true;
        cell.reason = e.what();
      }
    }
  };

  int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::clamp<int>(n_workers, 1, static_cast<int>(jobs.size()));
  if (n_workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1))
          run_job(j);
      });
    for (auto& t : pool) t.join();
  }

  // fixed-order reduction: scheme-major, then power, then distance
  SweepOutput result;
  for (std::size_t sch = 0; sch < n_schemes; ++sch) {
    const TxMode mode = scheme_uses_pctw(schemes[sch]) ? TxMode::pctw : TxMode::polmux;
    for (std::size_t p = 0; p < n_powers; ++p) {
      for (std::size_t d = 0; d < n_dist; ++d) {
        SweepRecord rec;
        rec.scheme = scheme_name(schemes[sch]);
        rec.launch_power_dbm = cfg.sweep.power_grid_dbm[p];
        rec.distance_km =
            cfg.sweep.distance_grid_spans[d] * cfg.link.fiber.length_km;
        rec.seed = cfg.seed;

        long long errors = 0, bits = 0;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
          if (jobs[j].mode != mode || jobs[j].power_idx != p) continue;
          const Cell& cell = cells[j][sch * n_dist + d];
          if (!cell.done) continue;
          if (cell.failed) {
            if (!rec.failed) {
              rec.failed = true;
              rec.fail_reason = cell.reason;
            }
            continue;
          }
          errors += cell.errors;
          bits += cell.bits;
        }

        LinkConfig link_d = cfg.link;
        link_d.n_spans = cfg.sweep.distance_grid_spans[d];
        rec.real_mults_per_subcarrier =
            count_real_mults(schemes[sch], cfg.ofdm, link_d, n_ch);

        if (rec.failed || bits == 0) {
          rec.failed = true;
          if (rec.fail_reason.empty()) rec.fail_reason = "no successful seeds";
          rec.ber = std::numeric_limits<double>::quiet_NaN();
          rec.q_db = std::numeric_limits<double>::quiet_NaN();
        } else {
          rec.ber = static_cast<double>(errors) / static_cast<double>(bits);
          rec.confident = errors >= 100;
          if (errors == 0)
            rec.q_db = std::numeric_limits<double>::infinity();
          else if (rec.ber >= 0.5)
            rec.q_db = std::numeric_limits<double>::quiet_NaN();
          else
            rec.q_db = q_from_ber(rec.ber);
        }
        if (rec.failed) {
          std::ostringstream msg;
          msg << rec.scheme << " power=" << format_double(rec.launch_power_dbm)
              << "dBm distance=" << format_double(rec.distance_km)
              << "km: " << rec.fail_reason;
          result.failures.push_back(msg.str());
        }
        result.records.push_back(std::move(rec));
      }
    }
  }
  return result;
}

namespace {

std::string csv_double(double v, const char* fmt) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string record_row(const SweepRecord& r) {
  std::ostringstream out;
  out << r.scheme << ',' << csv_double(r.launch_power_dbm, "%.2f") << ','
      << csv_double(r.distance_km, "%.1f") << ',' << csv_double(r.ber, "%.5e") << ','
      << csv_double(r.q_db, "%.4f") << ',' << r.real_mults_per_subcarrier << ','
      << r.seed << ',' << (r.confident ? 1 : 0);
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_results: cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("emit_results: short write to " + path.string());
}

} // namespace

std::string results_csv_text(const SweepOutput& out) {
  std::ostringstream csv;
  csv << "scheme,power_dbm,distance_km,ber,q_db,real_mults_per_subcarrier,seed,confident\n";
  for (const auto& r : out.records) csv << record_row(r) << '\n';
  return csv.str();
}

void emit_results(const SweepOutput& out, const ExperimentConfig& cfg,
                  const std::string& out_dir) {
  if (out.records.empty()) throw std::invalid_argument("emit_results: empty table");
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir))
    throw std::runtime_error("emit_results: cannot create " + out_dir);

  write_file(dir / "results.csv", results_csv_text(out));

  // Q vs launch power, one row per grid point
  {
    std::ostringstream csv;
    csv << "scheme,distance_km,power_dbm,q_db\n";
    for (const auto& r : out.records)
      csv << r.scheme << ',' << csv_double(r.distance_km, "%.1f") << ','
          << csv_double(r.launch_power_dbm, "%.2f") << ','
          << csv_double(r.q_db, "%.4f") << '\n';
    write_file(dir / "q_vs_power.csv", csv.str());
  }

  // best point per (scheme, distance): the power-optimized reach curve
  std::map<std::string, std::map<double, const SweepRecord*>> best;
  for (const auto& r : out.records) {
    if (r.failed || !std::isfinite(r.ber)) continue;
    auto& slot = best[r.scheme][r.distance_km];
    if (!slot || r.ber < slot->ber) slot = &r;
  }
  {
    std::ostringstream csv;
    csv << "scheme,distance_km,best_ber,best_q_db,best_power_dbm\n";
    for (const auto& [scheme, by_dist] : best)
      for (const auto& [dist, rec] : by_dist)
        csv << scheme << ',' << csv_double(dist, "%.1f") << ','
            << csv_double(rec->ber, "%.5e") << ',' << csv_double(rec->q_db, "%.4f")
            << ',' << csv_double(rec->launch_power_dbm, "%.2f") << '\n';
    write_file(dir / "reach_curve.csv", csv.str());
  }

  // reach estimates at the FEC threshold
  {
    std::ostringstream csv;
    csv << "scheme,reach_km\n";
    std::map<std::string, std::vector<SweepRecord>> by_scheme;
    for (const auto& r : out.records) by_scheme[r.scheme].push_back(r);
    for (const auto& [scheme, records] : by_scheme) {
      std::string reach = "nan";
      try {
        reach = csv_double(estimate_reach(records, cfg.sweep.fec_ber), "%.1f");
      } catch (const std::exception&) {
        // no crossing inside the sweep
      }
      csv << scheme << ',' << reach << '\n';
    }
    write_file(dir / "reach_estimates.csv", csv.str());
  }

  // analytic complexity vs span count
  {
    const int max_spans =
        *std::max_element(cfg.sweep.distance_grid_spans.begin(),
                          cfg.sweep.distance_grid_spans.end());
    std::ostringstream csv;
    csv << "scheme,n_spans,real_mults_per_subcarrier\n";
    for (const auto& scheme : cfg.schemes)
      for (int n = 1; n <= max_spans; ++n) {
        LinkConfig link = cfg.link;
        link.n_spans = n;
        csv << scheme_name(scheme) << ',' << n << ','
            << count_real_mults(scheme, cfg.ofdm, link, cfg.superchannel.n_channels)
            << '\n';
      }
    write_file(dir / "complexity_vs_spans.csv", csv.str());
  }

  // metadata: the full config (reloadable) plus derived values and the
  // declared conventions behind the numbers
  {
    std::ostringstream md;
    md << write_config_text(cfg) << '\n';
    const auto plan = make_plan(cfg.ofdm);
    md << "derived.cp_length_samples = " << cfg.ofdm.cp_length() << '\n';
    md << "derived.occupied_subcarriers = " << cfg.ofdm.occupied() << '\n';
    md << "derived.occupied_bandwidth_hz = "
       << format_double(cfg.ofdm.occupied_bandwidth_hz()) << '\n';
    md << "derived.aggregate_oversample_factor = " << aggregate_oversample_factor(cfg)
       << '\n';
    md << "derived.aggregate_sample_rate_hz = "
       << format_double(aggregate_sample_rate_hz(cfg)) << '\n';
    md << "derived.beta2_ps2_km = " << format_double(cfg.link.fiber.beta2_ps2_km())
       << '\n';
    md << "derived.edfa_gain_db = " << format_double(cfg.link.effective_gain_db())
       << '\n';
    md << "derived.measured_channel = " << measured_channel_index(cfg) << '\n';
    md << "derived.channel_offsets_hz = ";
    for (int ch = 0; ch < cfg.superchannel.n_channels; ++ch)
      md << (ch ? ", " : "") << format_double(channel_offset_hz(cfg.superchannel, ch));
    md << '\n';
    md << "derived.pilot_bins = ";
    for (std::size_t i = 0; i < plan.pilot_pos.size(); ++i)
      md << (i ? ", " : "") << plan.bins[plan.pilot_pos[i]];
    md << '\n';
    {
      const double t_sym = cfg.ofdm.symbol_length() / cfg.ofdm.sample_rate_hz;
      const double per_ch = cfg.ofdm.data_subcarriers * 4.0 / t_sym;
      md << "derived.polmux_net_rate_gbps = "
         << format_double(2.0 * per_ch * cfg.superchannel.n_channels / 1e9) << '\n';
      md << "derived.pctw_net_rate_gbps = "
         << format_double(per_ch * cfg.superchannel.n_channels / 1e9) << '\n';
    }
    md << "convention.constellation = 16-QAM Gray, axis pairs 00:-3 01:-1 11:+1 10:+3, scaled 1/sqrt(10)\n";
    md << "convention.transform_normalization = unitary (1/sqrt(N) both directions)\n";
    md << "convention.pilot_placement = +-floor((2j+1)*occupied/(2*n_pilots)) around band center\n";
    md << "convention.training = known QPSK on all occupied bins, seed-derived\n";
    md << "convention.pctw_twin = per-subcarrier conjugate on y polarization\n";
    md << "convention.pctw_bits_per_subcarrier = halved (data carried once per twin pair)\n";
    md << "convention.launch_power = per channel; aggregate set to power + 10log10(n_channels) dBm\n";
    md << "convention.bandpass_rolloff = raised cosine over 5% of passband width outside each edge\n";
    md << "convention.selection_bandwidth = 1.1 x occupied band (full band when single channel)\n";
    md << "convention.ssfm_nonlinear_weight = h_eff = 2 sinh(alpha h/2)/alpha on midpoint field\n";
    md << "convention.manakov_factor = 8/9\n";
    md << "convention.ase = per pol variance (G-1)*n_sp*h*nu*fs, n_sp = 10^(NF/10)/2\n";
    md << "convention.complexity = 1 cmult = 4 rmults; FFT(N) = (N/2)log2(N) cmults; "
          "LDC = 2 FFT + N; DBP step = 2 FFT + 4N; MC-DBP at n_channels*N, divided by "
          "n_channels*occupied; PCTW adds N; rounded per block/step so DBP counts "
          "stay linear in spans and steps\n";
    md << "convention.q_from_ber = 20 log10(sqrt(2) erfcinv(2 ber))\n";
    md << "convention.confident_min_errors = 100\n";
    md << "run.records = " << out.records.size() << '\n';
    md << "run.failed_records = " << out.failures.size() << '\n';
    for (std::size_t i = 0; i < out.failures.size(); ++i)
      md << "run.failure." << i << " = " << out.failures[i] << '\n';
    write_file(dir / "metadata.txt", md.str());
  }
}

} // namespace cofdm
