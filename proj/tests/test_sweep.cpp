#include "cofdm/sweep.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cofdm;

namespace {

// fast 2-channel experiment with measurable noise
ExperimentConfig micro_cfg() {
  ExperimentConfig cfg;
  cfg.seed = 31;
  cfg.noise_enabled = true;
  cfg.ofdm.fft_size = 256;
  cfg.ofdm.data_subcarriers = 200;
  cfg.ofdm.pilot_subcarriers = 4;
  cfg.ofdm.training_symbols = 2;
  cfg.ofdm.sample_rate_hz = 32e9;
  cfg.link.edfa_nf_db = 18.0;
  cfg.link.forward_steps_per_span = 4;
  cfg.superchannel.n_channels = 2;
  cfg.schemes = {Ldc{}, ScDbpPctw{1, 0.0}};
  cfg.sweep.power_grid_dbm = {2.0, 6.0};
  cfg.sweep.distance_grid_spans = {2, 4};
  cfg.sweep.n_ofdm_symbols = 6;
  cfg.sweep.n_seeds = 2;
  cfg.link.n_spans = 4;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_SUITE("sweep") {

TEST_CASE("record count is always |schemes| x |powers| x |distances|") {
  ExperimentConfig cfg = micro_cfg();
  const SweepOutput out = run_sweep(cfg, 2);
  CHECK(out.records.size() == 2 * 2 * 2);

  ExperimentConfig single = cfg;
  single.schemes = {Ldc{}};
  single.sweep.power_grid_dbm = {2.0};
  single.sweep.distance_grid_spans = {2};
  single.sweep.n_seeds = 1;
  single.link.n_spans = 2;
  const SweepOutput one = run_sweep(single, 1);
  CHECK(one.records.size() == 1);
}

TEST_CASE("identical config and seed give byte-identical CSV") {
  const ExperimentConfig cfg = micro_cfg();
  const std::string a = results_csv_text(run_sweep(cfg, 1));
  const std::string b = results_csv_text(run_sweep(cfg, 1));
  CHECK(a == b);
}

TEST_CASE("worker count does not change the CSV bytes") {
  const ExperimentConfig cfg = micro_cfg();
  const std::string w1 = results_csv_text(run_sweep(cfg, 1));
  const std::string w3 = results_csv_text(run_sweep(cfg, 3));
  const std::string w8 = results_csv_text(run_sweep(cfg, 8));
  CHECK(w1 == w3);
  CHECK(w1 == w8);
}

TEST_CASE("a grid point's record does not depend on the rest of the grid") {
  ExperimentConfig cfg = micro_cfg();
  const SweepOutput full = run_sweep(cfg, 2);

  ExperimentConfig point = cfg;
  point.schemes = {Ldc{}};
  point.sweep.power_grid_dbm = {6.0};
  point.sweep.distance_grid_spans = {2};
  point.link.n_spans = 2;
  const SweepOutput single = run_sweep(point, 1);
  REQUIRE(single.records.size() == 1);

  const SweepRecord* match = nullptr;
  for (const auto& r : full.records)
    if (r.scheme == "ldc" && r.launch_power_dbm == 6.0 && r.distance_km == 160.0)
      match = &r;
  REQUIRE(match != nullptr);
  CHECK(match->ber == single.records[0].ber);
  CHECK(match->q_db == single.records[0].q_db);
}

TEST_CASE("records keep ber and q_db consistent under the Q-BER relation") {
  const ExperimentConfig cfg = micro_cfg();
  const SweepOutput out = run_sweep(cfg, 2);
  int checked = 0;
  for (const auto& r : out.records) {
    if (r.failed || !std::isfinite(r.q_db)) continue;
    CHECK(ber_from_q(r.q_db) == doctest::Approx(r.ber).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("four-channel superchannel at paper geometry runs end to end") {
  ExperimentConfig cfg = micro_cfg();
  cfg.superchannel.n_channels = 4;
  cfg.superchannel.spacing_hz = 37.5e9;
  cfg.schemes = {Ldc{}, ScDbpPctw{1, 0.0}};
  cfg.sweep.power_grid_dbm = {2.0};
  cfg.sweep.distance_grid_spans = {2};
  cfg.sweep.n_seeds = 1;
  cfg.link.n_spans = 2;
  CHECK(aggregate_oversample_factor(cfg) == 5);
  const SweepOutput out = run_sweep(cfg, 1);
  REQUIRE(out.records.size() == 2);
  for (const auto& r : out.records) {
    CHECK(!r.failed);
    CHECK(std::isfinite(r.ber));
  }
}

TEST_CASE("different seeds change the result") {
  ExperimentConfig cfg = micro_cfg();
  cfg.sweep.n_seeds = 1;
  const std::string a = results_csv_text(run_sweep(cfg, 2));
  cfg.seed += 1;
  const std::string b = results_csv_text(run_sweep(cfg, 2));
  CHECK(a != b);
}

TEST_CASE("a failing scheme marks its records failed and the run continues") {
  ExperimentConfig cfg = micro_cfg();
  // selection band wider than the sampled spectrum -> bandpass error
  cfg.schemes = {Ldc{}, ScDbp{1, 1e12}};
  const SweepOutput out = run_sweep(cfg, 2);
  CHECK(out.records.size() == 8);
  int failed = 0, ok = 0;
  for (const auto& r : out.records) {
    if (r.failed) {
      ++failed;
      CHECK(r.scheme == "sc-dbp");
      CHECK(std::isnan(r.ber));
    } else {
      ++ok;
    }
  }
  CHECK(failed == 4);
  CHECK(ok == 4);
  CHECK(out.failures.size() == 4);
}

TEST_CASE("emit_results writes the pinned CSV dialect and metadata round-trips") {
  const ExperimentConfig cfg = micro_cfg();
  const SweepOutput out = run_sweep(cfg, 2);
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "cofdm_sweep_test";
  std::filesystem::remove_all(dir);
  emit_results(out, cfg, dir.string());

  const std::string csv = slurp(dir / "results.csv");
  CHECK(csv.rfind("scheme,power_dbm,distance_km,ber,q_db,real_mults_per_subcarrier,"
                  "seed,confident\n", 0) == 0);
  // header + one line per record
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + out.records.size());
  // BER in 6-significant-digit scientific notation
  CHECK(csv.find("e-") != std::string::npos);

  for (const char* name : {"q_vs_power.csv", "reach_curve.csv",
                           "reach_estimates.csv", "complexity_vs_spans.csv",
                           "metadata.txt"})
    CHECK(std::filesystem::exists(dir / name));

  // metadata reloads as a config and reproduces the identical sweep
  const ExperimentConfig again = parse_config_text(slurp(dir / "metadata.txt"));
  CHECK(results_csv_text(run_sweep(again, 2)) == results_csv_text(out));

  std::filesystem::remove_all(dir);
}

TEST_CASE("emit_results rejects an unwritable path") {
  const ExperimentConfig cfg = micro_cfg();
  SweepOutput out;
  out.records.push_back(SweepRecord{});
  CHECK_THROWS(emit_results(out, cfg, "/proc/definitely/not/writable"));
  CHECK_THROWS(emit_results(SweepOutput{}, cfg, "/tmp")); // empty table
}

} // TEST_SUITE
