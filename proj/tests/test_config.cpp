#include "cofdm/config.hpp"

#include <doctest.h>

#include <cmath>

using namespace cofdm;

namespace {

const char* kMinimalConfig = R"(
# comment line
seed = 42
ofdm.fft_size = 512
ofdm.data_subcarriers = 412
ofdm.pilot_subcarriers = 4   # trailing comment
superchannel.n_channels = 2
schemes = ldc, sc-dbp
scheme.sc-dbp.steps_per_span = 3
sweep.power_grid_dbm = -1, 0, 1
sweep.distance_grid_spans = 5, 10
sweep.n_ofdm_symbols = 8
)";

} // namespace

TEST_SUITE("config") {

TEST_CASE("parse: minimal file with defaults") {
  const ExperimentConfig cfg = parse_config_text(kMinimalConfig);
  CHECK(cfg.seed == 42);
  CHECK(cfg.ofdm.fft_size == 512);
  CHECK(cfg.ofdm.data_subcarriers == 412);
  CHECK(cfg.ofdm.cp_fraction == 0.03);            // default
  CHECK(cfg.link.fiber.alpha_db_per_km == 0.2);   // default
  CHECK(!cfg.link.edfa_gain_db.has_value());      // auto
  CHECK(cfg.link.effective_gain_db() == doctest::Approx(16.0));
  CHECK(cfg.superchannel.n_channels == 2);
  REQUIRE(cfg.schemes.size() == 2);
  CHECK(scheme_name(cfg.schemes[0]) == "ldc");
  CHECK(std::get<ScDbp>(cfg.schemes[1]).steps_per_span == 3);
  CHECK(cfg.sweep.power_grid_dbm == std::vector<double>{-1, 0, 1});
  CHECK(cfg.link.n_spans == 10); // max of the distance grid
}

TEST_CASE("parse: unknown key is a hard error") {
  CHECK_THROWS_WITH_AS(parse_config_text("ofdm.fft_sizes = 512\n"),
                       doctest::Contains("unknown key"),
                       std::invalid_argument);
}

TEST_CASE("parse: informational prefixes are accepted and ignored") {
  std::string text = kMinimalConfig;
  text += "derived.anything = 1\nconvention.note = text with spaces\nrun.records = 5\n";
  const ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.seed == 42);
}

TEST_CASE("parse: duplicate keys and malformed lines rejected") {
  CHECK_THROWS(parse_config_text("seed = 1\nseed = 2\n"));
  CHECK_THROWS(parse_config_text("this is not a key value pair\n"));
  CHECK_THROWS(parse_config_text("seed = notanumber\n"));
}

TEST_CASE("parse: scheme parameters for schemes not listed are unknown keys") {
  std::string text = kMinimalConfig;
  text += "scheme.mc-dbp.steps_per_span = 16\n";
  CHECK_THROWS(parse_config_text(text));
}

TEST_CASE("validation: inconsistent grids and geometry rejected") {
  ExperimentConfig cfg = desk_preset();
  cfg.sweep.power_grid_dbm.clear();
  CHECK_THROWS(validate(cfg));

  cfg = desk_preset();
  cfg.sweep.n_ofdm_symbols = 2; // == training symbols
  CHECK_THROWS(validate(cfg));

  cfg = desk_preset();
  cfg.superchannel.spacing_hz = 10e9; // channels would overlap
  CHECK_THROWS(validate(cfg));
}

TEST_CASE("write/parse round trip preserves every field") {
  for (const ExperimentConfig& cfg : {desk_preset(), paper_preset()}) {
    const std::string text = write_config_text(cfg);
    const ExperimentConfig back = parse_config_text(text);
    CHECK(write_config_text(back) == text);
    CHECK(back.seed == cfg.seed);
    CHECK(back.ofdm.fft_size == cfg.ofdm.fft_size);
    CHECK(back.ofdm.cp_fraction == cfg.ofdm.cp_fraction);
    CHECK(back.link.edfa_nf_db == cfg.link.edfa_nf_db);
    CHECK(back.sweep.distance_grid_spans == cfg.sweep.distance_grid_spans);
    CHECK(back.schemes.size() == cfg.schemes.size());
  }
}

TEST_CASE("format_double: shortest exact representations") {
  CHECK(format_double(0.03) == "0.03");
  CHECK(format_double(2.7e-2) == "0.027");
  CHECK(format_double(37.5e9) == "3.75e+10");
  CHECK(format_double(0.1 + 0.2) != "0.3"); // must not lie about the bits
  for (double v : {1.0 / 3.0, 16e-6, 1.22, -20.44}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("measured channel defaults to an inner channel") {
  ExperimentConfig cfg = paper_preset();
  CHECK(measured_channel_index(cfg) == 1); // channel 2 of 4
  CHECK(channel_offset_hz(cfg.superchannel, 1) == doctest::Approx(-18.75e9));
  cfg.superchannel.n_channels = 1;
  CHECK(measured_channel_index(cfg) == 0);
  CHECK(channel_offset_hz(cfg.superchannel, 0) == 0.0);
}

TEST_CASE("aggregate rate covers the outermost selection band") {
  const ExperimentConfig paper = paper_preset();
  CHECK(aggregate_oversample_factor(paper) == 5); // 160 GS/s covers +-69 GHz + guard
  const ExperimentConfig desk = desk_preset();
  CHECK(aggregate_oversample_factor(desk) == 2);
  ExperimentConfig single = desk;
  single.superchannel.n_channels = 1;
  CHECK(aggregate_oversample_factor(single) == 1);

  // Nyquist must clear the outer channel's selection filter edge
  for (const ExperimentConfig& cfg : {paper, desk}) {
    const double outer = (cfg.superchannel.n_channels - 1) / 2.0 *
                         cfg.superchannel.spacing_hz;
    const double sel_edge = 0.55 * 1.1 * cfg.ofdm.occupied_bandwidth_hz();
    CHECK(aggregate_sample_rate_hz(cfg) / 2.0 > outer + sel_edge);
  }
}

TEST_CASE("presets validate") {
  CHECK_NOTHROW(validate(desk_preset()));
  CHECK_NOTHROW(validate(paper_preset()));
  // paper-preset geometry pins the published setup
  const ExperimentConfig paper = paper_preset();
  CHECK(paper.ofdm.fft_size == 4096);
  CHECK(paper.ofdm.data_subcarriers == 3300);
  CHECK(paper.superchannel.n_channels == 4);
  CHECK(paper.link.fiber.length_km == 80.0);
  CHECK(paper.link.edfa_nf_db == 4.0);
  CHECK(std::find(paper.sweep.distance_grid_spans.begin(),
                  paper.sweep.distance_grid_spans.end(),
                  25) != paper.sweep.distance_grid_spans.end());
}

} // TEST_SUITE
