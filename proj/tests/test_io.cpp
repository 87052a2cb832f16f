#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "lpisim/io.hpp"
#include "oracles.hpp"

using lpisim::cd;
using lpisim::FrameConfig;
using lpisim::RangeDopplerMap;
using lpisim::TimeFrame;

namespace {

FrameConfig small_cfg() {
  FrameConfig cfg;
  cfg.n_subcarriers = 16;
  cfg.n_symbols = 4;
  cfg.cp_length = 4;
  cfg.bandwidth_hz = 1e8;
  cfg.carrier_freq_hz = 2.7e10;
  cfg.pilot_spacing_freq = 2;
  cfg.pilot_spacing_time = 2;
  return cfg;
}

RangeDopplerMap sample_map() {
  RangeDopplerMap map;
  map.n_range = 3;
  map.n_doppler = 4;
  map.stage = lpisim::MapStage::range_doppler;
  map.doppler_center_bin = 2;
  map.range_bin_m = 1.5;
  map.velocity_bin_mps = 0.25;
  map.values.resize(12);
  for (std::size_t i = 0; i < 12; ++i)
    map.values[i] = cd{0.1 * static_cast<double>(i + 1), -0.5 * static_cast<double>(i)};
  map.range_axis_m = {0.0, 1.5, 3.0};
  map.velocity_axis_mps = {-0.5, -0.25, 0.0, 0.25};
  return map;
}

}  // namespace

TEST_CASE("range-Doppler maps round-trip through the binary format bit-exactly") {
  const RangeDopplerMap map = sample_map();
  const std::string bytes = lpisim::map_to_binary(map);
  CHECK(bytes.size() == 6 + 4 + 4 + 8 + 8 + 12 * 16);
  CHECK(bytes.substr(0, 6) == "RDMAP1");

  const RangeDopplerMap back = lpisim::map_from_binary(bytes);
  CHECK(back.n_range == 3);
  CHECK(back.n_doppler == 4);
  CHECK(back.range_bin_m == 1.5);
  CHECK(back.velocity_bin_mps == 0.25);
  CHECK(testutil::max_abs_diff(back.values, map.values) == 0.0);
  CHECK(back.stage == lpisim::MapStage::range_doppler);
  CHECK(back.doppler_center_bin == 2);
  REQUIRE(back.velocity_axis_mps.size() == 4);
  CHECK(back.velocity_axis_mps[2] == 0.0);
  CHECK(back.range_axis_m[2] == 3.0);

  // Serializing the loaded map reproduces the same bytes.
  CHECK(lpisim::map_to_binary(back) == bytes);
}

TEST_CASE("corrupt map bytes are rejected with FormatError") {
  const std::string good = lpisim::map_to_binary(sample_map());
  CHECK_THROWS_AS(lpisim::map_from_binary("XXMAP1" + good.substr(6)), lpisim::FormatError);
  CHECK_THROWS_AS(lpisim::map_from_binary(good.substr(0, good.size() - 1)), lpisim::FormatError);
  CHECK_THROWS_AS(lpisim::map_from_binary(good + "z"), lpisim::FormatError);
  CHECK_THROWS_AS(lpisim::map_from_binary(""), lpisim::FormatError);

  // Zero dimensions are structurally valid but semantically empty.
  std::string zero = good;
  zero[6] = zero[7] = zero[8] = zero[9] = 0;
  CHECK_THROWS_AS(lpisim::map_from_binary(zero), lpisim::FormatError);
}

TEST_CASE("waveforms round-trip with their numerology") {
  const FrameConfig cfg = small_cfg();
  TimeFrame tf(cfg.n_symbols, cfg.block_length());
  for (std::size_t i = 0; i < tf.samples.size(); ++i)
    tf.samples[i] = cd{std::sin(0.1 * static_cast<double>(i)), 1.0 / (1.0 + static_cast<double>(i))};

  const std::string bytes = lpisim::waveform_to_binary(tf, cfg);
  CHECK(bytes.substr(0, 5) == "WAVE1");
  const lpisim::WaveformRecord rec = lpisim::waveform_from_binary(bytes);
  CHECK(rec.frame.n_symbols == cfg.n_symbols);
  CHECK(rec.frame.block_length == cfg.block_length());
  CHECK(rec.sample_interval_s == cfg.sample_interval_s());
  CHECK(rec.carrier_freq_hz == cfg.carrier_freq_hz);
  CHECK(testutil::max_abs_diff(rec.frame.samples, tf.samples) == 0.0);

  CHECK_THROWS_AS(lpisim::waveform_from_binary(bytes.substr(0, 10)), lpisim::FormatError);
}

TEST_CASE("CSV exports carry the axes and peak-normalized dB powers") {
  RangeDopplerMap map = sample_map();
  const std::string csv = lpisim::map_to_csv(map);
  CHECK(csv.substr(0, 12) == "velocity_mps");
  // 1 header + 3 data rows, all newline-terminated.
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 4);
  CHECK(csv.find("-0.25") != std::string::npos);
  // The strongest bin (the last cell here) reads exactly 0 dB.
  CHECK(csv.find(",0\n") != std::string::npos);

  const std::string cut = lpisim::velocity_cut_to_csv(map, 2);
  CHECK(cut.substr(0, 21) == "velocity_mps,power_db");
  std::size_t cut_lines = 0;
  for (char c : cut)
    if (c == '\n') ++cut_lines;
  CHECK(cut_lines == 5);  // header + one row per Doppler bin
  CHECK_THROWS_AS(lpisim::velocity_cut_to_csv(map, 3), lpisim::ProcessingError);
}

TEST_CASE("impairment mode names round-trip") {
  using lpisim::ImpairmentMode;
  CHECK(lpisim::impairment_mode_name(ImpairmentMode::none) == "none");
  CHECK(lpisim::impairment_mode_name(ImpairmentMode::symbol_wise) == "symbol_wise");
  CHECK(lpisim::impairment_mode_name(ImpairmentMode::subcarrier_wise) == "subcarrier_wise");
  for (ImpairmentMode m : {ImpairmentMode::none, ImpairmentMode::symbol_wise,
                           ImpairmentMode::subcarrier_wise})
    CHECK(lpisim::impairment_mode_from_name(lpisim::impairment_mode_name(m)) == m);
  CHECK_THROWS_AS(lpisim::impairment_mode_from_name("fancy"), lpisim::ConfigError);
}

TEST_CASE("secret records regenerate the full secret from seed and mode") {
  const FrameConfig cfg = small_cfg();
  const lpisim::LpiSecret secret =
      lpisim::generate_secret(cfg, lpisim::ImpairmentMode::subcarrier_wise, 987);
  const std::string text = lpisim::secret_to_json(secret, cfg);
  CHECK(text.find("\"subcarrier_wise\"") != std::string::npos);
  CHECK(text.find("987") != std::string::npos);
  // The expanded matrices never appear in the record.
  CHECK(text.size() < 512);

  const lpisim::LpiSecret back = lpisim::secret_from_json(text, cfg);
  CHECK(back.mode == secret.mode);
  CHECK(back.seed == secret.seed);
  CHECK(back.phase == secret.phase);
  CHECK(back.doppler_hz == secret.doppler_hz);

  FrameConfig other = cfg;
  other.n_subcarriers = 32;
  CHECK_THROWS_AS(lpisim::secret_from_json(text, other), lpisim::ConfigError);
  other = cfg;
  other.bandwidth_hz = 2e8;  // changes the subcarrier spacing
  CHECK_THROWS_AS(lpisim::secret_from_json(text, other), lpisim::ConfigError);

  CHECK_THROWS_AS(lpisim::secret_from_json("{not json", cfg), lpisim::FormatError);
  CHECK_THROWS_AS(lpisim::secret_from_json("{\"mode\": \"none\"}", cfg), lpisim::FormatError);
}

TEST_CASE("metrics records serialize to JSON and JSONL") {
  lpisim::MetricsReport report;
  report.image_sinr_db = 12.5;
  report.pslr_db = -13.25;
  report.islr_db = -4.75;
  report.peak = {5, 24};
  report.peak_range_m = 7.5;
  report.peak_velocity_mps = 8.0;

  const std::string pretty = lpisim::metrics_to_json(report, "fig3-legit", 1000);
  CHECK(pretty.find("\"fig3-legit\"") != std::string::npos);
  CHECK(pretty.find("12.5") != std::string::npos);
  CHECK(pretty.back() == '\n');

  const std::string line = lpisim::metrics_to_json_line(report, "fig3-legit", 1000);
  CHECK(line.back() == '\n');
  // Single record per line: no interior newline.
  CHECK(line.find('\n') == line.size() - 1);
  CHECK(line.find("\"islr_db\":-4.75") != std::string::npos);
}

TEST_CASE("file helpers round-trip bytes and fail loudly") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "lpisim_io_test";
  std::filesystem::create_directories(dir);
  const std::filesystem::path file = dir / "payload.bin";
  const std::string payload = std::string("abc\0def\xff", 8);
  lpisim::write_file(file, payload);
  CHECK(lpisim::read_file(file) == payload);

  const RangeDopplerMap map = sample_map();
  lpisim::write_map_binary(map, dir / "map.rdmap");
  const RangeDopplerMap back = lpisim::read_map_binary(dir / "map.rdmap");
  CHECK(testutil::max_abs_diff(back.values, map.values) == 0.0);

  CHECK_THROWS_AS(lpisim::read_file(dir / "missing.bin"), lpisim::FormatError);
  CHECK_THROWS_AS(lpisim::write_file(dir / "no" / "such" / "dir" / "f.bin", "x"),
                  lpisim::FormatError);
  std::filesystem::remove_all(dir);
}
