#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lpisim/channel.hpp"
#include "lpisim/frame.hpp"
#include "lpisim/impair.hpp"
#include "lpisim/rx_eve.hpp"
#include "lpisim/rx_legit.hpp"
#include "oracles.hpp"

using lpisim::cd;
using lpisim::FrameConfig;
using lpisim::ImpairmentMode;
using lpisim::LpiSecret;
using lpisim::PilotGrid;
using lpisim::PilotLattice;
using lpisim::RangeDopplerMap;
using lpisim::SceneConfig;
using lpisim::SymbolGrid;
using lpisim::TimeFrame;
using lpisim::WindowKind;
using lpisim::WindowSpec;

namespace {

FrameConfig cfg64() {
  FrameConfig cfg;
  cfg.n_subcarriers = 64;
  cfg.n_symbols = 32;
  cfg.cp_length = 16;
  cfg.bandwidth_hz = 1e8;
  cfg.carrier_freq_hz = 2.7e10;
  cfg.pilot_spacing_freq = 2;
  cfg.pilot_spacing_time = 2;
  return cfg;
}

WindowSpec rect_window() {
  WindowSpec w;
  w.kind = WindowKind::rectangular;
  return w;
}

struct Argmax {
  std::size_t r = 0, d = 0;
  double power = 0.0;
};

Argmax argmax(const RangeDopplerMap& map) {
  Argmax best;
  for (std::size_t r = 0; r < map.n_range; ++r)
    for (std::size_t d = 0; d < map.n_doppler; ++d)
      if (map.power(r, d) > best.power) best = {r, d, map.power(r, d)};
  return best;
}

double median_power(const RangeDopplerMap& map) {
  std::vector<double> p;
  p.reserve(map.values.size());
  for (const cd& v : map.values) p.push_back(std::norm(v));
  std::sort(p.begin(), p.end());
  return p[p.size() / 2];
}

TimeFrame transmit(const SymbolGrid& tx, const LpiSecret& secret, const FrameConfig& cfg) {
  TimeFrame tf = lpisim::modulate(lpisim::apply_phase(tx, secret), cfg);
  return lpisim::apply_doppler(tf, secret, cfg);
}

}  // namespace

TEST_CASE("pilot grid extraction picks the lattice cells in order") {
  FrameConfig cfg = cfg64();
  const PilotLattice lat = lpisim::build_pilot_lattice(cfg);
  SymbolGrid grid(cfg.n_subcarriers, cfg.n_symbols, lpisim::GridRole::received);
  for (std::size_t m = 0; m < cfg.n_symbols; ++m)
    for (std::size_t k = 0; k < cfg.n_subcarriers; ++k)
      grid.at(k, m) = cd{static_cast<double>(k), static_cast<double>(m)};

  const PilotGrid pg = lpisim::extract_pilot_grid(grid, lat);
  CHECK(pg.n_pilot_subcarriers == 32);
  CHECK(pg.n_pilot_symbols == 16);
  for (std::size_t j = 0; j < pg.n_pilot_symbols; ++j)
    for (std::size_t i = 0; i < pg.n_pilot_subcarriers; ++i)
      CHECK(pg.at(i, j) == cd{static_cast<double>(2 * i), static_cast<double>(2 * j)});

  PilotLattice empty;
  CHECK_THROWS_AS(lpisim::extract_pilot_grid(grid, empty), lpisim::DimensionError);
  SymbolGrid small(8, 4, lpisim::GridRole::received);
  CHECK_THROWS_AS(lpisim::extract_pilot_grid(small, lat), lpisim::DimensionError);
}

TEST_CASE("clean static scene: the blind map pins the target on the pilot axes") {
  FrameConfig cfg = cfg64();
  const PilotLattice lat = lpisim::build_pilot_lattice(cfg);
  const SymbolGrid tx = lpisim::generate_frame(cfg, lat, 3);
  const LpiSecret none = lpisim::generate_secret(cfg, ImpairmentMode::none, 0);

  SceneConfig scene;
  scene.targets.push_back({std::polar(1.0, 0.4), 6.0 * cfg.sample_interval_s(), 0.0});
  const TimeFrame rx = lpisim::propagate(transmit(tx, none, cfg), scene, cfg);

  const RangeDopplerMap map =
      lpisim::blind_pipeline(rx, tx, lat, cfg, rect_window(), rect_window());
  CHECK(map.pilot_grid);
  CHECK(map.n_range == 32);
  CHECK(map.n_doppler == 16);
  CHECK(map.doppler_center_bin == 8);
  const auto peak = argmax(map);
  CHECK(peak.r == 6);
  CHECK(peak.d == 8);
  // Pilot decimation keeps the physical bin sizes of the full grid.
  CHECK(map.range_bin_m ==
        doctest::Approx(lpisim::kSpeedOfLight / (2.0 * cfg.bandwidth_hz)).epsilon(1e-12));
  // On-grid static target, noise-free: everything else is roundoff.
  double floor = 0.0;
  for (std::size_t r = 0; r < map.n_range; ++r)
    for (std::size_t d = 0; d < map.n_doppler; ++d)
      if (r != 6 || d != 8) floor = std::max(floor, map.power(r, d));
  CHECK(floor / peak.power < 1e-20);

  // Determinism: a second run is bit-identical.
  const RangeDopplerMap again =
      lpisim::blind_pipeline(rx, tx, lat, cfg, rect_window(), rect_window());
  CHECK(testutil::max_abs_diff(again.values, map.values) == 0.0);
}

TEST_CASE("delays beyond the pilot span alias modulo the reduced grid") {
  FrameConfig cfg = cfg64();
  cfg.cp_length = 48;  // long prefix so a 35-sample delay stays circular
  const PilotLattice lat = lpisim::build_pilot_lattice(cfg);
  const SymbolGrid tx = lpisim::generate_frame(cfg, lat, 3);
  const LpiSecret none = lpisim::generate_secret(cfg, ImpairmentMode::none, 0);

  SceneConfig scene;
  scene.targets.push_back({cd{1.0, 0.0}, 35.0 * cfg.sample_interval_s(), 0.0});
  const TimeFrame rx = lpisim::propagate(transmit(tx, none, cfg), scene, cfg);
  const RangeDopplerMap map =
      lpisim::blind_pipeline(rx, tx, lat, cfg, rect_window(), rect_window());
  const auto peak = argmax(map);
  // Every-other-subcarrier sampling halves the unambiguous delay span:
  // 35 samples folds to bin 35 mod 32 = 3.
  CHECK(peak.r == 3);
  CHECK(peak.d == map.doppler_center_bin);
}

TEST_CASE("Doppler beyond the pilot span folds modulo the reduced grid") {
  FrameConfig cfg = cfg64();
  const PilotLattice lat = lpisim::build_pilot_lattice(cfg);
  const SymbolGrid tx = lpisim::generate_frame(cfg, lat, 3);
  const LpiSecret none = lpisim::generate_secret(cfg, ImpairmentMode::none, 0);

  const double full_bin = 1.0 / (static_cast<double>(cfg.n_symbols) * cfg.symbol_duration_s());
  SceneConfig scene;
  scene.targets.push_back({cd{1.0, 0.0}, 6.0 * cfg.sample_interval_s(), 9.0 * full_bin});
  const TimeFrame rx = lpisim::propagate(transmit(tx, none, cfg), scene, cfg);
  const RangeDopplerMap map =
      lpisim::blind_pipeline(rx, tx, lat, cfg, rect_window(), rect_window());
  const auto peak = argmax(map);
  CHECK(peak.r == 6);
  // Every-other-symbol sampling keeps the bin size but halves the span:
  // +9 bins folds to 9 - 16 = -7, i.e. one bin right of the left edge.
  CHECK(peak.d == 1);
  CHECK(map.velocity_axis_mps[peak.d] == doctest::Approx(-7.0 * map.velocity_bin_mps));
}

TEST_CASE("track_los_phase reads the bin-0 phase and flags weak direct paths") {
  RangeDopplerMap prof;
  prof.n_range = 32;
  prof.n_doppler = 8;
  prof.values.assign(prof.n_range * prof.n_doppler, cd{0.01, 0.0});
  const std::vector<double> phases = {0.1, -2.0, 3.0, 1.4, -0.6, 2.2, -3.0, 0.0};
  for (std::size_t m = 0; m < prof.n_doppler; ++m) prof.at(0, m) = std::polar(5.0, phases[m]);

  const lpisim::LosPhaseTrack track = lpisim::track_los_phase(prof);
  REQUIRE(track.phase_rad.size() == 8);
  CHECK_FALSE(track.weak_los);
  CHECK(track.weak_symbols == 0);
  for (std::size_t m = 0; m < 8; ++m)
    CHECK(testutil::wrapped_phase_diff(track.phase_rad[m], phases[m]) < 1e-12);

  // Drop one symbol's direct path below 10x the column median magnitude.
  prof.at(0, 3) = std::polar(0.05, 1.0);
  const lpisim::LosPhaseTrack weak = lpisim::track_los_phase(prof);
  CHECK(weak.weak_los);
  CHECK(weak.weak_symbols == 1);

  prof.stage = lpisim::MapStage::range_doppler;
  CHECK_THROWS_AS(lpisim::track_los_phase(prof), lpisim::ProcessingError);
}

TEST_CASE("smart refocusing beats blind against symbol-wise hiding, not subcarrier-wise") {
  FrameConfig cfg = cfg64();
  const PilotLattice lat = lpisim::build_pilot_lattice(cfg);
  const SymbolGrid tx = lpisim::generate_frame(cfg, lat, 3);

  const double full_bin = 1.0 / (static_cast<double>(cfg.n_symbols) * cfg.symbol_duration_s());
  SceneConfig scene;
  scene.los_gain = cd{10.0, 0.0};
  scene.targets.push_back({std::polar(1.0, 0.5), 6.0 * cfg.sample_interval_s(), 2.0 * full_bin});

  const LpiSecret sym = lpisim::generate_secret(cfg, ImpairmentMode::symbol_wise, 77);
  const TimeFrame rx_sym = lpisim::propagate(transmit(tx, sym, cfg), scene, cfg);

  const RangeDopplerMap blind =
      lpisim::blind_pipeline(rx_sym, tx, lat, cfg, rect_window(), rect_window());
  const RangeDopplerMap smart =
      lpisim::smart_pipeline(rx_sym, tx, lat, cfg, rect_window(), rect_window());

  // Refocusing re-concentrates the direct-path ridge at (range 0, velocity 0):
  // far above what the blind map keeps in that bin, and above anything the
  // smeared blind map has anywhere.
  const auto smart_peak = argmax(smart);
  CHECK(smart_peak.r == 0);
  CHECK(smart_peak.d == smart.doppler_center_bin);
  CHECK(smart_peak.power > 50.0 * blind.power(0, blind.doppler_center_bin));
  CHECK(smart_peak.power > 2.0 * argmax(blind).power);

  // The hidden target reappears at its true bins, well above the floor...
  const std::size_t tr = 6;
  const std::size_t td = smart.doppler_center_bin + 2;
  CHECK(smart.power(tr, td) > 3.0 * blind.power(tr, td));
  CHECK(smart.power(tr, td) > 20.0 * median_power(smart));

  // ...but the same trick cannot undo per-subcarrier phases.  Compare how
  // much of the target row's energy each map gathers into the true Doppler
  // bin: a one-bin power would ride the fading tails, the fraction does not.
  const LpiSecret sub = lpisim::generate_secret(cfg, ImpairmentMode::subcarrier_wise, 77);
  const TimeFrame rx_sub = lpisim::propagate(transmit(tx, sub, cfg), scene, cfg);
  const RangeDopplerMap smart_sub =
      lpisim::smart_pipeline(rx_sub, tx, lat, cfg, rect_window(), rect_window());
  const auto row_fraction = [tr, td](const RangeDopplerMap& map) {
    double total = 0.0;
    for (std::size_t j = 0; j < map.n_doppler; ++j) total += map.power(tr, j);
    return map.power(tr, td) / total;
  };
  CHECK(row_fraction(smart) > 0.4);
  CHECK(row_fraction(smart_sub) < 0.25);
  CHECK(smart_sub.power(tr, td) < smart.power(tr, td) / 2.0);
}

TEST_CASE("nearest-pilot equalization scores a clean channel at zero errors") {
  FrameConfig cfg;
  cfg.n_subcarriers = 4;
  cfg.n_symbols = 1;
  cfg.cp_length = 0;
  cfg.bandwidth_hz = 1e8;
  cfg.carrier_freq_hz = 2.7e10;
  cfg.pilot_spacing_freq = 2;
  cfg.pilot_spacing_time = 1;
  const PilotLattice lat = lpisim::build_pilot_lattice(cfg);

  const cd s = lpisim::qpsk_point(0);
  SymbolGrid tx(4, 1, lpisim::GridRole::transmit);
  for (cd& v : tx.cells) v = s;
  // Channel 1 on subcarriers 0..1, channel j on 2..3.  Data cell k=1 ties
  // between pilots k=0 and k=2; the lower pilot (channel 1) is the right one.
  SymbolGrid rx = tx;
  rx.at(2, 0) *= cd{0.0, 1.0};
  rx.at(3, 0) *= cd{0.0, 1.0};
  CHECK(lpisim::eve_demap_and_ser(rx, tx, lat) == 0.0);

  SymbolGrid wrong(8, 1, lpisim::GridRole::received);
  CHECK_THROWS_AS(lpisim::eve_demap_and_ser(wrong, tx, lat), lpisim::DimensionError);
}

TEST_CASE("impairment drives the passive receiver's symbol error rate") {
  FrameConfig cfg = cfg64();
  cfg.n_symbols = 256;  // 12288 data cells: tight statistical bands
  const PilotLattice lat = lpisim::build_pilot_lattice(cfg);
  const SymbolGrid tx = lpisim::generate_frame(cfg, lat, 3);

  // No impairment, identity channel: error-free.
  CHECK(lpisim::eve_demap_and_ser(tx, tx, lat) == 0.0);

  // Per-cell phases: data cell and nearest pilot rotate independently, so
  // 3/4 of the decisions leave their quadrant.
  const LpiSecret sub = lpisim::generate_secret(cfg, ImpairmentMode::subcarrier_wise, 19);
  const double ser_sub = lpisim::eve_demap_and_ser(lpisim::apply_phase(tx, sub), tx, lat);
  CHECK(ser_sub > 0.72);
  CHECK(ser_sub < 0.78);

  // Per-symbol phases: cells in pilot symbol columns share their pilot's
  // rotation (no errors); the other half of the data cells see an
  // independent rotation (3/4 errors) -> about 1/2 overall.
  const LpiSecret sym = lpisim::generate_secret(cfg, ImpairmentMode::symbol_wise, 19);
  const double ser_sym = lpisim::eve_demap_and_ser(lpisim::apply_phase(tx, sym), tx, lat);
  CHECK(ser_sym > 0.46);
  CHECK(ser_sym < 0.54);
}
