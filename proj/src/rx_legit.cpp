#include "lpisim/rx_legit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lpisim/fft.hpp"

namespace lpisim {

std::vector<double> RangeDopplerMap::power_db() const {
  double peak = kPowerFloor;
  for (const cd& v : values) peak = std::max(peak, std::norm(v));
  std::vector<double> db(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    db[i] = 10.0 * std::log10(std::max(std::norm(values[i]), kPowerFloor) / peak);
  return db;
}

SymbolGrid estimate_channel(const SymbolGrid& rx_grid, const SymbolGrid& tx_grid) {
  if (rx_grid.n_subcarriers != tx_grid.n_subcarriers || rx_grid.n_symbols != tx_grid.n_symbols)
    throw DimensionError("estimate_channel: rx/tx grid shapes differ");
  SymbolGrid out(rx_grid.n_subcarriers, rx_grid.n_symbols, GridRole::channel_estimate);
  for (std::size_t m = 0; m < rx_grid.n_symbols; ++m) {
    for (std::size_t k = 0; k < rx_grid.n_subcarriers; ++k) {
      const cd ref = tx_grid.at(k, m);
      if (std::abs(ref) < 1e-6)
        throw ProcessingError("estimate_channel: reference cell (" + std::to_string(k) + ", " +
                              std::to_string(m) + ") is close to zero");
      out.at(k, m) = rx_grid.at(k, m) / ref;
    }
  }
  return out;
}

RangeDopplerMap range_transform(const SymbolGrid& d_grid, const WindowSpec& window,
                                const FrameConfig& cfg, const AxisConvention& axes,
                                std::size_t freq_decimation) {
  cfg.validate();
  window.validate();
  if (freq_decimation == 0) throw ConfigError("range_transform: decimation must be >= 1");
  const std::size_t nr = d_grid.n_subcarriers;
  const std::size_t nd = d_grid.n_symbols;
  const std::vector<double>& w = window.coefficients(nr);

  RangeDopplerMap map;
  map.n_range = nr;
  map.n_doppler = nd;
  map.values.resize(nr * nd);
  map.stage = MapStage::range_profile;
  map.window_kind = window.kind;
  map.window_sidelobe_db = window.sidelobe_db;
  map.range_mainlobe_halfwidth_bins = window.mainlobe_halfwidth_bins(nr);
  map.doppler_mainlobe_halfwidth_bins = 1;

  // Rows sampled every freq_decimation subcarriers span 1/(dec*df) of
  // unambiguous delay, so the delay bin is 1/(nr*dec*df).
  const double delay_bin_s =
      1.0 / (static_cast<double>(nr) * static_cast<double>(freq_decimation) * cfg.subcarrier_spacing_hz());
  map.range_bin_m = kSpeedOfLight * delay_bin_s * axes.range_scale();
  map.range_axis_m.resize(nr);
  for (std::size_t r = 0; r < nr; ++r) map.range_axis_m[r] = static_cast<double>(r) * map.range_bin_m;
  // Second axis is still slow time; keep the symbol index there for now.
  map.velocity_axis_mps.resize(nd);
  for (std::size_t d = 0; d < nd; ++d) map.velocity_axis_mps[d] = static_cast<double>(d);

  std::vector<cd> in(nr), out(nr);
  for (std::size_t m = 0; m < nd; ++m) {
    for (std::size_t k = 0; k < nr; ++k) in[k] = d_grid.at(k, m) * w[k];
    fft::unitary_inverse(in, out);
    for (std::size_t r = 0; r < nr; ++r) map.at(r, m) = out[r];
  }
  return map;
}

RangeDopplerMap residual_correction(const RangeDopplerMap& profile, const LpiSecret& secret,
                                    const FrameConfig& cfg) {
  cfg.validate();
  if (profile.stage != MapStage::range_profile)
    throw ProcessingError("residual_correction: must run before the Doppler transform");
  if (profile.n_range != secret.n_subcarriers || profile.n_doppler != secret.n_symbols)
    throw DimensionError("residual_correction: profile shape does not match the secret");

  RangeDopplerMap out = profile;
  if (secret.mode == ImpairmentMode::none) return out;
  const double ts = cfg.sample_interval_s();
  for (std::size_t m = 0; m < out.n_doppler; ++m) {
    const double w = kTwoPi * secret.doppler_hz[m] * ts;
    for (std::size_t r = 0; r < out.n_range; ++r)
      out.at(r, m) *= std::polar(1.0, w * static_cast<double>(r));
  }
  return out;
}

RangeDopplerMap doppler_transform(const RangeDopplerMap& profile, const WindowSpec& window,
                                  const FrameConfig& cfg, const AxisConvention& axes,
                                  std::size_t time_decimation) {
  cfg.validate();
  window.validate();
  if (time_decimation == 0) throw ConfigError("doppler_transform: decimation must be >= 1");
  if (profile.stage != MapStage::range_profile)
    throw ProcessingError("doppler_transform: input has already been transformed");
  const std::size_t nd = profile.n_doppler;
  const std::vector<double>& w = window.coefficients(nd);

  RangeDopplerMap out = profile;
  out.stage = MapStage::range_doppler;
  out.window_kind = window.kind;  // window of the most recent transform
  out.window_sidelobe_db = window.sidelobe_db;
  out.doppler_mainlobe_halfwidth_bins = window.mainlobe_halfwidth_bins(nd);
  const std::size_t center = nd / 2;
  out.doppler_center_bin = center;

  // Columns sampled every time_decimation symbols: Doppler bin
  // 1/(nd*dec*T_sym), mapped to velocity via the carrier.
  const double doppler_bin_hz =
      1.0 / (static_cast<double>(nd) * static_cast<double>(time_decimation) * cfg.symbol_duration_s());
  out.velocity_bin_mps =
      kSpeedOfLight * doppler_bin_hz / cfg.carrier_freq_hz * axes.velocity_scale();
  for (std::size_t j = 0; j < nd; ++j)
    out.velocity_axis_mps[j] =
        (static_cast<double>(j) - static_cast<double>(center)) * out.velocity_bin_mps;

  std::vector<cd> in(nd), spec(nd);
  for (std::size_t r = 0; r < profile.n_range; ++r) {
    for (std::size_t m = 0; m < nd; ++m) in[m] = profile.at(r, m) * w[m];
    fft::unitary_forward(in, spec);
    for (std::size_t j = 0; j < nd; ++j) out.at(r, j) = spec[(j + nd - center) % nd];
  }
  return out;
}

RangeDopplerMap legit_pipeline(const TimeFrame& rx, const SymbolGrid& tx_grid,
                               const LpiSecret& secret, const FrameConfig& cfg,
                               const WindowSpec& range_window, const WindowSpec& doppler_window,
                               const LegitOptions& options) {
  const TimeFrame compensated = remove_doppler(rx, secret, cfg);
  const SymbolGrid received = demodulate(compensated, cfg);
  const SymbolGrid derotated = remove_phase(received, secret);
  const SymbolGrid estimate = estimate_channel(derotated, tx_grid);
  RangeDopplerMap profile = range_transform(estimate, range_window, cfg, options.axes);
  if (options.residual_correction) profile = residual_correction(profile, secret, cfg);
  return doppler_transform(profile, doppler_window, cfg, options.axes);
}

SymbolGrid equalize_with_pilots(const SymbolGrid& rx_grid, const SymbolGrid& tx_grid,
                                const PilotLattice& lattice, const FrameConfig& cfg) {
  cfg.validate();
  if (rx_grid.n_subcarriers != tx_grid.n_subcarriers || rx_grid.n_symbols != tx_grid.n_symbols)
    throw DimensionError("equalize_with_pilots: rx/tx grid shapes differ");
  if (rx_grid.n_subcarriers != cfg.n_subcarriers || rx_grid.n_symbols != cfg.n_symbols)
    throw DimensionError("equalize_with_pilots: grid shape does not match the frame config");

  const std::size_t n = cfg.n_subcarriers;
  const std::size_t npil = lattice.n_pilot_subcarriers;
  const auto& ksub = lattice.pilot_subcarrier_indices;

  // One full-grid channel estimate per pilot symbol.
  std::vector<std::vector<cd>> full_estimates;
  full_estimates.reserve(lattice.n_pilot_symbols);
  std::vector<cd> pilot_samples(npil), taps(npil);
  for (std::size_t mp : lattice.pilot_symbol_indices) {
    for (std::size_t i = 0; i < npil; ++i) {
      const cd ref = tx_grid.at(ksub[i], mp);
      if (std::abs(ref) < 1e-6)
        throw ProcessingError("equalize_with_pilots: degenerate pilot reference");
      pilot_samples[i] = rx_grid.at(ksub[i], mp) / ref;
    }
    // Pilot rows sample the channel response every spacing subcarriers;
    // the IDFT gives its delay taps, re-evaluated on all N subcarriers.
    fft::transform(pilot_samples, taps, true);
    std::vector<cd> padded(n, cd{});
    for (std::size_t i = 0; i < npil; ++i) padded[i] = taps[i] / static_cast<double>(npil);
    std::vector<cd> full(n);
    fft::transform(padded, full, false);
    full_estimates.push_back(std::move(full));
  }

  SymbolGrid out(rx_grid.n_subcarriers, rx_grid.n_symbols, GridRole::received);
  const auto& msym = lattice.pilot_symbol_indices;
  for (std::size_t m = 0; m < rx_grid.n_symbols; ++m) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < msym.size(); ++j) {
      const auto dist = [&](std::size_t mp) {
        return mp > m ? mp - m : m - mp;
      };
      if (dist(msym[j]) < dist(msym[best])) best = j;  // strict: ties keep the earlier
    }
    const std::vector<cd>& est = full_estimates[best];
    for (std::size_t k = 0; k < n; ++k) {
      // A vanishing estimate means a deep channel null; leave the cell
      // unequalized rather than dividing by ~0.
      out.at(k, m) = std::abs(est[k]) < 1e-12 ? rx_grid.at(k, m) : rx_grid.at(k, m) / est[k];
    }
  }
  return out;
}

double demap_and_ser(const SymbolGrid& rx_equalized, const SymbolGrid& tx_grid,
                     const PilotLattice& lattice) {
  if (rx_equalized.n_subcarriers != tx_grid.n_subcarriers ||
      rx_equalized.n_symbols != tx_grid.n_symbols)
    throw DimensionError("demap_and_ser: rx/tx grid shapes differ");
  std::size_t data_cells = 0;
  std::size_t errors = 0;
  for (std::size_t m = 0; m < tx_grid.n_symbols; ++m) {
    for (std::size_t k = 0; k < tx_grid.n_subcarriers; ++k) {
      if (lattice.is_pilot_cell(k, m)) continue;
      ++data_cells;
      if (qpsk_decide(rx_equalized.at(k, m)) != qpsk_decide(tx_grid.at(k, m))) ++errors;
    }
  }
  return data_cells == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(data_cells);
}

}  // namespace lpisim
