#include "lpisim/impair.hpp"

#include <cmath>

#include "lpisim/rng.hpp"

namespace lpisim {
namespace {

void check_secret_shape(const SymbolGrid& grid, const LpiSecret& secret) {
  if (secret.n_subcarriers != grid.n_subcarriers || secret.n_symbols != grid.n_symbols)
    throw DimensionError("impair: secret shape does not match the grid");
}

SymbolGrid rotate_cells(const SymbolGrid& grid, const LpiSecret& secret, double sign) {
  check_secret_shape(grid, secret);
  SymbolGrid out = grid;
  if (secret.mode == ImpairmentMode::none) return out;
  for (std::size_t m = 0; m < grid.n_symbols; ++m)
    for (std::size_t k = 0; k < grid.n_subcarriers; ++k)
      out.at(k, m) *= std::polar(1.0, sign * secret.phase_at(k, m));
  return out;
}

TimeFrame ramp_blocks(const TimeFrame& tf, const LpiSecret& secret, const FrameConfig& cfg,
                      double sign) {
  cfg.validate();
  if (secret.n_symbols != tf.n_symbols || tf.block_length != cfg.block_length())
    throw DimensionError("impair: secret/frame shape mismatch");
  TimeFrame out = tf;
  if (secret.mode == ImpairmentMode::none) return out;
  const double ts = cfg.sample_interval_s();
  for (std::size_t m = 0; m < tf.n_symbols; ++m) {
    const double w = sign * kTwoPi * secret.doppler_hz[m] * ts;
    auto block = out.block(m);
    for (std::size_t n = 0; n < block.size(); ++n)
      block[n] *= std::polar(1.0, w * static_cast<double>(n));
  }
  return out;
}

}  // namespace

LpiSecret generate_secret(const FrameConfig& cfg, ImpairmentMode mode, std::uint64_t seed) {
  cfg.validate();
  LpiSecret secret;
  secret.mode = mode;
  secret.n_subcarriers = cfg.n_subcarriers;
  secret.n_symbols = cfg.n_symbols;
  secret.seed = seed;
  secret.phase.assign(cfg.n_subcarriers * cfg.n_symbols, 0.0);
  secret.doppler_hz.assign(cfg.n_symbols, 0.0);
  if (mode == ImpairmentMode::none) return secret;

  rng::Stream phase_rng(rng::derive(seed, rng::kSecretPhaseStream));
  if (mode == ImpairmentMode::subcarrier_wise) {
    for (std::size_t k = 0; k < cfg.n_subcarriers; ++k)
      for (std::size_t m = 0; m < cfg.n_symbols; ++m) secret.phase_at(k, m) = phase_rng.phase();
  } else {
    for (std::size_t m = 0; m < cfg.n_symbols; ++m) {
      const double phi = phase_rng.phase();
      for (std::size_t k = 0; k < cfg.n_subcarriers; ++k) secret.phase_at(k, m) = phi;
    }
  }

  rng::Stream doppler_rng(rng::derive(seed, rng::kSecretDopplerStream));
  const double half_df = 0.5 * cfg.subcarrier_spacing_hz();
  for (std::size_t m = 0; m < cfg.n_symbols; ++m)
    secret.doppler_hz[m] = doppler_rng.uniform(-half_df, half_df);
  return secret;
}

SymbolGrid apply_phase(const SymbolGrid& grid, const LpiSecret& secret) {
  return rotate_cells(grid, secret, +1.0);
}

SymbolGrid remove_phase(const SymbolGrid& grid, const LpiSecret& secret) {
  return rotate_cells(grid, secret, -1.0);
}

TimeFrame apply_doppler(const TimeFrame& tf, const LpiSecret& secret, const FrameConfig& cfg) {
  return ramp_blocks(tf, secret, cfg, +1.0);
}

TimeFrame remove_doppler(const TimeFrame& tf, const LpiSecret& secret, const FrameConfig& cfg) {
  return ramp_blocks(tf, secret, cfg, -1.0);
}

}  // namespace lpisim
