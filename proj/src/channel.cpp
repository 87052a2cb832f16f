#include "lpisim/channel.hpp"

#include <cmath>
#include <string>

#include "lpisim/rng.hpp"

namespace lpisim {

std::size_t Target::delay_samples(double sample_interval_s) const {
  return static_cast<std::size_t>(std::llround(delay_s / sample_interval_s));
}

void SceneConfig::validate() const {
  for (const Target& t : targets)
    if (t.delay_s < 0.0) throw ConfigError("scene: target delays must be non-negative");
}

TimeFrame propagate(const TimeFrame& tf, const SceneConfig& scene, const FrameConfig& cfg) {
  cfg.validate();
  scene.validate();
  if (tf.n_symbols != cfg.n_symbols || tf.block_length != cfg.block_length())
    throw DimensionError("propagate: time frame shape does not match the frame config");

  // The direct path is just a path with zero delay and zero Doppler.
  std::vector<Target> paths;
  if (scene.los_gain != cd{0.0, 0.0}) paths.push_back({scene.los_gain, 0.0, 0.0});
  paths.insert(paths.end(), scene.targets.begin(), scene.targets.end());

  const double ts = cfg.sample_interval_s();
  const std::size_t total = tf.samples.size();
  TimeFrame out(tf.n_symbols, tf.block_length);
  for (const Target& path : paths) {
    const std::size_t np = path.delay_samples(ts);
    if (np >= cfg.block_length())
      throw ProcessingError("propagate: path delay of " + std::to_string(np) +
                            " samples reaches into the next symbol (block length " +
                            std::to_string(cfg.block_length()) + ")");
    const double w = kTwoPi * path.doppler_hz * ts;
    for (std::size_t i = np; i < total; ++i)
      out.samples[i] += path.gain * tf.samples[i - np] * std::polar(1.0, w * static_cast<double>(i));
  }
  return add_awgn(out, scene.snr_db, scene.noise_seed);
}

TimeFrame add_awgn(const TimeFrame& tf, std::optional<double> snr_db, std::uint64_t noise_seed) {
  TimeFrame out = tf;
  if (!snr_db.has_value()) return out;

  double power = 0.0;
  for (const cd& s : tf.samples) power += std::norm(s);
  if (tf.samples.empty() || power <= 0.0)
    throw ProcessingError("add_awgn: SNR is undefined for an all-zero signal");
  power /= static_cast<double>(tf.samples.size());

  const double sigma2 = power / std::pow(10.0, *snr_db / 10.0);
  const double scale = std::sqrt(0.5 * sigma2);
  rng::Stream noise(rng::derive(noise_seed, rng::kNoiseStream));
  for (cd& s : out.samples) {
    const auto [a, b] = noise.normal_pair();
    s += cd{scale * a, scale * b};
  }
  return out;
}

}  // namespace lpisim
