#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lpisim/frame.hpp"
#include "lpisim/types.hpp"

namespace lpisim {

/// One point scatterer (or the direct path, as a zero-delay special case).
struct Target {
  cd gain{0.0, 0.0};       // complex amplitude
  double delay_s = 0.0;    // two-way propagation delay
  double doppler_hz = 0.0; // physical Doppler shift

  std::size_t delay_samples(double sample_interval_s) const;
};

/// Static multipath scene plus the receiver noise setting.
struct SceneConfig {
  std::vector<Target> targets;
  cd los_gain{0.0, 0.0};         // direct path; 0 disables it
  std::optional<double> snr_db;  // std::nullopt = noise-free
  std::uint64_t noise_seed = 0;

  void validate() const;
};

/// Apply the multipath channel to the serialized sample stream and then the
/// configured AWGN.  Each path delays the whole stream (a delayed symbol's
/// head carries the previous symbol's tail; samples before the stream start
/// are zero) and modulates it by exp(+j 2 pi f_D i T_s) with i the *global*
/// sample index — physical Doppler accrues across the frame, unlike the
/// per-symbol artificial ramps.  Per-path delays must stay below one block.
TimeFrame propagate(const TimeFrame& tf, const SceneConfig& scene, const FrameConfig& cfg);

/// Add complex white Gaussian noise at the given SNR relative to the mean
/// sample power of the input.  std::nullopt returns the input unchanged.
TimeFrame add_awgn(const TimeFrame& tf, std::optional<double> snr_db, std::uint64_t noise_seed);

}  // namespace lpisim
