#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "lpisim/channel.hpp"
#include "lpisim/frame.hpp"
#include "lpisim/impair.hpp"
#include "lpisim/metrics.hpp"
#include "lpisim/rx_legit.hpp"

namespace lpisim {

// All binary encodings are explicit little-endian, independent of the host,
// and every serializer below is a pure value -> bytes function so golden
// outputs can be compared in memory as well as on disk.

/// "RDMAP1" | u32 n_range | u32 n_doppler | f64 range_bin_m |
/// f64 velocity_bin_mps | n_range*n_doppler row-major (f64 re, f64 im).
std::string map_to_binary(const RangeDopplerMap& map);
RangeDopplerMap map_from_binary(std::string_view bytes);

/// dB power map (0 dB = peak) as CSV: header row carries the velocity axis,
/// the leading column the range axis.
std::string map_to_csv(const RangeDopplerMap& map);

/// Velocity cut through one range row, two columns: velocity_mps, power_db
/// (normalized to the map's global peak).
std::string velocity_cut_to_csv(const RangeDopplerMap& map, std::size_t range_bin);

/// "WAVE1" | u32 n_symbols | u32 block_length | f64 sample_interval_s |
/// f64 carrier_freq_hz | serialized samples (f64 re, f64 im).
std::string waveform_to_binary(const TimeFrame& tf, const FrameConfig& cfg);

struct WaveformRecord {
  TimeFrame frame;
  double sample_interval_s = 0.0;
  double carrier_freq_hz = 0.0;
};
WaveformRecord waveform_from_binary(std::string_view bytes);

/// The secret never leaves the transmitter in expanded form: the record
/// stores {mode, seed, N, M, subcarrier spacing} and the loader regenerates
/// the matrices, refusing a record whose numerology differs from the
/// caller's frame.
std::string secret_to_json(const LpiSecret& secret, const FrameConfig& cfg);
LpiSecret secret_from_json(std::string_view text, const FrameConfig& expected_cfg);

std::string metrics_to_json(const MetricsReport& report, const std::string& scenario_name,
                            std::uint64_t secret_seed);

/// Same record on a single line (for JSONL trial logs).
std::string metrics_to_json_line(const MetricsReport& report, const std::string& scenario_name,
                                 std::uint64_t secret_seed);

std::string_view impairment_mode_name(ImpairmentMode mode);
ImpairmentMode impairment_mode_from_name(std::string_view name);

/// Whole-file helpers; creation/IO failures throw FormatError.
void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

void write_map_binary(const RangeDopplerMap& map, const std::filesystem::path& path);
RangeDopplerMap read_map_binary(const std::filesystem::path& path);

}  // namespace lpisim
