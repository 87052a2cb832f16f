#include "lpisim/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace lpisim {
namespace {

constexpr std::string_view kMapMagic = "RDMAP1";
constexpr std::string_view kWaveMagic = "WAVE1";

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

struct ByteReader {
  std::string_view data;
  std::size_t pos = 0;

  void expect_magic(std::string_view magic, std::string_view what) {
    if (data.size() - pos < magic.size() || data.substr(pos, magic.size()) != magic)
      throw FormatError(std::string(what) + ": bad magic");
    pos += magic.size();
  }
  std::uint32_t get_u32(std::string_view what) {
    if (data.size() - pos < 4) throw FormatError(std::string(what) + ": truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  double get_f64(std::string_view what) {
    if (data.size() - pos < 8) throw FormatError(std::string(what) + ": truncated");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    pos += 8;
    return std::bit_cast<double>(bits);
  }
  void expect_end(std::string_view what) {
    if (pos != data.size()) throw FormatError(std::string(what) + ": trailing bytes");
  }
};

// %.17g round-trips any finite double and is identical on every platform.
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string map_to_binary(const RangeDopplerMap& map) {
  std::string out;
  out.reserve(kMapMagic.size() + 8 + 16 + map.values.size() * 16);
  out.append(kMapMagic);
  put_u32(out, static_cast<std::uint32_t>(map.n_range));
  put_u32(out, static_cast<std::uint32_t>(map.n_doppler));
  put_f64(out, map.range_bin_m);
  put_f64(out, map.velocity_bin_mps);
  for (const cd& v : map.values) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  return out;
}

RangeDopplerMap map_from_binary(std::string_view bytes) {
  ByteReader reader{bytes};
  reader.expect_magic(kMapMagic, "map");
  RangeDopplerMap map;
  map.n_range = reader.get_u32("map");
  map.n_doppler = reader.get_u32("map");
  map.range_bin_m = reader.get_f64("map");
  map.velocity_bin_mps = reader.get_f64("map");
  if (map.n_range == 0 || map.n_doppler == 0) throw FormatError("map: empty dimensions");

  map.values.resize(map.n_range * map.n_doppler);
  for (cd& v : map.values) {
    const double re = reader.get_f64("map");
    const double im = reader.get_f64("map");
    v = {re, im};
  }
  reader.expect_end("map");

  // The binary format carries no window metadata; loaded maps default to
  // 1-bin mainlobes, overridable through MaskSpec when analyzing.
  map.stage = MapStage::range_doppler;
  map.doppler_center_bin = map.n_doppler / 2;
  map.range_axis_m.resize(map.n_range);
  for (std::size_t r = 0; r < map.n_range; ++r)
    map.range_axis_m[r] = static_cast<double>(r) * map.range_bin_m;
  map.velocity_axis_mps.resize(map.n_doppler);
  for (std::size_t j = 0; j < map.n_doppler; ++j)
    map.velocity_axis_mps[j] =
        (static_cast<double>(j) - static_cast<double>(map.doppler_center_bin)) * map.velocity_bin_mps;
  return map;
}

std::string map_to_csv(const RangeDopplerMap& map) {
  const std::vector<double> db = map.power_db();
  std::string out = "velocity_mps";
  for (double v : map.velocity_axis_mps) {
    out.push_back(',');
    out += fmt_double(v);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < map.n_range; ++r) {
    out += fmt_double(map.range_axis_m[r]);
    for (std::size_t d = 0; d < map.n_doppler; ++d) {
      out.push_back(',');
      out += fmt_double(db[r * map.n_doppler + d]);
    }
    out.push_back('\n');
  }
  return out;
}

std::string velocity_cut_to_csv(const RangeDopplerMap& map, std::size_t range_bin) {
  if (range_bin >= map.n_range) throw ProcessingError("velocity cut: range bin outside the map");
  const std::vector<double> db = map.power_db();
  std::string out = "velocity_mps,power_db\n";
  for (std::size_t d = 0; d < map.n_doppler; ++d) {
    out += fmt_double(map.velocity_axis_mps[d]);
    out.push_back(',');
    out += fmt_double(db[range_bin * map.n_doppler + d]);
    out.push_back('\n');
  }
  return out;
}

std::string waveform_to_binary(const TimeFrame& tf, const FrameConfig& cfg) {
  std::string out;
  out.reserve(kWaveMagic.size() + 8 + 16 + tf.samples.size() * 16);
  out.append(kWaveMagic);
  put_u32(out, static_cast<std::uint32_t>(tf.n_symbols));
  put_u32(out, static_cast<std::uint32_t>(tf.block_length));
  put_f64(out, cfg.sample_interval_s());
  put_f64(out, cfg.carrier_freq_hz);
  for (const cd& s : tf.samples) {
    put_f64(out, s.real());
    put_f64(out, s.imag());
  }
  return out;
}

WaveformRecord waveform_from_binary(std::string_view bytes) {
  ByteReader reader{bytes};
  reader.expect_magic(kWaveMagic, "waveform");
  WaveformRecord rec;
  const std::uint32_t n_symbols = reader.get_u32("waveform");
  const std::uint32_t block_length = reader.get_u32("waveform");
  rec.sample_interval_s = reader.get_f64("waveform");
  rec.carrier_freq_hz = reader.get_f64("waveform");
  if (n_symbols == 0 || block_length == 0) throw FormatError("waveform: empty dimensions");

  rec.frame = TimeFrame(n_symbols, block_length);
  for (cd& s : rec.frame.samples) {
    const double re = reader.get_f64("waveform");
    const double im = reader.get_f64("waveform");
    s = {re, im};
  }
  reader.expect_end("waveform");
  return rec;
}

std::string_view impairment_mode_name(ImpairmentMode mode) {
  switch (mode) {
    case ImpairmentMode::none: return "none";
    case ImpairmentMode::symbol_wise: return "symbol_wise";
    case ImpairmentMode::subcarrier_wise: return "subcarrier_wise";
  }
  throw ConfigError("unknown impairment mode value");
}

ImpairmentMode impairment_mode_from_name(std::string_view name) {
  if (name == "none") return ImpairmentMode::none;
  if (name == "symbol_wise") return ImpairmentMode::symbol_wise;
  if (name == "subcarrier_wise") return ImpairmentMode::subcarrier_wise;
  throw ConfigError("unknown impairment mode \"" + std::string(name) + "\"");
}

std::string secret_to_json(const LpiSecret& secret, const FrameConfig& cfg) {
  nlohmann::json j;
  j["mode"] = impairment_mode_name(secret.mode);
  j["seed"] = secret.seed;
  j["n_subcarriers"] = cfg.n_subcarriers;
  j["n_symbols"] = cfg.n_symbols;
  j["subcarrier_spacing_hz"] = cfg.subcarrier_spacing_hz();
  return j.dump(2) + "\n";
}

LpiSecret secret_from_json(std::string_view text, const FrameConfig& expected_cfg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("secret record: ") + e.what());
  }
  for (const char* key : {"mode", "seed", "n_subcarriers", "n_symbols", "subcarrier_spacing_hz"})
    if (!j.contains(key)) throw FormatError(std::string("secret record: missing \"") + key + "\"");

  if (j["n_subcarriers"].get<std::size_t>() != expected_cfg.n_subcarriers ||
      j["n_symbols"].get<std::size_t>() != expected_cfg.n_symbols)
    throw ConfigError("secret record: grid shape does not match the frame config");
  const double df = j["subcarrier_spacing_hz"].get<double>();
  const double expected_df = expected_cfg.subcarrier_spacing_hz();
  if (std::abs(df - expected_df) > 1e-9 * expected_df)
    throw ConfigError("secret record: subcarrier spacing does not match the frame config");

  return generate_secret(expected_cfg, impairment_mode_from_name(j["mode"].get<std::string>()),
                         j["seed"].get<std::uint64_t>());
}

namespace {

nlohmann::json metrics_record(const MetricsReport& report, const std::string& scenario_name,
                              std::uint64_t secret_seed) {
  nlohmann::json j;
  j["scenario"] = scenario_name;
  j["seed"] = secret_seed;
  j["image_sinr_db"] = report.image_sinr_db;
  j["pslr_db"] = report.pslr_db;
  j["islr_db"] = report.islr_db;
  j["peak"] = {{"range_bin", report.peak.range_bin},
               {"doppler_bin", report.peak.doppler_bin},
               {"range_m", report.peak_range_m},
               {"velocity_mps", report.peak_velocity_mps}};
  j["mask"] = {{"zero_velocity_halfwidth_mps", report.mask.zero_velocity_halfwidth_mps},
               {"mainlobe_halfwidth_bins", report.mask.mainlobe_halfwidth_bins},
               {"peak_exclusion_halfwidth_bins", report.mask.peak_exclusion_halfwidth_bins}};
  return j;
}

}  // namespace

std::string metrics_to_json(const MetricsReport& report, const std::string& scenario_name,
                            std::uint64_t secret_seed) {
  return metrics_record(report, scenario_name, secret_seed).dump(2) + "\n";
}

std::string metrics_to_json_line(const MetricsReport& report, const std::string& scenario_name,
                                 std::uint64_t secret_seed) {
  return metrics_record(report, scenario_name, secret_seed).dump() + "\n";
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw FormatError("failed reading " + path.string());
  return bytes;
}

void write_map_binary(const RangeDopplerMap& map, const std::filesystem::path& path) {
  write_file(path, map_to_binary(map));
}

RangeDopplerMap read_map_binary(const std::filesystem::path& path) {
  return map_from_binary(read_file(path));
}

}  // namespace lpisim
