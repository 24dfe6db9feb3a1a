#include "rcscme/config.hpp"

#include <fstream>
#include <sstream>

namespace rcscme {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    cfg.sections_[section][trim(line.substr(0, eq))] =
        trim(line.substr(eq + 1));
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& section,
                         const std::string& key) const {
  const auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::string KeyValueConfig::get(const std::string& section,
                                const std::string& key,
                                const std::string& fallback) const {
  const auto it = sections_.find(section);
  if (it == sections_.end()) return fallback;
  const auto kv = it->second.find(key);
  return kv == it->second.end() ? fallback : kv->second;
}

int KeyValueConfig::get_int(const std::string& section, const std::string& key,
                            int fallback) const {
  if (!has(section, key)) return fallback;
  try {
    return std::stoi(get(section, key, ""));
  } catch (const std::exception&) {
    throw ConfigError("config key [" + section + "] " + key +
                      ": not an integer");
  }
}

double KeyValueConfig::get_double(const std::string& section,
                                  const std::string& key,
                                  double fallback) const {
  if (!has(section, key)) return fallback;
  try {
    return std::stod(get(section, key, ""));
  } catch (const std::exception&) {
    throw ConfigError("config key [" + section + "] " + key +
                      ": not a number");
  }
}

Variant parse_variant(const std::string& name) {
  if (name == "conventional") return Variant::conventional;
  if (name == "proposed") return Variant::proposed;
  throw ConfigError("unknown variant: " + name +
                    " (expected conventional or proposed)");
}

std::string variant_name(Variant v) {
  return v == Variant::conventional ? "conventional" : "proposed";
}

PipelineConfig PipelineConfig::from_config(const KeyValueConfig& kv) {
  PipelineConfig cfg;
  const int rate = kv.get_int("stft", "sample_rate_hz", 16000);
  const int window_ms = kv.get_int("stft", "window_ms", 64);
  const int hop_ms = kv.get_int("stft", "hop_ms", window_ms / 2);
  cfg.stft.sample_rate_hz = rate;
  cfg.stft.window_length = static_cast<Index>(rate) * window_ms / 1000;
  cfg.stft.hop = static_cast<Index>(rate) * hop_ms / 1000;
  cfg.stft.validate();

  cfg.ilrma.n_bases = kv.get_int("ilrma", "n_bases", 10);
  cfg.ilrma.n_iterations = kv.get_int("ilrma", "n_iterations", 50);

  const Variant variant =
      parse_variant(kv.get("rcscme", "variant", "proposed"));
  cfg.prior = PriorConfig::defaults(variant);
  cfg.prior.alpha = kv.get_double("rcscme", "alpha", cfg.prior.alpha);
  cfg.prior.beta = kv.get_double("rcscme", "beta", cfg.prior.beta);
  cfg.prior.n_iterations =
      kv.get_int("rcscme", "n_iterations", cfg.prior.n_iterations);
  cfg.prior.validate();

  cfg.seed = static_cast<unsigned>(kv.get_int("", "seed", 0));
  cfg.ilrma.seed = cfg.seed;
  return cfg;
}

SceneConfig scene_from_config(const KeyValueConfig& kv) {
  SceneConfig scene;
  scene.channels = kv.get_int("scene", "channels", scene.channels);
  scene.n_noise_directions =
      kv.get_int("scene", "n_noise_directions", scene.n_noise_directions);
  scene.target_direction_deg = kv.get_double("scene", "target_direction_deg",
                                             scene.target_direction_deg);
  scene.snr_db = kv.get_double("scene", "snr_db", scene.snr_db);
  scene.seed = static_cast<unsigned>(kv.get_int("scene", "seed", 0));
  scene.duration_s = kv.get_double("scene", "duration_s", scene.duration_s);
  scene.sample_rate_hz =
      kv.get_int("scene", "sample_rate_hz", scene.sample_rate_hz);
  scene.array_radius_m =
      kv.get_double("scene", "array_radius_m", scene.array_radius_m);
  scene.ir_taps = kv.get_int("scene", "ir_taps", scene.ir_taps);
  scene.noise_tail_gain =
      kv.get_double("scene", "noise_tail_gain", scene.noise_tail_gain);
  scene.target_tail_gain =
      kv.get_double("scene", "target_tail_gain", scene.target_tail_gain);
  scene.noise_anisotropy_db =
      kv.get_double("scene", "noise_anisotropy_db", scene.noise_anisotropy_db);
  scene.validate();
  return scene;
}

}  // namespace rcscme
