#ifndef RCSCME_CONFIG_HPP
#define RCSCME_CONFIG_HPP

#include <map>
#include <string>

#include "rcscme/em.hpp"
#include "rcscme/ilrma.hpp"
#include "rcscme/mixture.hpp"
#include "rcscme/stft.hpp"

namespace rcscme {

// Plain key-value config file with [section] headers, '#' comments.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct PipelineConfig {
  FrameConfig stft = FrameConfig::at_rate(16000);
  IlrmaConfig ilrma;
  PriorConfig prior = PriorConfig::defaults(Variant::proposed);
  unsigned seed = 0;

  // Sections [stft], [ilrma], [rcscme]; missing keys keep the defaults
  // above (64/32 ms frames, 10 bases, 50 preprocessing iterations, 200 EM
  // iterations, variant-specific alpha, beta = 1e-16).
  static PipelineConfig from_config(const KeyValueConfig& kv);
};

// Section [scene].
SceneConfig scene_from_config(const KeyValueConfig& kv);

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

}  // namespace rcscme

#endif  // RCSCME_CONFIG_HPP
