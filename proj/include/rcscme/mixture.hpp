#ifndef RCSCME_MIXTURE_HPP
#define RCSCME_MIXTURE_HPP

#include <vector>

#include "rcscme/types.hpp"

namespace rcscme {

// Circular-array scene with one directional target and diffuse noise
// reproduced from many surrounding directions.
struct SceneConfig {
  int channels = 3;
  int n_noise_directions = 19;
  double target_direction_deg = 0.0;
  double snr_db = 0.0;
  unsigned seed = 0;
  double duration_s = 1.2;
  int sample_rate_hz = 8000;
  double array_radius_m = 0.05;
  int ir_taps = 64;            // impulse response length, delay + random tail
  double noise_tail_gain = 0.45;
  double target_tail_gain = 0.15;
  // Per-direction noise level spread (uniform in dB): diffuse fields such as
  // street or cafe noise are anisotropic, not equal-power from everywhere.
  double noise_anisotropy_db = 8.0;

  void validate() const;
};

struct Mixture {
  Signal observed;      // channels x length
  Signal target_image;  // channels x length
  Signal noise_image;   // channels x length
};

// Renders each direction through a synthetic M-channel impulse response
// (fractional delay plus a decaying random tail) and scales the summed
// noise image so that power(target)/power(noise) matches snr_db.
// Noise sources are reused cyclically when fewer than n_noise_directions
// are supplied.
Mixture make_mixture(const SceneConfig& cfg, const Vec& target,
                     const std::vector<Vec>& noises);

// Convenience: mixture with internally generated sources (amplitude-modulated
// Laplacian target, Gaussian/Laplacian noises), deterministic from cfg.seed.
Mixture make_default_mixture(const SceneConfig& cfg);

}  // namespace rcscme

#endif  // RCSCME_MIXTURE_HPP
