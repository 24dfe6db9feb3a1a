#include "rcscme/mixture.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace rcscme {

namespace {

constexpr double kSpeedOfSound = 343.0;

Vec convolve(const Vec& x, const Vec& h, Index out_length) {
  Vec y = Vec::Zero(out_length);
  for (Index n = 0; n < out_length; ++n) {
    const Index kmax = std::min<Index>(h.size() - 1, n);
    double acc = 0.0;
    for (Index k = 0; k <= kmax; ++k) acc += h[k] * x[n - k];
    y[n] = acc;
  }
  return y;
}

// Fractional-delay direct path (windowed sinc) plus a decaying random tail.
Mat direction_impulse_responses(const SceneConfig& cfg, double direction_deg,
                                double tail_gain, std::mt19937& rng) {
  const int M = cfg.channels;
  const int taps = cfg.ir_taps;
  const double theta = direction_deg * std::numbers::pi / 180.0;
  std::normal_distribution<double> gauss(0.0, 1.0);

  Mat h = Mat::Zero(M, taps);
  const double max_delay = cfg.array_radius_m / kSpeedOfSound *
                           cfg.sample_rate_hz;
  for (int m = 0; m < M; ++m) {
    const double phi = 2.0 * std::numbers::pi * m / M;
    // Far-field relative delay across the circular array, kept positive.
    const double delay =
        max_delay * (1.0 - std::cos(theta - phi)) + 4.0;
    for (int k = 0; k < taps; ++k) {
      const double t = k - delay;
      const double sinc =
          t == 0.0 ? 1.0
                   : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
      // 8-tap raised-cosine support around the delay.
      const double win =
          std::abs(t) < 4.0 ? 0.5 * (1.0 + std::cos(std::numbers::pi * t / 4.0))
                            : 0.0;
      h(m, k) = sinc * win;
    }
    for (int k = static_cast<int>(std::ceil(delay)) + 4; k < taps; ++k)
      h(m, k) += tail_gain * std::exp(-4.0 * k / taps) * gauss(rng);
  }
  return h;
}

Signal render(const Vec& source, const Mat& irs, Index length) {
  Signal image(irs.rows(), length);
  for (Index m = 0; m < irs.rows(); ++m)
    image.row(m) = convolve(source, irs.row(m).transpose(), length).transpose();
  return image;
}

}  // namespace

void SceneConfig::validate() const {
  if (channels < 2) throw ConfigError("SceneConfig: need at least 2 channels");
  if (n_noise_directions < channels)
    throw ConfigError(
        "SceneConfig: need at least as many noise directions as channels");
  if (!(duration_s > 0.0) || sample_rate_hz <= 0 || ir_taps < 16)
    throw ConfigError("SceneConfig: bad duration, rate, or impulse length");
}

Mixture make_mixture(const SceneConfig& cfg, const Vec& target,
                     const std::vector<Vec>& noises) {
  cfg.validate();
  if (target.size() == 0) throw ConfigError("make_mixture: empty target");
  if (noises.empty()) throw ConfigError("make_mixture: no noise sources");
  if (!(target.squaredNorm() > 0.0))
    throw ConfigError("make_mixture: zero-power target");

  const Index length =
      static_cast<Index>(cfg.duration_s * cfg.sample_rate_hz);
  std::mt19937 rng(cfg.seed);

  const Mat target_irs = direction_impulse_responses(
      cfg, cfg.target_direction_deg, cfg.target_tail_gain, rng);
  Mixture mix;
  mix.target_image = render(target, target_irs, length);

  mix.noise_image = Signal::Zero(cfg.channels, length);
  std::uniform_real_distribution<double> spread(-1.0, 1.0);
  for (int d = 0; d < cfg.n_noise_directions; ++d) {
    // Surrounding grid, offset so no noise direction coincides with the target.
    const double offset = (d + 0.5) * 360.0 / cfg.n_noise_directions;
    const double dir = cfg.target_direction_deg + offset;
    const Mat irs =
        direction_impulse_responses(cfg, dir, cfg.noise_tail_gain, rng);
    const Vec& src = noises[d % noises.size()];
    if (!(src.squaredNorm() > 0.0))
      throw ConfigError("make_mixture: zero-power noise source");
    // Anisotropic field: per-direction levels spread uniformly in dB, as in
    // real diffuse noise (street, cafe) where energy is unevenly distributed.
    const double level_db = cfg.noise_anisotropy_db * spread(rng);
    mix.noise_image += std::pow(10.0, level_db / 20.0) * render(src, irs, length);
  }

  const double p_target = mix.target_image.squaredNorm();
  const double p_noise = mix.noise_image.squaredNorm();
  if (!(p_target > 0.0) || !(p_noise > 0.0))
    throw ConfigError("make_mixture: degenerate rendered image");
  const double gain =
      std::sqrt(p_target / p_noise * std::pow(10.0, -cfg.snr_db / 10.0));
  mix.noise_image *= gain;
  mix.observed = mix.target_image + mix.noise_image;
  return mix;
}

Mixture make_default_mixture(const SceneConfig& cfg) {
  cfg.validate();
  const Index length =
      static_cast<Index>(cfg.duration_s * cfg.sample_rate_hz);
  std::mt19937 rng(cfg.seed ^ 0x9e3779b9u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> sign(-1.0, 1.0);

  // Speech-like target: glottal pulse train with drifting pitch, shaped by
  // two time-varying resonators (formants), gated by a syllable-rate
  // envelope with pauses. Gives the heavy-tailed, harmonic per-bin spectrum
  // of voiced speech rather than a near-Gaussian one.
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vec target(length);
  const double fs = cfg.sample_rate_hz;
  double f0 = 120.0, phase = 0.0, envelope = 1.0;
  double f1 = 500.0, f2 = 1500.0;
  double y1a = 0.0, y1b = 0.0, y2a = 0.0, y2b = 0.0;
  for (Index t = 0; t < length; ++t) {
    if (t % (cfg.sample_rate_hz / 20) == 0) {
      envelope = u01(rng) < 0.4 ? 0.02 : 0.3 + expo(rng);
      f0 = 90.0 + 80.0 * u01(rng);
      f1 = 300.0 + 600.0 * u01(rng);
      f2 = 1000.0 + 1800.0 * u01(rng);
    }
    phase += f0 / fs;
    double excitation = 0.1 * (sign(rng) < 0 ? -1.0 : 1.0) * expo(rng);
    if (phase >= 1.0) {
      phase -= 1.0;
      excitation += 1.0;
    }
    // Two cascaded two-pole resonators.
    const double r = 0.96;
    const double y1 = excitation + 2.0 * r * std::cos(2.0 * std::numbers::pi * f1 / fs) * y1a -
                      r * r * y1b;
    y1b = y1a; y1a = y1;
    const double y2 = y1 + 2.0 * r * std::cos(2.0 * std::numbers::pi * f2 / fs) * y2a -
                      r * r * y2b;
    y2b = y2a; y2a = y2;
    target[t] = envelope * y2;
  }

  // Stationary Gaussian (even directions) and Laplacian (odd) noise sources.
  std::vector<Vec> noises(cfg.n_noise_directions);
  for (int d = 0; d < cfg.n_noise_directions; ++d) {
    Vec src(length);
    if (d % 2 == 0) {
      for (Index t = 0; t < length; ++t) src[t] = gauss(rng);
    } else {
      for (Index t = 0; t < length; ++t)
        src[t] = (sign(rng) < 0 ? -1.0 : 1.0) * expo(rng);
    }
    noises[d] = src;
  }
  return make_mixture(cfg, target, noises);
}

}  // namespace rcscme
