#include "rcscme/stft.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace rcscme {

FrameConfig FrameConfig::at_rate(int sample_rate_hz) {
  FrameConfig cfg;
  cfg.sample_rate_hz = sample_rate_hz;
  cfg.window_length = static_cast<Index>(sample_rate_hz) * 64 / 1000;
  cfg.hop = cfg.window_length / 2;
  return cfg;
}

void FrameConfig::validate() const {
  if (window_length <= 0 || hop <= 0)
    throw ConfigError("FrameConfig: window length and hop must be positive");
  if (hop * 2 != window_length)
    throw ConfigError("FrameConfig: hop must be half the window length");
  if (sample_rate_hz <= 0) throw ConfigError("FrameConfig: bad sample rate");
}

Vec hamming_window(Index n) {
  Vec w(n);
  for (Index k = 0; k < n; ++k)
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / n);
  return w;
}

Spectrogram Spectrogram::select_channel(Index m) const {
  Spectrogram out;
  out.cfg = cfg;
  out.num_samples = num_samples;
  out.bins.reserve(bins.size());
  for (const CMat& b : bins) out.bins.push_back(b.row(m));
  return out;
}

Spectrogram analyze(const Signal& signal, const FrameConfig& cfg) {
  cfg.validate();
  const Index channels = signal.rows();
  const Index length = signal.cols();
  if (channels < 1 || length == 0) throw ConfigError("analyze: empty signal");
  if (length < cfg.window_length)
    throw ConfigError("analyze: signal shorter than one window");

  const Index n = cfg.window_length;
  const Index bands = cfg.bands();
  // Frames start at multiples of hop; final partial frame zero-padded.
  const Index num_frames = (length - n + cfg.hop - 1) / cfg.hop + 1;
  const Vec window = hamming_window(n);

  Spectrogram spec;
  spec.cfg = cfg;
  spec.num_samples = length;
  spec.bins.assign(bands, CMat::Zero(channels, num_frames));

  Eigen::FFT<double> fft;
  std::vector<Complex> frame(n), freq(n);
  for (Index m = 0; m < channels; ++m) {
    for (Index j = 0; j < num_frames; ++j) {
      const Index start = j * cfg.hop;
      for (Index k = 0; k < n; ++k) {
        const Index t = start + k;
        frame[k] = Complex(t < length ? window[k] * signal(m, t) : 0.0, 0.0);
      }
      fft.fwd(freq, frame);
      for (Index i = 0; i < bands; ++i) spec.bins[i](m, j) = freq[i];
    }
  }
  return spec;
}

Signal synthesize(const Spectrogram& spec) {
  const FrameConfig& cfg = spec.cfg;
  cfg.validate();
  const Index bands = spec.bands();
  if (bands != cfg.bands())
    throw ConfigError("synthesize: band count inconsistent with frame config");
  const Index channels = spec.channels();
  const Index num_frames = spec.frames();
  for (const CMat& b : spec.bins)
    if (b.rows() != channels || b.cols() != num_frames)
      throw ConfigError("synthesize: ragged spectrogram");

  const Index n = cfg.window_length;
  const Index padded = (num_frames - 1) * cfg.hop + n;
  const Index length = spec.num_samples > 0 ? spec.num_samples : padded;
  const Vec window = hamming_window(n);

  Signal out = Signal::Zero(channels, padded);
  Vec norm = Vec::Zero(padded);
  for (Index j = 0; j < num_frames; ++j)
    norm.segment(j * cfg.hop, n) += window.cwiseProduct(window);

  Eigen::FFT<double> fft;
  std::vector<Complex> freq(n), frame(n);
  for (Index m = 0; m < channels; ++m) {
    for (Index j = 0; j < num_frames; ++j) {
      for (Index i = 0; i < bands; ++i) freq[i] = spec.bins[i](m, j);
      for (Index i = bands; i < n; ++i) freq[i] = std::conj(freq[n - i]);
      fft.inv(frame, freq);
      const Index start = j * cfg.hop;
      for (Index k = 0; k < n; ++k)
        out(m, start + k) += window[k] * frame[k].real();
    }
  }
  for (Index t = 0; t < padded; ++t)
    if (norm[t] > 1e-12) out.col(t) /= norm[t];
  return out.leftCols(length);
}

}  // namespace rcscme
