#ifndef RCSCME_STFT_HPP
#define RCSCME_STFT_HPP

#include "rcscme/types.hpp"

namespace rcscme {

enum class WindowKind { hamming };

struct FrameConfig {
  Index window_length = 1024;
  Index hop = 512;
  WindowKind window_kind = WindowKind::hamming;
  int sample_rate_hz = 16000;

  // 64 ms window / 32 ms hop at the given rate.
  static FrameConfig at_rate(int sample_rate_hz);

  Index bands() const { return window_length / 2 + 1; }
  void validate() const;
};

// Complex time-frequency tensor stored per frequency bin: bins[i] is the
// M x J matrix of channel observations at bin i.
struct Spectrogram {
  std::vector<CMat> bins;
  FrameConfig cfg;
  Index num_samples = 0;  // original signal length, for truncation on resynthesis

  Index bands() const { return static_cast<Index>(bins.size()); }
  Index frames() const { return bins.empty() ? 0 : bins.front().cols(); }
  Index channels() const { return bins.empty() ? 0 : bins.front().rows(); }

  Spectrogram select_channel(Index m) const;
};

// Periodic Hamming window of length n.
Vec hamming_window(Index n);

Spectrogram analyze(const Signal& signal, const FrameConfig& cfg);

// Weighted overlap-add resynthesis; exact on the interior where the
// squared-window sum is positive, truncated to spec.num_samples.
Signal synthesize(const Spectrogram& spec);

}  // namespace rcscme

#endif  // RCSCME_STFT_HPP
