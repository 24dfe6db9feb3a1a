#ifndef RCSCME_WAV_HPP
#define RCSCME_WAV_HPP

#include <string>

#include "rcscme/types.hpp"

namespace rcscme {

struct WavData {
  Signal samples;  // channels x length, in [-1, 1] nominal range
  int sample_rate_hz = 0;
};

enum class WavFormat { pcm16, float32 };

// Reads interleaved RIFF WAV, 16-bit integer or 32-bit float PCM.
WavData read_wav(const std::string& path);

void write_wav(const std::string& path, const Signal& samples,
               int sample_rate_hz, WavFormat format = WavFormat::float32);

}  // namespace rcscme

#endif  // RCSCME_WAV_HPP
