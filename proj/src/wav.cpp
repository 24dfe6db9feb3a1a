#include "rcscme/wav.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace rcscme {

namespace {

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (uint32_t(b[3]) << 24);
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
               char((v >> 24) & 0xff)};
  out.write(b, 4);
}

void write_u16(std::ostream& out, uint16_t v) {
  char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
  out.write(b, 2);
}

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open WAV file: " + path);

  char tag[5] = {0};
  in.read(tag, 4);
  if (std::strncmp(tag, "RIFF", 4) != 0)
    throw ConfigError("not a RIFF file: " + path);
  read_u32(in);
  in.read(tag, 4);
  if (std::strncmp(tag, "WAVE", 4) != 0)
    throw ConfigError("not a WAVE file: " + path);

  uint16_t format_code = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  std::vector<char> data;
  bool have_fmt = false, have_data = false;
  while (in.read(tag, 4)) {
    const uint32_t size = read_u32(in);
    if (std::strncmp(tag, "fmt ", 4) == 0) {
      format_code = read_u16(in);
      channels = read_u16(in);
      sample_rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::strncmp(tag, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      have_data = true;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (!have_fmt || !have_data)
    throw ConfigError("malformed WAV (missing fmt or data chunk): " + path);
  if (channels == 0) throw ConfigError("WAV with zero channels: " + path);

  const bool is_pcm16 = format_code == 1 && bits == 16;
  const bool is_float32 = format_code == 3 && bits == 32;
  if (!is_pcm16 && !is_float32)
    throw ConfigError("unsupported WAV format (want 16-bit PCM or 32-bit float): " +
                      path);

  const size_t bytes_per_sample = bits / 8;
  const size_t num_frames = data.size() / (bytes_per_sample * channels);
  WavData wav;
  wav.sample_rate_hz = static_cast<int>(sample_rate);
  wav.samples.resize(channels, static_cast<Index>(num_frames));
  const char* p = data.data();
  for (size_t t = 0; t < num_frames; ++t) {
    for (int m = 0; m < channels; ++m) {
      if (is_pcm16) {
        int16_t v;
        std::memcpy(&v, p, 2);
        wav.samples(m, static_cast<Index>(t)) = v / 32768.0;
        p += 2;
      } else {
        float v;
        std::memcpy(&v, p, 4);
        wav.samples(m, static_cast<Index>(t)) = v;
        p += 4;
      }
    }
  }
  return wav;
}

void write_wav(const std::string& path, const Signal& samples,
               int sample_rate_hz, WavFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot create WAV file: " + path);

  const Index channels = samples.rows();
  const Index frames = samples.cols();
  const uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
  const uint32_t data_size =
      static_cast<uint32_t>(frames * channels * (bits / 8));

  out.write("RIFF", 4);
  write_u32(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, format == WavFormat::pcm16 ? 1 : 3);
  write_u16(out, static_cast<uint16_t>(channels));
  write_u32(out, static_cast<uint32_t>(sample_rate_hz));
  write_u32(out, static_cast<uint32_t>(sample_rate_hz) * channels * (bits / 8));
  write_u16(out, static_cast<uint16_t>(channels * (bits / 8)));
  write_u16(out, bits);
  out.write("data", 4);
  write_u32(out, data_size);

  for (Index t = 0; t < frames; ++t) {
    for (Index m = 0; m < channels; ++m) {
      if (format == WavFormat::pcm16) {
        const long raw = std::lround(samples(m, t) * 32768.0);
        const int16_t v = static_cast<int16_t>(std::clamp(raw, -32768L, 32767L));
        out.write(reinterpret_cast<const char*>(&v), 2);
      } else {
        const float v = static_cast<float>(samples(m, t));
        out.write(reinterpret_cast<const char*>(&v), 4);
      }
    }
  }
}

}  // namespace rcscme
