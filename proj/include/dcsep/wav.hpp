#ifndef DCSEP_WAV_HPP
#define DCSEP_WAV_HPP

#include <cstdint>
#include <fstream>
#include <string>

#include "dcsep/common.hpp"

namespace dcsep::wav {

struct Audio {
  Vec samples;  // in [-1, 1)
  int sample_rate = 0;
};

// 16-bit PCM mono only. Unknown chunks are skipped.
inline Audio read(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "wav: cannot open " + path);

  char tag[4];
  io::read_bytes(is, tag, 4);
  require(std::memcmp(tag, "RIFF", 4) == 0, "wav: not a RIFF file: " + path);
  io::read_u32(is);  // riff size
  io::read_bytes(is, tag, 4);
  require(std::memcmp(tag, "WAVE", 4) == 0, "wav: not a WAVE file: " + path);

  Audio audio;
  bool have_fmt = false;
  while (is.peek() != EOF) {
    io::read_bytes(is, tag, 4);
    std::uint32_t chunk_size = io::read_u32(is);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      require(chunk_size >= 16, "wav: malformed fmt chunk in " + path);
      std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
      std::uint32_t rate = 0, byte_rate = 0;
      io::read_bytes(is, &format, 2);
      io::read_bytes(is, &channels, 2);
      rate = io::read_u32(is);
      byte_rate = io::read_u32(is);
      (void)byte_rate;
      io::read_bytes(is, &block_align, 2);
      io::read_bytes(is, &bits, 2);
      if (chunk_size > 16) is.seekg(chunk_size - 16, std::ios::cur);
      require(format == 1, "wav: only PCM supported: " + path);
      require(channels == 1, "wav: only mono supported: " + path);
      require(bits == 16, "wav: only 16-bit supported: " + path);
      audio.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      require(have_fmt, "wav: data chunk before fmt in " + path);
      const std::uint32_t n = chunk_size / 2;
      audio.samples.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        std::int16_t s = 0;
        io::read_bytes(is, &s, 2);
        audio.samples[i] = static_cast<double>(s) / 32768.0;
      }
      return audio;
    } else {
      is.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  throw Error("wav: no data chunk in " + path);
}

inline void write(const std::string& path, const Vec& samples, int sample_rate) {
  require(sample_rate > 0, "wav: sample_rate must be positive");
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "wav: cannot open for write " + path);

  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size()) * 2;
  os.write("RIFF", 4);
  io::write_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  io::write_u32(os, 16);
  std::uint16_t format = 1, channels = 1, bits = 16;
  std::uint16_t block_align = 2;
  io::write_bytes(os, &format, 2);
  io::write_bytes(os, &channels, 2);
  io::write_u32(os, static_cast<std::uint32_t>(sample_rate));
  io::write_u32(os, static_cast<std::uint32_t>(sample_rate) * 2);
  io::write_bytes(os, &block_align, 2);
  io::write_bytes(os, &bits, 2);
  os.write("data", 4);
  io::write_u32(os, data_bytes);
  for (long i = 0; i < samples.size(); ++i) {
    double v = std::round(samples[i] * 32768.0);
    v = std::min(32767.0, std::max(-32768.0, v));
    std::int16_t s = static_cast<std::int16_t>(v);
    io::write_bytes(os, &s, 2);
  }
  require(os.good(), "wav: write failed for " + path);
}

}  // namespace dcsep::wav

#endif  // DCSEP_WAV_HPP
