#include "anc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "anc/errors.hpp"

namespace anc {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

template <typename T>
void write_le(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_le(std::ifstream& f, T& v) {
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  return f.gcount() == sizeof(T);
}

void write_header(std::ofstream& f, std::uint16_t format, std::uint16_t bits,
                  std::uint32_t rate, std::uint32_t num_samples) {
  const std::uint32_t bytes_per_sample = bits / 8;
  const std::uint32_t data_bytes = num_samples * bytes_per_sample;
  f.write("RIFF", 4);
  write_le<std::uint32_t>(f, 36 + data_bytes);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  write_le<std::uint32_t>(f, 16);
  write_le<std::uint16_t>(f, format);
  write_le<std::uint16_t>(f, 1);  // mono
  write_le<std::uint32_t>(f, rate);
  write_le<std::uint32_t>(f, rate * bytes_per_sample);
  write_le<std::uint16_t>(f, static_cast<std::uint16_t>(bytes_per_sample));
  write_le<std::uint16_t>(f, bits);
  f.write("data", 4);
  write_le<std::uint32_t>(f, data_bytes);
}

}  // namespace

SignalBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw WavMissingFileError("cannot open WAV file: " + path.string());

  char tag[4];
  f.read(tag, 4);
  if (f.gcount() != 4 || std::memcmp(tag, "RIFF", 4) != 0)
    throw WavEncodingError("not a RIFF file: " + path.string());
  std::uint32_t riff_size = 0;
  read_le(f, riff_size);
  f.read(tag, 4);
  if (f.gcount() != 4 || std::memcmp(tag, "WAVE", 4) != 0)
    throw WavEncodingError("not a WAVE file: " + path.string());

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;

  while (f.read(tag, 4)) {
    std::uint32_t chunk_size = 0;
    if (!read_le(f, chunk_size)) break;
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      std::uint32_t byte_rate = 0;
      std::uint16_t block_align = 0;
      read_le(f, format);
      read_le(f, channels);
      read_le(f, rate);
      read_le(f, byte_rate);
      read_le(f, block_align);
      read_le(f, bits);
      if (chunk_size > 16) f.seekg(chunk_size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw WavEncodingError("data chunk precedes fmt chunk");
      if (channels != 1)
        throw WavChannelError("only mono WAV files are supported (" +
                              std::to_string(channels) + " channels)");
      SignalBuffer out;
      out.sample_rate_hz = static_cast<double>(rate);
      if (format == kFormatPcm && bits == 16) {
        const std::size_t n = chunk_size / 2;
        std::vector<std::int16_t> raw(n);
        f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(chunk_size));
        if (f.gcount() != static_cast<std::streamsize>(chunk_size))
          throw WavEncodingError("truncated data chunk");
        out.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i)
          out.samples[i] = static_cast<double>(raw[i]) / 32768.0;
      } else if (format == kFormatFloat && bits == 32) {
        const std::size_t n = chunk_size / 4;
        std::vector<float> raw(n);
        f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(chunk_size));
        if (f.gcount() != static_cast<std::streamsize>(chunk_size))
          throw WavEncodingError("truncated data chunk");
        out.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) out.samples[i] = static_cast<double>(raw[i]);
      } else {
        throw WavEncodingError("unsupported WAV encoding (format " +
                               std::to_string(format) + ", " +
                               std::to_string(bits) + " bit)");
      }
      return out;
    } else {
      f.seekg(chunk_size, std::ios::cur);
    }
  }
  throw WavEncodingError("no data chunk found: " + path.string());
}

void save_wav_pcm16(const std::filesystem::path& path, const SignalBuffer& x) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw WavError("cannot create WAV file: " + path.string());
  write_header(f, kFormatPcm, 16, static_cast<std::uint32_t>(x.sample_rate_hz),
               static_cast<std::uint32_t>(x.samples.size()));
  for (double v : x.samples) {
    const double clamped = std::clamp(v, -1.0, 1.0);
    write_le<std::int16_t>(
        f, static_cast<std::int16_t>(std::lround(clamped * 32767.0)));
  }
}

void save_wav_float32(const std::filesystem::path& path, const SignalBuffer& x) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw WavError("cannot create WAV file: " + path.string());
  write_header(f, kFormatFloat, 32, static_cast<std::uint32_t>(x.sample_rate_hz),
               static_cast<std::uint32_t>(x.samples.size()));
  for (double v : x.samples) write_le<float>(f, static_cast<float>(v));
}

}  // namespace anc
