#include "phonovec/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <vector>

#include "phonovec/error.hpp"
#include "phonovec/io_util.hpp"

namespace phonovec {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T le(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

Waveform read_wav(std::istream& in) {
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(Errc::UnsupportedEncoding, "not a RIFF/WAVE stream");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = le<std::uint32_t>(bytes.data() + pos + 4);
    const std::uint8_t* body = bytes.data() + pos + 8;
    const std::size_t available = bytes.size() - pos - 8;
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw Error(Errc::Truncated, "fmt chunk is truncated");
      format = le<std::uint16_t>(body);
      channels = le<std::uint16_t>(body + 2);
      rate = le<std::uint32_t>(body + 4);
      bits = le<std::uint16_t>(body + 14);
      if (format == kFormatExtensible) {
        if (size < 26 || available < 26) throw Error(Errc::Truncated, "fmt chunk is truncated");
        format = le<std::uint16_t>(body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw Error(Errc::UnsupportedEncoding, "data chunk before fmt chunk");
      if (channels != 1) {
        throw Error(Errc::Multichannel, "expected mono audio, got " + std::to_string(channels) +
                                            " channels");
      }
      if (size > available) throw Error(Errc::Truncated, "data chunk is truncated");
      Waveform w;
      w.sample_rate = rate;
      if (format == kFormatPcm && bits == 16) {
        const Eigen::Index n = size / 2;
        w.samples.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          w.samples[i] = le<std::int16_t>(body + 2 * i) / 32768.0;
        }
      } else if (format == kFormatFloat && bits == 32) {
        const Eigen::Index n = size / 4;
        w.samples.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) w.samples[i] = le<float>(body + 4 * i);
        if (!w.samples.allFinite()) throw Error(Errc::NonFinite, "non-finite audio samples");
      } else {
        throw Error(Errc::UnsupportedEncoding,
                    "unsupported WAV encoding (format " + std::to_string(format) + ", " +
                        std::to_string(bits) + " bits)");
      }
      if (rate == 0) throw Error(Errc::UnsupportedEncoding, "sample rate is zero");
      return w;
    }
    pos += 8 + size + (size & 1);
  }
  throw Error(Errc::Truncated, have_fmt ? "no data chunk" : "no fmt chunk");
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  try {
    return read_wav(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_wav(std::ostream& out, const Waveform& w, WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::Pcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const auto rate = static_cast<std::uint32_t>(std::lround(w.sample_rate));
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * (bits / 8));
  out.write("RIFF", 4);
  put<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * (bits / 8));
  put<std::uint16_t>(out, bits / 8);
  put<std::uint16_t>(out, bits);
  out.write("data", 4);
  put<std::uint32_t>(out, data_bytes);
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    if (pcm) {
      const double s = std::clamp(std::round(w.samples[i] * 32768.0), -32768.0, 32767.0);
      put<std::int16_t>(out, static_cast<std::int16_t>(s));
    } else {
      put<float>(out, static_cast<float>(w.samples[i]));
    }
  }
}

void write_wav(const std::filesystem::path& path, const Waveform& w, WavEncoding encoding) {
  std::ostringstream buf;
  write_wav(buf, w, encoding);
  write_file_atomic(path, buf.str());
}

}  // namespace phonovec
