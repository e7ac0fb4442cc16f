#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

namespace phonovec {

struct Waveform {
  Eigen::VectorXd samples;
  double sample_rate = 16000.0;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

enum class WavEncoding { Pcm16, Float32 };

/// Mono RIFF/WAVE, PCM16 or IEEE float32. PCM16 is scaled by 1/32768.
Waveform read_wav(std::istream& in);
Waveform read_wav(const std::filesystem::path& path);
void write_wav(std::ostream& out, const Waveform& w, WavEncoding encoding = WavEncoding::Pcm16);
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavEncoding encoding = WavEncoding::Pcm16);

}  // namespace phonovec
