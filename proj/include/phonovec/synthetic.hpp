#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phonovec/feature_system.hpp"
#include "phonovec/random.hpp"
#include "phonovec/wav.hpp"

namespace phonovec::synth {

// Signal building blocks. All signals are at `fs` Hz.

Eigen::VectorXd pulse_train(double f0, Eigen::Index n, double fs);
/// Leaky integrator (coefficient 0.95): the -6 dB/octave net slope of a
/// glottal source after lip radiation.
Eigen::VectorXd glottal_rolloff(const Eigen::VectorXd& x);
/// Second-order all-pole resonator at `freq` with bandwidth `bw`.
Eigen::VectorXd resonate(const Eigen::VectorXd& x, double freq, double bw, double fs);
Eigen::VectorXd sine(double freq, Eigen::Index n, double fs, double amplitude = 1.0);
Eigen::VectorXd white_noise(Eigen::Index n, Rng& rng);
double power(const Eigen::VectorXd& x);

struct VowelSpec {
  double f0 = 120.0;
  double f1 = 500.0;
  double b1 = 80.0;
  double f2 = 1500.0;
  double b2 = 100.0;
  /// Fixed resonances at 2500, 3500 and 4500 Hz above F1/F2, as in a
  /// natural vowel. The analysis order assumes about five formants below
  /// the ceiling; without them the spare poles lock onto harmonics.
  bool upper_formants = true;
};

/// Pulse train through the glottal roll-off and the resonators,
/// normalized to unit peak.
Waveform vowel(const VowelSpec& spec, double seconds, double fs = 16000.0);

/// Periodic vowel plus white noise at the given harmonic:noise power ratio.
Waveform harmonic_noise_mix(double ratio, double seconds, std::uint64_t seed,
                            double fs = 16000.0);

struct BankSpec {
  std::vector<std::string> phones;
  int instances = 120;
  double sigma = 0.01;
  /// Instance vectors ignore the feature table (i.i.d. standard normal).
  bool null_vectors = false;
  Eigen::Index null_dims = 42;
  int n_layers = 3;
  std::uint64_t seed = 0;
};

/// Writes `root/layer_<kk>/` dumps. Each utterance holds one instance of
/// every phone in random order; a segment spans two identical frames. Layer
/// k applies a fixed random rotation, which leaves every cosine unchanged.
void write_bank_corpus(const std::filesystem::path& root, const BankSpec& spec,
                       const FeatureTable& table);

/// Test signals for the acoustic measurements.
void write_dsp_signals(const std::filesystem::path& dir, std::uint64_t seed);

/// Monotone correlation rig: `per_feature` edits for each row of the sign
/// table. The edited file moves the measured parameter by
/// sign * 0.5 * lambda * unit plus a little jitter.
void write_correlation_rig(const std::filesystem::path& dir, int per_feature,
                           std::uint64_t seed);

/// Identity-resynthesis batch: lambda = 0 edits whose "resynthesis" is the
/// original plus noise 40 dB down.
void write_stability_batch(const std::filesystem::path& dir, int n, std::uint64_t seed);

/// Phones used by the generated corpora.
std::vector<std::string> exact_phones();
std::vector<std::string> noisy_phones();
std::vector<std::string> null_phones();

}  // namespace phonovec::synth
