#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phonovec/acoustics.hpp"
#include "phonovec/feature_system.hpp"
#include "phonovec/vector_lab.hpp"
#include "phonovec/wav.hpp"

namespace phonovec {

struct SignRow {
  std::string feature;  // canonical table name, e.g. "hi"
  std::string display;  // e.g. "high"
  PhoneClass phone_class = PhoneClass::Vowel;
  MeasureKind kind = MeasureKind::F1;
  int expected_sign = 1;
};

/// high F1-, low F1+, back F2-, round F2-, nasal F1BW-, sonorant HNR+,
/// strident COG+, voice COG-.
const std::vector<SignRow>& default_sign_table();
const SignRow& sign_row(std::string_view feature);

struct EditObservation {
  double lambda = 0.0;
  Measurement original;
  Measurement edited;
};

struct CorrelationRow {
  std::string feature;
  PhoneClass phone_class = PhoneClass::Vowel;
  MeasureKind kind = MeasureKind::F1;
  std::size_t n_defined = 0;
  std::size_t n_dropped = 0;
  std::optional<double> rho;
  int sign_expected = 1;
  std::optional<int> sign_observed;
  bool sign_match = false;
  /// "ok", or "no_effect" when every delta (or lambda) is identical.
  std::string verdict = "ok";
  std::vector<double> lambdas;  // defined pairs only
  std::vector<double> deltas;
};

/// Spearman rho between lambda and edited-minus-original measurement over
/// pairs where both measurements are defined. Throws TooFewPairs below
/// `min_pairs`.
CorrelationRow correlate_feature(const SignRow& row, std::span<const EditObservation> obs,
                                 std::size_t min_pairs = 30);

/// Original audio `<orig_dir>/<utterance_id>.wav`, resynthesis
/// `<edited_dir>/<edit_id>.wav`; throws UnpairedAudio when either is missing.
struct AudioPair {
  Waveform original;
  Waveform resynth;
  double t_start = 0.0;
  double t_end = 0.0;
};
std::vector<AudioPair> load_audio_pairs(std::span<const EditSpec> edits,
                                        const std::filesystem::path& orig_dir,
                                        const std::filesystem::path& edited_dir, int jobs = 1);

std::vector<EditObservation> observe(std::span<const EditSpec> edits,
                                     std::span<const AudioPair> audio, MeasureKind kind,
                                     const MeasureParams& params = {}, int jobs = 1);

struct StabilityRow {
  MeasureKind kind = MeasureKind::F1;
  std::size_t n = 0;
  std::size_t n_dropped = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double threshold = 0.0;
  double frac_below = 0.0;
  double median_abs = 0.0;
  std::vector<double> deltas;
};

/// |delta| thresholds per kind: F1 25 Hz, F2 50 Hz, F1BW 25 Hz, COG 100 Hz, HNR 1 dB.
std::map<MeasureKind, double> default_stability_thresholds();

/// Distribution of resynthesized-minus-original measurements for identity
/// (lambda = 0) resynthesis, one row per kind.
std::vector<StabilityRow> stability_check(std::span<const AudioPair> pairs,
                                          const MeasureParams& params = {},
                                          const std::map<MeasureKind, double>& thresholds =
                                              default_stability_thresholds(),
                                          int jobs = 1);

}  // namespace phonovec
