#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phonovec/corpus.hpp"
#include "phonovec/feature_system.hpp"

namespace phonovec {

struct PcsConfig {
  std::uint64_t seed = 0;
  /// Independent shuffles of the second phone per category.
  int shuffles = 1;
};

struct PcsCategory {
  /// Changed features with their (first/second) values, e.g. "voi+/-".
  std::string label;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> correct_scores;
  std::vector<double> mismatched_scores;
  /// Absent when the category produced no positive or no negative score.
  std::optional<double> auc;
};

struct PcsResult {
  std::vector<PcsCategory> categories;
  /// Labels of single-pair categories, which cannot be scored.
  std::vector<std::string> skipped;
  double overall_auc = 0.5;
  std::size_t n_correct = 0;
  std::size_t n_mismatched = 0;
};

/// Offset-based pairing consistency. Ordered phone pairs are grouped by
/// identical nonzero binarized delta (one direction per +/- delta pair);
/// offsets use per-phone mean vectors. Correct offsets a_i - b_i and
/// mismatched offsets a_i - b_pi(i) (pi a random derangement) are scored by
/// cosine to the mean correct offset of the category's pairs that share no
/// phone with the scored offset. AUC pools all scores.
PcsResult pairing_consistency(const PhoneBank& bank, const FeatureTable& table,
                              const PcsConfig& cfg = {});

/// Human-readable signature of a binarized delta, e.g. "voi+/-".
std::string delta_label(const FeatureDelta& delta, const FeatureTable& table);

}  // namespace phonovec
