#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phonovec/bootstrap.hpp"
#include "phonovec/corpus.hpp"
#include "phonovec/feature_system.hpp"

namespace phonovec {

using PhoneTuple = std::array<std::string, 4>;

enum class ClassMix { ConsonantOnly, VowelOnly, Mixed };
std::string_view to_string(ClassMix mix);

struct Quadruplet {
  PhoneTuple phones;
  FeatureDelta delta;  // h_p1 - h_p2
  ClassMix class_mix = ClassMix::Mixed;
  /// max(distance(p2, p3), distance(p2, p4))
  int max_pair_distance = 0;
  /// Ternary feature indices i with h'_p1[i] != h'_p2[i] or h'_p1[i] != h'_p3[i].
  std::vector<int> active_features;

  std::string id() const;
};

/// The eight tuples related by the analogy symmetries
/// (p1,p3,p2,p4), (p2,p1,p4,p3) and (p3,p4,p1,p2).
std::vector<PhoneTuple> analogy_orbit(const PhoneTuple& tuple);
/// Lexicographically smallest orbit member (byte-wise label order).
PhoneTuple canonicalize(const PhoneTuple& tuple);

/// Equal binarized deltas and not degenerate (h1 == h2 or h1 == h3).
bool is_valid_quadruplet(const PhoneTuple& tuple, const FeatureTable& table);

Quadruplet make_quadruplet(const PhoneTuple& tuple, const FeatureTable& table);

struct MiningResult {
  std::vector<Quadruplet> quadruplets;  // canonical, sorted by tuple
  std::size_t raw_count = 0;            // ordered tuples before canonicalization
};

/// Hash-join over ordered phone pairs keyed by their binarized delta.
MiningResult mine_quadruplets(const FeatureTable& table, std::span<const std::string> vocab);

/// Mean cosine between r_p1 and r_p2 + r_p3 - r_p4 with instances drawn
/// independently per phone.
BootstrapEstimate bootstrap_cosine_analogy(const PhoneBank& bank, const Quadruplet& q,
                                           const BootstrapConfig& cfg);
/// Mean cosine between two distinct instances of p1.
BootstrapEstimate bootstrap_cosine_same(const PhoneBank& bank, const Quadruplet& q,
                                        const BootstrapConfig& cfg);
/// Mean cosine between p1 and a phone type other than p1 (type drawn
/// uniformly, then an instance uniformly within the type).
BootstrapEstimate bootstrap_cosine_diff(const PhoneBank& bank, const Quadruplet& q,
                                        const BootstrapConfig& cfg);

bool judge_success(const BootstrapEstimate& diff, const BootstrapEstimate& analogy,
                   const BootstrapEstimate& same);

struct AnalogyResult {
  Quadruplet quadruplet;
  BootstrapEstimate est_analogy;
  BootstrapEstimate est_same;
  BootstrapEstimate est_diff;
  bool success = false;
};

AnalogyResult evaluate_quadruplet(const PhoneBank& bank, const Quadruplet& q,
                                  const BootstrapConfig& cfg);
std::vector<AnalogyResult> evaluate_quadruplets(const PhoneBank& bank,
                                                std::span<const Quadruplet> quads,
                                                const BootstrapConfig& cfg, int jobs = 1);

double success_rate(std::span<const AnalogyResult> results);

/// Mean of per-quadruplet analogy means, with a normal interval over the
/// quadruplet-wise values.
BootstrapEstimate averaged_similarity(std::span<const AnalogyResult> results,
                                      double ci_level = 0.99);

enum class StratifyMode { CvClass, Feature, DistanceBin };
StratifyMode parse_stratify_mode(std::string_view text);

struct Stratum {
  std::size_t n_quads = 0;
  double success_rate = 0.0;
  double averaged_similarity = 0.0;
};

/// cv-class: "consonant"/"vowel" (mixed dropped). feature: "<class>:<feature>"
/// for every active feature (mixed dropped). distance-bin: "dist=<d>".
std::map<std::string, Stratum> stratify(std::span<const AnalogyResult> results,
                                        StratifyMode mode, const FeatureTable& table);

}  // namespace phonovec
