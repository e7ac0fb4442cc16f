#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace phonovec {

/// Ternary feature values: +1 present, 0 not applicable, -1 absent.
using TernaryVector = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;
/// Binarized features, two entries per ternary feature.
using BinaryFeatureVector = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;
/// Difference of two binarized vectors; entries in {-1, 0, 1}.
using FeatureDelta = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;

enum class PhoneClass { Consonant, Vowel };

std::string_view to_string(PhoneClass cls);
PhoneClass parse_phone_class(std::string_view text);

/// +1 -> (1,0), 0 -> (0,0), -1 -> (0,1).
BinaryFeatureVector extend(const TernaryVector& ternary);

/// Phone label -> ternary feature row, with a fixed feature order taken from
/// the table header. Immutable once loaded.
class FeatureTable {
 public:
  FeatureTable() = default;
  FeatureTable(std::vector<std::string> features,
               std::map<std::string, TernaryVector> rows);

  /// Tab-separated: header `label <feature...>`, then one row per phone.
  /// Lines starting with '#' and blank lines are ignored. Values are
  /// '+', '0', '-' (U+2212 minus also accepted).
  static FeatureTable parse(std::istream& in);
  static FeatureTable load(const std::filesystem::path& path);
  /// The PanPhon snapshot shipped with the library.
  static const FeatureTable& bundled();

  void write(std::ostream& out) const;

  const std::vector<std::string>& features() const { return features_; }
  Eigen::Index num_features() const {
    return static_cast<Eigen::Index>(features_.size());
  }
  std::size_t size() const { return rows_.size(); }
  bool contains(std::string_view phone) const;

  /// Sorted (byte-wise) phone labels.
  std::vector<std::string> phones() const;

  const TernaryVector& ternary(std::string_view phone) const;
  const BinaryFeatureVector& binary(std::string_view phone) const;

  /// Accepts PanPhon short names (`voi`) and the long spellings used in
  /// reports (`voice`, `high`, `nasal`, ...).
  Eigen::Index feature_index(std::string_view name) const;
  bool has_feature(std::string_view name) const;

  bool operator==(const FeatureTable& other) const;

 private:
  std::vector<std::string> features_;
  std::map<std::string, TernaryVector, std::less<>> rows_;
  std::map<std::string, BinaryFeatureVector, std::less<>> binary_;
};

/// h_a - h_b over binarized features.
FeatureDelta feature_delta(std::string_view a, std::string_view b,
                           const FeatureTable& table);

/// Number of ternary features on which the two phones disagree.
int phonological_distance(std::string_view a, std::string_view b,
                          const FeatureTable& table);

/// Vowel iff the syllabic feature is +1; consonant otherwise.
PhoneClass phone_class(std::string_view phone, const FeatureTable& table);

/// +syl and +cons: classified as vowels, but worth flagging in reports.
bool is_syllabic_consonant(std::string_view phone, const FeatureTable& table);

/// Resolves the long spellings (`voice` -> `voi`); other names pass through.
std::string canonical_feature_name(std::string_view name);

}  // namespace phonovec
