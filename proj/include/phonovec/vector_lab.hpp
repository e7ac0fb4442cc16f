#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "phonovec/corpus.hpp"
#include "phonovec/feature_system.hpp"
#include "phonovec/rep_dump.hpp"

namespace phonovec {

/// How the two side means of a phonological vector are weighted.
enum class SideWeighting {
  Instance,   // every pooled segment counts once
  PhoneType,  // mean of per-phone means
};

struct PhonologicalVector {
  std::string feature;
  PhoneClass phone_class = PhoneClass::Consonant;
  Eigen::VectorXd direction;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::string bank_id;

  Eigen::Index dims() const { return direction.size(); }
};

/// Phones of `cls` in both the bank and the table, split by h'[feature]
/// into +1 and -1 sides (0-valued phones are excluded).
struct FeatureSides {
  std::vector<std::string> positive;
  std::vector<std::string> negative;
};
FeatureSides feature_sides(const PhoneBank& bank, const FeatureTable& table,
                           std::string_view feature, PhoneClass cls);

/// Mean of the positive side minus mean of the negative side.
PhonologicalVector extract_vector(const PhoneBank& bank, const FeatureTable& table,
                                  std::string_view feature, PhoneClass cls,
                                  SideWeighting weighting = SideWeighting::Instance);

struct EditSpec {
  std::string edit_id;
  std::string utterance_id;
  std::string phone;
  double t_start = 0.0;
  double t_end = 0.0;
  FrameRange frames;
  std::string feature;
  PhoneClass phone_class = PhoneClass::Consonant;
  double lambda = 0.0;
};

/// Rows in the edit's frame range get + lambda * direction; all other rows
/// are copied untouched. lambda == 0 returns an exact copy.
RepresentationMatrix apply_edit(const RepresentationMatrix& rep, const EditSpec& spec,
                                const PhonologicalVector& vec);

/// Cosines to the full-bank vector of vectors rebuilt from N instances per
/// side drawn with replacement, `repeats` times per N.
std::map<int, std::vector<double>> sample_efficiency(const PhoneBank& bank,
                                                     const FeatureTable& table,
                                                     std::string_view feature,
                                                     PhoneClass cls, std::span<const int> Ns,
                                                     int repeats, std::uint64_t seed);

struct SinglePairVector {
  PhonologicalVector vector;
  double cosine_to_full = 0.0;
};

/// mean(p_pos) - mean(p_neg), compared against the full extraction of
/// `feature` within `cls`.
SinglePairVector single_pair_vector(const PhoneBank& bank, const FeatureTable& table,
                                    std::string_view feature, PhoneClass cls,
                                    const std::string& p_pos, const std::string& p_neg);

/// M(i, j) = cos(v_i, v_j).
Eigen::MatrixXd vector_similarity_matrix(std::span<const PhonologicalVector> vectors);

/// Frame geometry of one utterance, read from its matrix header.
struct UtteranceGeometry {
  std::uint32_t stride_samples = 320;
  std::uint32_t sample_rate = 16000;
  Eigen::Index frames = 0;
};
using GeometryLookup = std::function<UtteranceGeometry(const std::string& utterance_id)>;

struct EditBatchConfig {
  int n_utts = 3000;
  double lambda_min = -5.0;
  double lambda_max = 5.0;
  std::uint64_t seed = 0;
};

/// Segments whose phone belongs to the vector's class and has a nonzero
/// value for its feature, sampled with replacement; lambda ~ U(min, max).
std::vector<EditSpec> plan_edit_batch(std::span<const SegmentRecord> segments,
                                      const FeatureTable& table,
                                      const PhonologicalVector& vec,
                                      const GeometryLookup& geometry,
                                      const EditBatchConfig& cfg);

nlohmann::ordered_json to_json(const PhonologicalVector& v);
PhonologicalVector vector_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const EditSpec& e);
EditSpec edit_from_json(const nlohmann::json& j);
std::vector<EditSpec> read_edit_log(const std::filesystem::path& path);

}  // namespace phonovec
