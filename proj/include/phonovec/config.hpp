#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phonovec/bootstrap.hpp"

namespace phonovec {

/// Flat `key = value` settings. Later sources override earlier ones, so the
/// file is merged first and command-line flags last.
class Settings {
 public:
  static Settings parse(std::string_view text);
  static Settings load(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  void merge(const Settings& other);
  bool has(std::string_view key) const;

  std::string get(std::string_view key, std::string_view fallback = {}) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  std::uint64_t get_seed(std::string_view key, std::uint64_t fallback) const;
  /// Comma-separated list; empty entries are dropped.
  std::vector<std::string> get_list(std::string_view key,
                                    std::string_view fallback = {}) const;

  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

/// Which `layer_<k>` directories of a dump root to use.
struct LayerSelection {
  enum class Kind { All, Single, Range } kind = Kind::All;
  int first = 0;
  int last = 0;

  static LayerSelection parse(std::string_view text);
  bool contains(int layer) const;
};

struct RunConfig {
  std::filesystem::path dump;
  std::optional<std::filesystem::path> table;
  LayerSelection layers;
  BootstrapConfig bootstrap;

  std::string filters = "none";  // none | timit
  int min_occurrences = 50;
  std::optional<std::filesystem::path> diphthongs;
  std::optional<std::filesystem::path> merge_map;
  std::optional<std::filesystem::path> label_map;

  std::vector<std::string> stratify;
  int pcs_shuffles = 1;

  std::vector<std::string> features;
  std::string weighting = "instance";
  int repeats = 1000;
  std::vector<int> sizes;
  int bins = 40;

  std::filesystem::path vectors;
  std::string feature;
  std::string phone_class;
  int n_utts = 3000;
  double lambda_min = -5.0;
  double lambda_max = 5.0;

  std::filesystem::path edits;
  std::filesystem::path orig_audio;
  std::filesystem::path edited_audio;
  int min_pairs = 30;
  bool svg = true;

  std::string vocab;
  int instances = 120;
  int n_layers = 3;
  int rig_edits = 200;

  std::uint64_t seed = 0;
  int jobs = 1;
  std::filesystem::path out = "out";

  /// Throws InvalidConfig on malformed or out-of-range values.
  static RunConfig from_settings(const Settings& s);
};

}  // namespace phonovec
