#include "phonovec/feature_system.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "phonovec/embedded_data.hpp"
#include "phonovec/error.hpp"
#include "phonovec/io_util.hpp"

namespace phonovec {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 14>
    kFeatureAliases{{{"syllabic", "syl"},
                     {"sonorant", "son"},
                     {"consonantal", "cons"},
                     {"continuant", "cont"},
                     {"lateral", "lat"},
                     {"nasal", "nas"},
                     {"strident", "strid"},
                     {"voice", "voi"},
                     {"high", "hi"},
                     {"low", "lo"},
                     {"anterior", "ant"},
                     {"coronal", "cor"},
                     {"labial", "lab"},
                     {"distributed", "distr"}}};

std::int8_t parse_value(std::string_view cell, std::size_t line_no) {
  if (cell == "+") return 1;
  if (cell == "0") return 0;
  if (cell == "-" || cell == "−") return -1;
  throw Error(Errc::BadFeatureValue,
              "line " + std::to_string(line_no) + ": feature value '" +
                  std::string(cell) + "' is not one of +, 0, -");
}

}  // namespace

std::string_view to_string(PhoneClass cls) {
  return cls == PhoneClass::Vowel ? "vowel" : "consonant";
}

PhoneClass parse_phone_class(std::string_view text) {
  if (text == "vowel" || text == "V") return PhoneClass::Vowel;
  if (text == "consonant" || text == "C") return PhoneClass::Consonant;
  throw Error(Errc::Parse, "unknown phone class '" + std::string(text) + "'");
}

std::string canonical_feature_name(std::string_view name) {
  for (const auto& [alias, short_name] : kFeatureAliases) {
    if (alias == name) return std::string(short_name);
  }
  return std::string(name);
}

BinaryFeatureVector extend(const TernaryVector& ternary) {
  BinaryFeatureVector out = BinaryFeatureVector::Zero(2 * ternary.size());
  for (Eigen::Index i = 0; i < ternary.size(); ++i) {
    if (ternary[i] > 0) out[2 * i] = 1;
    if (ternary[i] < 0) out[2 * i + 1] = 1;
  }
  return out;
}

FeatureTable::FeatureTable(std::vector<std::string> features,
                           std::map<std::string, TernaryVector> rows)
    : features_(std::move(features)) {
  if (rows.empty()) throw Error(Errc::EmptyTable, "feature table has no rows");
  for (auto& [phone, row] : rows) {
    if (phone.empty()) throw Error(Errc::Parse, "empty phone label");
    if (row.size() != num_features()) {
      throw Error(Errc::ArityMismatch,
                  "phone '" + phone + "' has " + std::to_string(row.size()) +
                      " values, expected " + std::to_string(features_.size()));
    }
    for (Eigen::Index i = 0; i < row.size(); ++i) {
      if (row[i] < -1 || row[i] > 1) {
        throw Error(Errc::BadFeatureValue,
                    "phone '" + phone + "' has a non-ternary value");
      }
    }
    binary_.emplace(phone, extend(row));
    rows_.emplace(phone, std::move(row));
  }
}

FeatureTable FeatureTable::parse(std::istream& in) {
  std::vector<std::string> features;
  std::map<std::string, TernaryVector> rows;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line, '\t');
    if (!have_header) {
      if (cells.size() < 2) {
        throw Error(Errc::Parse, "header needs a label column and features");
      }
      features.assign(cells.begin() + 1, cells.end());
      have_header = true;
      continue;
    }
    if (cells.size() != features.size() + 1) {
      throw Error(Errc::ArityMismatch,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(features.size() + 1) + " columns, got " +
                      std::to_string(cells.size()));
    }
    const std::string& phone = cells.front();
    if (phone.empty()) {
      throw Error(Errc::Parse,
                  "line " + std::to_string(line_no) + ": empty phone label");
    }
    if (rows.count(phone) != 0) {
      throw Error(Errc::DuplicatePhone, "duplicate phone '" + phone + "' at line " +
                                            std::to_string(line_no));
    }
    TernaryVector row(static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) {
      row[static_cast<Eigen::Index>(i)] = parse_value(cells[i + 1], line_no);
    }
    rows.emplace(phone, std::move(row));
  }
  if (rows.empty()) throw Error(Errc::EmptyTable, "feature table has no rows");
  return FeatureTable(std::move(features), std::move(rows));
}

FeatureTable FeatureTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open feature table " + path.string());
  return parse(in);
}

const FeatureTable& FeatureTable::bundled() {
  static const FeatureTable table = [] {
    std::istringstream in{std::string(embedded::panphon_table())};
    return parse(in);
  }();
  return table;
}

void FeatureTable::write(std::ostream& out) const {
  out << "ipa";
  for (const auto& f : features_) out << '\t' << f;
  out << '\n';
  for (const auto& [phone, row] : rows_) {
    out << phone;
    for (Eigen::Index i = 0; i < row.size(); ++i) {
      out << '\t' << (row[i] > 0 ? "+" : row[i] < 0 ? "-" : "0");
    }
    out << '\n';
  }
}

bool FeatureTable::contains(std::string_view phone) const {
  return rows_.find(phone) != rows_.end();
}

std::vector<std::string> FeatureTable::phones() const {
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& entry : rows_) out.push_back(entry.first);
  return out;
}

const TernaryVector& FeatureTable::ternary(std::string_view phone) const {
  auto it = rows_.find(phone);
  if (it == rows_.end()) {
    throw Error(Errc::UnknownPhone,
                "phone '" + std::string(phone) + "' is not in the feature table");
  }
  return it->second;
}

const BinaryFeatureVector& FeatureTable::binary(std::string_view phone) const {
  auto it = binary_.find(phone);
  if (it == binary_.end()) {
    throw Error(Errc::UnknownPhone,
                "phone '" + std::string(phone) + "' is not in the feature table");
  }
  return it->second;
}

Eigen::Index FeatureTable::feature_index(std::string_view name) const {
  const std::string canonical = canonical_feature_name(name);
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i] == canonical || features_[i] == name) {
      return static_cast<Eigen::Index>(i);
    }
  }
  throw Error(Errc::UnknownFeature, "unknown feature '" + std::string(name) + "'");
}

bool FeatureTable::has_feature(std::string_view name) const {
  const std::string canonical = canonical_feature_name(name);
  for (const auto& f : features_) {
    if (f == canonical || f == name) return true;
  }
  return false;
}

bool FeatureTable::operator==(const FeatureTable& other) const {
  if (features_ != other.features_ || rows_.size() != other.rows_.size()) {
    return false;
  }
  auto a = rows_.begin();
  auto b = other.rows_.begin();
  for (; a != rows_.end(); ++a, ++b) {
    if (a->first != b->first || a->second != b->second) return false;
  }
  return true;
}

FeatureDelta feature_delta(std::string_view a, std::string_view b,
                           const FeatureTable& table) {
  return table.binary(a) - table.binary(b);
}

int phonological_distance(std::string_view a, std::string_view b,
                          const FeatureTable& table) {
  return static_cast<int>(
      (table.ternary(a).array() != table.ternary(b).array()).count());
}

PhoneClass phone_class(std::string_view phone, const FeatureTable& table) {
  const auto& row = table.ternary(phone);
  return row[table.feature_index("syl")] > 0 ? PhoneClass::Vowel
                                             : PhoneClass::Consonant;
}

bool is_syllabic_consonant(std::string_view phone, const FeatureTable& table) {
  const auto& row = table.ternary(phone);
  return row[table.feature_index("syl")] > 0 &&
         row[table.feature_index("cons")] > 0;
}

}  // namespace phonovec
