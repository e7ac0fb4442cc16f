#include "phonovec/config.hpp"

#include <charconv>

#include "phonovec/error.hpp"
#include "phonovec/io_util.hpp"

namespace phonovec {

namespace {

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::InvalidConfig,
                "invalid value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return value;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(Errc::InvalidConfig, message);
}

}  // namespace

Settings Settings::parse(std::string_view text) {
  Settings s;
  int lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::InvalidConfig,
                  "config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string_view value = trim(line.substr(eq + 1));
    if (!value.empty() && value.front() != '"' && value.front() != '\'') {
      const auto hash = value.find('#');
      if (hash != std::string_view::npos) value = trim(value.substr(0, hash));
    }
    std::string key(trim(line.substr(0, eq)));
    for (auto& c : key) {
      if (c == '-') c = '_';
    }
    s.set(std::move(key), unquote(value));
  }
  return s;
}

Settings Settings::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::InvalidConfig, "config file not found: " + path.string());
  }
  return parse(read_file(path));
}

void Settings::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

void Settings::merge(const Settings& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

bool Settings::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::string Settings::get(std::string_view key, std::string_view fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? std::string(fallback) : it->second;
}

std::int64_t Settings::get_int(std::string_view key, std::int64_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<std::int64_t>(key, it->second);
}

std::uint64_t Settings::get_seed(std::string_view key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<std::uint64_t>(key, it->second);
}

double Settings::get_double(std::string_view key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<double>(key, it->second);
}

bool Settings::get_bool(std::string_view key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(Errc::InvalidConfig, "invalid boolean for " + std::string(key) + ": '" + v + "'");
}

std::vector<std::string> Settings::get_list(std::string_view key,
                                            std::string_view fallback) const {
  std::vector<std::string> out;
  for (const auto& item : split(get(key, fallback), ',')) {
    auto t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

LayerSelection LayerSelection::parse(std::string_view text) {
  LayerSelection sel;
  text = trim(text);
  if (text.empty() || text == "all") return sel;
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    sel.kind = Kind::Single;
    sel.first = sel.last = parse_number<int>("layers", text);
  } else {
    sel.kind = Kind::Range;
    sel.first = parse_number<int>("layers", trim(text.substr(0, dash)));
    sel.last = parse_number<int>("layers", trim(text.substr(dash + 1)));
  }
  require(sel.first >= 0 && sel.first <= sel.last, "invalid layer selection: " + std::string(text));
  return sel;
}

bool LayerSelection::contains(int layer) const {
  return kind == Kind::All || (layer >= first && layer <= last);
}

RunConfig RunConfig::from_settings(const Settings& s) {
  RunConfig c;
  c.dump = s.get("dump");
  if (s.has("table")) c.table = s.get("table");
  c.layers = LayerSelection::parse(s.get("layers", "all"));

  c.bootstrap.n_samples = static_cast<int>(s.get_int("n_samples", 1000));
  c.bootstrap.n_replicates = static_cast<int>(s.get_int("n_replicates", 10));
  c.bootstrap.ci_level = s.get_double("ci_level", 0.99);
  c.bootstrap.max_redraws = static_cast<int>(s.get_int("max_redraws", 100));

  c.filters = s.get("filters", "none");
  require(c.filters == "none" || c.filters == "timit", "filters must be none or timit");
  c.min_occurrences = static_cast<int>(s.get_int("min_occurrences", 50));
  require(c.min_occurrences >= 1, "min_occurrences must be >= 1");
  if (s.has("diphthongs")) c.diphthongs = s.get("diphthongs");
  if (s.has("merge_map")) c.merge_map = s.get("merge_map");
  if (s.has("label_map")) c.label_map = s.get("label_map");

  c.stratify = s.get_list("stratify", "cv-class,feature,distance-bin");
  c.pcs_shuffles = static_cast<int>(s.get_int("pcs_shuffles", 1));
  require(c.pcs_shuffles >= 1, "pcs_shuffles must be >= 1");

  c.features = s.get_list("features");
  c.weighting = s.get("weighting", "instance");
  require(c.weighting == "instance" || c.weighting == "phone-type",
          "weighting must be instance or phone-type");
  c.repeats = static_cast<int>(s.get_int("repeats", 1000));
  require(c.repeats >= 1, "repeats must be >= 1");
  for (const auto& n : s.get_list("sizes", "1,4,16,64,256")) {
    c.sizes.push_back(parse_number<int>("sizes", n));
    require(c.sizes.back() >= 1, "sizes must be >= 1");
  }
  c.bins = static_cast<int>(s.get_int("bins", 40));
  require(c.bins >= 1, "bins must be >= 1");

  c.vectors = s.get("vectors");
  c.feature = s.get("feature");
  c.phone_class = s.get("class");
  c.n_utts = static_cast<int>(s.get_int("n_utts", 3000));
  require(c.n_utts >= 1, "n_utts must be >= 1");
  c.lambda_min = s.get_double("lambda_min", -5.0);
  c.lambda_max = s.get_double("lambda_max", 5.0);
  require(c.lambda_min <= c.lambda_max, "lambda_min must not exceed lambda_max");

  c.edits = s.get("edits");
  c.orig_audio = s.get("orig_audio");
  c.edited_audio = s.get("edited_audio");
  c.min_pairs = static_cast<int>(s.get_int("min_pairs", 30));
  require(c.min_pairs >= 3, "min_pairs must be >= 3");
  c.svg = s.get_bool("svg", true);

  c.vocab = s.get("vocab");
  c.instances = static_cast<int>(s.get_int("instances", 120));
  require(c.instances >= 2, "instances must be >= 2");
  c.n_layers = static_cast<int>(s.get_int("n_layers", 3));
  require(c.n_layers >= 1, "n_layers must be >= 1");
  c.rig_edits = static_cast<int>(s.get_int("rig_edits", 200));
  require(c.rig_edits >= 3, "rig_edits must be >= 3");

  c.seed = s.get_seed("seed", 0);
  c.jobs = static_cast<int>(s.get_int("jobs", 1));
  require(c.jobs >= 1, "jobs must be >= 1");
  c.out = s.get("out", "out");

  c.bootstrap.seed = c.seed;
  validate(c.bootstrap);
  return c;
}

}  // namespace phonovec
