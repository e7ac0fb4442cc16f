#include "phonovec/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "phonovec/analogy.hpp"
#include "phonovec/correlate.hpp"
#include "phonovec/error.hpp"
#include "phonovec/io_util.hpp"
#include "phonovec/pcs.hpp"
#include "phonovec/stats.hpp"
#include "phonovec/svg_plot.hpp"
#include "phonovec/synthetic.hpp"
#include "phonovec/vector_lab.hpp"

namespace phonovec {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void require_path(const fs::path& path, std::string_view what) {
  if (path.empty()) throw Error(Errc::InvalidConfig, std::string(what) + " is not set");
  if (!fs::exists(path)) {
    throw Error(Errc::InvalidConfig, std::string(what) + " not found: " + path.string());
  }
}

std::string opt_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::string layer_name(int layer) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "layer_%02d", layer);
  return buf;
}

ordered_json estimate_json(const BootstrapEstimate& e) {
  return {{"mean", e.mean}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}};
}

std::vector<std::string> feature_names(const std::vector<int>& idx, const FeatureTable& table) {
  std::vector<std::string> out;
  for (int i : idx) out.push_back(table.features()[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<std::string> strata_tags(const Quadruplet& q, const FeatureTable& table) {
  std::vector<std::string> tags{std::string(to_string(q.class_mix))};
  tags.push_back("dist=" + std::to_string(q.max_pair_distance));
  if (q.class_mix != ClassMix::Mixed) {
    for (const auto& f : feature_names(q.active_features, table)) {
      tags.push_back(std::string(to_string(q.class_mix)) + ":" + f);
    }
  }
  return tags;
}

ordered_json quadruplet_json(const Quadruplet& q, const FeatureTable& table) {
  ordered_json j;
  j["id"] = q.id();
  j["phones"] = q.phones;
  j["class_mix"] = to_string(q.class_mix);
  j["max_pair_distance"] = q.max_pair_distance;
  j["active_features"] = feature_names(q.active_features, table);
  j["strata"] = strata_tags(q, table);
  return j;
}

std::string jsonl(const std::vector<ordered_json>& rows) {
  std::string text;
  for (const auto& r : rows) text += r.dump() + "\n";
  return text;
}

void write_output(const RunConfig& cfg, const std::string& name, std::string_view text) {
  write_file_atomic(cfg.out / name, text);
}

// Phones kept by the bank filters, read from the manifest alone.
std::vector<std::string> manifest_vocab(const fs::path& dump, const BankFilters& filters,
                                        const FeatureTable& table) {
  auto segs = apply_segment_rules(read_manifest(dump / "manifest.jsonl"), filters);
  std::map<std::string, int> counts;
  for (const auto& s : segs) ++counts[s.phone];
  std::vector<std::string> vocab;
  for (const auto& [phone, n] : counts) {
    if (n >= filters.min_occurrences && table.contains(phone)) vocab.push_back(phone);
  }
  return vocab;
}

std::vector<std::string> bank_vocab(const PhoneBank& bank, const FeatureTable& table,
                                    std::ostream& log) {
  std::vector<std::string> vocab;
  for (const auto& p : bank.phones()) {
    if (table.contains(p)) {
      vocab.push_back(p);
    } else {
      log << "note: phone '" << p << "' is not in the feature table and is ignored\n";
    }
  }
  return vocab;
}

PhoneBank load_bank(const RunConfig& cfg, int layer, const fs::path& dir) {
  RepDump dump(dir, layer);
  PhoneBank bank = build_phone_bank(dump, load_filters(cfg), cfg.jobs);
  bank.layer_index = layer;
  return bank;
}

std::pair<int, fs::path> single_layer(const RunConfig& cfg, std::string_view command) {
  auto layers = resolve_layers(cfg);
  if (layers.size() != 1) {
    throw Error(Errc::InvalidConfig, std::string(command) +
                                         " works on one layer; select it with --layers");
  }
  return layers.front();
}

struct VectorRequest {
  std::string feature;
  PhoneClass cls;
  std::string label;
};

std::vector<VectorRequest> vector_requests(const RunConfig& cfg, const FeatureTable& table) {
  std::vector<VectorRequest> out;
  if (cfg.features.empty()) {
    for (const auto& row : default_sign_table()) {
      out.push_back({row.feature, row.phone_class, row.display});
    }
    return out;
  }
  for (const auto& item : cfg.features) {
    const auto colon = item.find(':');
    const std::string name = canonical_feature_name(item.substr(0, colon));
    if (!table.has_feature(name)) {
      throw Error(Errc::UnknownFeature, "unknown feature '" + item.substr(0, colon) + "'");
    }
    PhoneClass cls = PhoneClass::Consonant;
    std::string label = name;
    if (colon != std::string::npos) {
      cls = parse_phone_class(item.substr(colon + 1));
    } else {
      for (const auto& row : default_sign_table()) {
        if (row.feature == name) cls = row.phone_class, label = row.display;
      }
    }
    out.push_back({name, cls, label});
  }
  return out;
}

struct Histogram {
  double lo, hi;
  std::vector<std::size_t> counts;
};

Histogram histogram(std::span<const double> xs, double lo, double hi, int bins) {
  Histogram h{lo, hi, std::vector<std::size_t>(static_cast<std::size_t>(bins), 0)};
  const double width = (hi - lo) / bins;
  for (double x : xs) {
    if (!std::isfinite(x)) continue;
    auto b = static_cast<long>(std::floor((x - lo) / width));
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

std::string safe_name(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

bool all_identity(const std::vector<EditSpec>& edits) {
  return std::all_of(edits.begin(), edits.end(), [](const EditSpec& e) { return e.lambda == 0.0; });
}

void run_stability(const RunConfig& cfg, const std::vector<EditSpec>& edits, std::ostream& log) {
  const auto pairs = load_audio_pairs(edits, cfg.orig_audio, cfg.edited_audio, cfg.jobs);
  const auto rows = stability_check(pairs, {}, default_stability_thresholds(), cfg.jobs);
  fs::create_directories(cfg.out);

  CsvWriter table({"measurement", "n", "n_dropped", "median", "q25", "q75", "threshold",
                   "frac_below", "median_abs"});
  CsvWriter density({"measurement", "bin_low", "bin_high", "count", "density"});
  for (const auto& r : rows) {
    const bool any = r.n > 0;
    table.row({std::string(to_string(r.kind)), std::to_string(r.n), std::to_string(r.n_dropped),
               any ? format_number(r.median) : "", any ? format_number(r.q25) : "",
               any ? format_number(r.q75) : "", format_number(r.threshold),
               any ? format_number(r.frac_below) : "", any ? format_number(r.median_abs) : ""});
    // Bins span +/- 2 thresholds; the edge bins absorb anything further out.
    const int bins = cfg.bins;
    const auto h = histogram(r.deltas, -2 * r.threshold, 2 * r.threshold, bins);
    const double width = (h.hi - h.lo) / bins;
    Series curve{std::string(to_string(r.kind)), {}, {}};
    for (int b = 0; b < bins; ++b) {
      const double lo = h.lo + b * width;
      const std::size_t c = h.counts[static_cast<std::size_t>(b)];
      const double d = any ? static_cast<double>(c) / (static_cast<double>(r.n) * width) : 0.0;
      density.row({std::string(to_string(r.kind)), format_number(lo), format_number(lo + width),
                   std::to_string(c), format_number(d)});
      curve.xs.push_back(lo + width / 2);
      curve.ys.push_back(d);
    }
    if (cfg.svg) {
      const std::vector<Series> one{curve};
      write_output(cfg, "stability_" + safe_name(std::string(to_string(r.kind))) + ".svg",
                   line_svg(one, {"identity resynthesis: " + std::string(to_string(r.kind)),
                                  "delta", "density"}));
    }
    log << to_string(r.kind) << ": n=" << r.n << " median=" << format_number(r.median)
        << " frac_below=" << format_number(r.frac_below) << "\n";
  }
  write_output(cfg, "stability.csv", table.str());
  write_output(cfg, "stability_density.csv", density.str());
}

}  // namespace

std::vector<std::pair<int, fs::path>> resolve_layers(const RunConfig& cfg) {
  require_path(cfg.dump, "dump directory");
  if (fs::exists(cfg.dump / "manifest.jsonl")) {
    const int layer = cfg.layers.kind == LayerSelection::Kind::All ? 0 : cfg.layers.first;
    if (cfg.layers.kind == LayerSelection::Kind::Range && cfg.layers.first != cfg.layers.last) {
      throw Error(Errc::MissingLayer, "dump " + cfg.dump.string() + " holds a single layer");
    }
    return {{layer, cfg.dump}};
  }
  std::map<int, fs::path> found;
  for (const auto& entry : fs::directory_iterator(cfg.dump)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("layer_", 0) != 0 || name.size() == 6) continue;
    const std::string digits = name.substr(6);
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      continue;
    }
    found[std::stoi(digits)] = entry.path();
  }
  std::vector<std::pair<int, fs::path>> out;
  if (cfg.layers.kind == LayerSelection::Kind::All) {
    out.assign(found.begin(), found.end());
  } else {
    for (int k = cfg.layers.first; k <= cfg.layers.last; ++k) {
      auto it = found.find(k);
      if (it == found.end()) {
        throw Error(Errc::MissingLayer, "no dump for layer " + std::to_string(k) + " under " +
                                            cfg.dump.string());
      }
      out.emplace_back(*it);
    }
  }
  if (out.empty()) {
    throw Error(Errc::MissingLayer, "no layer dumps under " + cfg.dump.string());
  }
  return out;
}

FeatureTable load_table(const RunConfig& cfg) {
  if (!cfg.table) return FeatureTable::bundled();
  require_path(*cfg.table, "feature table");
  return FeatureTable::load(*cfg.table);
}

BankFilters load_filters(const RunConfig& cfg) {
  BankFilters f = cfg.filters == "timit" ? timit_filters() : BankFilters{};
  f.min_occurrences = cfg.min_occurrences;
  if (cfg.diphthongs) {
    require_path(*cfg.diphthongs, "diphthong list");
    f.diphthongs = parse_label_set(read_file(*cfg.diphthongs));
  }
  if (cfg.merge_map) {
    require_path(*cfg.merge_map, "merge map");
    f.closure_merge = parse_merge_map(read_file(*cfg.merge_map));
  }
  if (cfg.label_map) {
    require_path(*cfg.label_map, "label map");
    f.label_map = parse_label_map(read_file(*cfg.label_map));
  }
  return f;
}

void cmd_mine(const RunConfig& cfg, std::ostream& log) {
  const FeatureTable table = load_table(cfg);
  std::vector<std::string> vocab;
  if (!cfg.vocab.empty()) {
    std::string text = cfg.vocab;
    if (text.front() == '@') {
      require_path(text.substr(1), "vocabulary file");
      text = read_file(text.substr(1));
      std::replace(text.begin(), text.end(), '\n', ',');
    }
    for (const auto& p : split(text, ',')) {
      auto t = trim(p);
      if (!t.empty() && t.front() != '#') vocab.emplace_back(t);
    }
  } else if (!cfg.dump.empty()) {
    vocab = manifest_vocab(resolve_layers(cfg).front().second, load_filters(cfg), table);
  }
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());

  const MiningResult mined = mine_quadruplets(table, vocab);
  std::vector<ordered_json> rows;
  for (const auto& q : mined.quadruplets) rows.push_back(quadruplet_json(q, table));
  fs::create_directories(cfg.out);
  write_output(cfg, "quadruplets.jsonl", jsonl(rows));
  log << "vocabulary: " << vocab.size() << " phones\n"
      << "quadruplets: " << mined.quadruplets.size() << " (ordered tuples: " << mined.raw_count
      << ")\n";
}

void cmd_eval(const RunConfig& cfg, std::ostream& log) {
  const FeatureTable table = load_table(cfg);
  std::vector<StratifyMode> modes;
  for (const auto& m : cfg.stratify) modes.push_back(parse_stratify_mode(m));
  const auto layers = resolve_layers(cfg);
  fs::create_directories(cfg.out);

  CsvWriter summary({"layer", "stratum", "n_quads", "success_rate", "averaged_similarity",
                     "averaged_similarity_ci_low", "averaged_similarity_ci_high", "pcs"});
  for (const auto& [layer, dir] : layers) {
    const PhoneBank bank = load_bank(cfg, layer, dir);
    const auto vocab = bank_vocab(bank, table, log);
    const MiningResult mined = mine_quadruplets(table, vocab);
    BootstrapConfig bcfg = cfg.bootstrap;
    bcfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(layer));
    const auto results = evaluate_quadruplets(bank, mined.quadruplets, bcfg, cfg.jobs);

    std::optional<double> pcs;
    try {
      pcs = pairing_consistency(bank, table, {derive_seed(cfg.seed, fnv1a64("pcs"), layer),
                                              cfg.pcs_shuffles})
                .overall_auc;
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyInput) throw;
      log << layer_name(layer) << ": PCS undefined (" << e.what() << ")\n";
    }

    std::vector<ordered_json> rows;
    for (const auto& r : results) {
      ordered_json j;
      j["layer"] = layer;
      j["quadruplet"] = quadruplet_json(r.quadruplet, table);
      j["analogy"] = estimate_json(r.est_analogy);
      j["same"] = estimate_json(r.est_same);
      j["diff"] = estimate_json(r.est_diff);
      j["success"] = r.success;
      rows.push_back(std::move(j));
    }
    write_output(cfg, "results_" + layer_name(layer) + ".jsonl", jsonl(rows));

    const std::string L = std::to_string(layer);
    if (results.empty()) {
      summary.row({L, "all", "0", "", "", "", "", opt_number(pcs)});
      log << layer_name(layer) << ": no quadruplets\n";
      continue;
    }
    const double rate = success_rate(results);
    const auto sim = averaged_similarity(results, cfg.bootstrap.ci_level);
    summary.row({L, "all", std::to_string(results.size()), format_number(rate),
                 format_number(sim.mean), format_number(sim.ci_low), format_number(sim.ci_high),
                 opt_number(pcs)});
    for (auto mode : modes) {
      for (const auto& [key, s] : stratify(results, mode, table)) {
        summary.row({L, key, std::to_string(s.n_quads), format_number(s.success_rate),
                     format_number(s.averaged_similarity), "", "", ""});
      }
    }
    log << layer_name(layer) << ": " << results.size() << " quadruplets, success rate "
        << format_number(rate) << ", averaged similarity " << format_number(sim.mean)
        << ", PCS " << (pcs ? format_number(*pcs) : "n/a") << "\n";
  }
  write_output(cfg, "summary.csv", summary.str());
}

void cmd_pcs(const RunConfig& cfg, std::ostream& log) {
  const FeatureTable table = load_table(cfg);
  const auto layers = resolve_layers(cfg);
  fs::create_directories(cfg.out);
  CsvWriter csv({"layer", "category", "n_pairs", "n_correct", "n_mismatched", "auc", "status"});
  for (const auto& [layer, dir] : layers) {
    const PhoneBank bank = load_bank(cfg, layer, dir);
    const auto r = pairing_consistency(
        bank, table, {derive_seed(cfg.seed, fnv1a64("pcs"), layer), cfg.pcs_shuffles});
    const std::string L = std::to_string(layer);
    for (const auto& c : r.categories) {
      csv.row({L, c.label, std::to_string(c.pairs.size()), std::to_string(c.correct_scores.size()),
               std::to_string(c.mismatched_scores.size()), opt_number(c.auc),
               c.auc ? "ok" : "no_scores"});
    }
    for (const auto& s : r.skipped) csv.row({L, s, "1", "0", "0", "", "skipped"});
    csv.row({L, "overall", "", std::to_string(r.n_correct), std::to_string(r.n_mismatched),
             format_number(r.overall_auc), "ok"});
    log << layer_name(layer) << ": PCS " << format_number(r.overall_auc) << " over "
        << r.categories.size() << " categories (" << r.skipped.size() << " skipped)\n";
  }
  write_output(cfg, "pcs.csv", csv.str());
}

void cmd_vectors(const RunConfig& cfg, std::ostream& log) {
  const FeatureTable table = load_table(cfg);
  const auto [layer, dir] = single_layer(cfg, "vectors");
  const PhoneBank bank = load_bank(cfg, layer, dir);
  const auto weighting =
      cfg.weighting == "phone-type" ? SideWeighting::PhoneType : SideWeighting::Instance;

  std::vector<VectorRequest> extracted;
  std::vector<PhonologicalVector> vectors;
  CsvWriter skipped({"feature", "class", "reason"});
  std::size_t extracted_skips = 0;
  for (const auto& req : vector_requests(cfg, table)) {
    try {
      vectors.push_back(extract_vector(bank, table, req.feature, req.cls, weighting));
      extracted.push_back(req);
    } catch (const Error& e) {
      if (e.code() != Errc::EmptySide && e.code() != Errc::ZeroVector) throw;
      skipped.row({req.label, std::string(to_string(req.cls)), e.what()});
      ++extracted_skips;
      log << "skipped " << req.label << " (" << to_string(req.cls) << "): " << e.what() << "\n";
    }
  }
  fs::create_directories(cfg.out);
  write_output(cfg, "skipped.csv", skipped.str());
  if (vectors.empty()) throw Error(Errc::EmptyInput, "no extractable vectors");

  std::vector<ordered_json> rows;
  for (const auto& v : vectors) rows.push_back(to_json(v));
  write_output(cfg, "vectors.jsonl", jsonl(rows));

  const Eigen::MatrixXd sim = vector_similarity_matrix(vectors);
  std::vector<std::string> header{"vector"};
  for (const auto& r : extracted) header.push_back(r.label);
  CsvWriter sim_csv(header);
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    std::vector<std::string> row{extracted[static_cast<std::size_t>(i)].label};
    for (Eigen::Index j = 0; j < sim.cols(); ++j) row.push_back(format_number(sim(i, j)));
    sim_csv.row(row);
  }
  write_output(cfg, "similarity.csv", sim_csv.str());

  std::vector<std::map<int, std::vector<double>>> eff(vectors.size());
  parallel_for(vectors.size(), cfg.jobs, [&](std::size_t i) {
    eff[i] = sample_efficiency(bank, table, extracted[i].feature, extracted[i].cls, cfg.sizes,
                               cfg.repeats, cfg.seed);
  });
  CsvWriter hist({"vector", "N", "bin_low", "bin_high", "count"});
  CsvWriter means({"vector", "N", "mean_cosine", "median_cosine", "min_cosine"});
  std::vector<Series> curves;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    Series curve{extracted[i].label, {}, {}};
    for (const auto& [n, cosines] : eff[i]) {
      const auto h = histogram(cosines, -1.0, 1.0, cfg.bins);
      const double width = 2.0 / cfg.bins;
      for (int b = 0; b < cfg.bins; ++b) {
        hist.row({extracted[i].label, std::to_string(n), format_number(-1.0 + b * width),
                  format_number(-1.0 + (b + 1) * width),
                  std::to_string(h.counts[static_cast<std::size_t>(b)])});
      }
      const double m = mean(cosines);
      means.row({extracted[i].label, std::to_string(n), format_number(m),
                 format_number(median(cosines)),
                 format_number(*std::min_element(cosines.begin(), cosines.end()))});
      curve.xs.push_back(std::log2(static_cast<double>(n)));
      curve.ys.push_back(m);
    }
    curves.push_back(std::move(curve));
  }
  write_output(cfg, "sample_efficiency.csv", hist.str());
  write_output(cfg, "sample_efficiency_summary.csv", means.str());
  if (cfg.svg) {
    write_output(cfg, "sample_efficiency.svg",
                 line_svg(curves, {"cosine to the full-bank vector", "log2 N", "mean cosine"}));
  }
  log << "vectors: " << vectors.size() << " extracted, " << extracted_skips << " skipped\n";
}

void cmd_edit(const RunConfig& cfg, std::ostream& log) {
  const FeatureTable table = load_table(cfg);
  const auto [layer, dir] = single_layer(cfg, "edit");
  require_path(cfg.vectors, "vectors file");
  if (cfg.feature.empty()) throw Error(Errc::InvalidConfig, "edit needs --feature");
  const std::string feature = canonical_feature_name(cfg.feature);

  std::optional<PhonologicalVector> vec;
  for (const auto& line : read_data_lines(read_file(cfg.vectors))) {
    auto v = vector_from_json(nlohmann::json::parse(line));
    if (canonical_feature_name(v.feature) != feature) continue;
    if (!cfg.phone_class.empty() && v.phone_class != parse_phone_class(cfg.phone_class)) continue;
    vec = std::move(v);
    break;
  }
  if (!vec) {
    throw Error(Errc::InvalidConfig, "no vector for feature '" + cfg.feature + "' in " +
                                         cfg.vectors.string());
  }

  RepDump dump(dir, layer);
  if (dump.manifest().empty()) throw Error(Errc::NoSegments, "manifest is empty");
  if (vec->dims() != dump.header(dump.utterance_ids().front()).cols) {
    throw Error(Errc::LengthMismatch, "vector and representation widths differ");
  }
  const auto segments = apply_segment_rules(dump.manifest(), load_filters(cfg));
  EditBatchConfig bcfg{cfg.n_utts, cfg.lambda_min, cfg.lambda_max, cfg.seed};
  const auto edits = plan_edit_batch(
      segments, table, *vec,
      [&](const std::string& utt) {
        const auto h = dump.header(utt);
        return UtteranceGeometry{h.stride_samples, h.sample_rate, static_cast<Eigen::Index>(h.rows)};
      },
      bcfg);

  const fs::path edited_root = cfg.out / "edited";
  fs::create_directories(edited_root / "reps");
  parallel_for(edits.size(), cfg.jobs, [&](std::size_t i) {
    const RepresentationMatrix rep = dump.load(edits[i].utterance_id);
    write_s3mr(edited_root / "reps" / (edits[i].edit_id + ".s3mr"), apply_edit(rep, edits[i], *vec));
  });

  std::map<std::string, std::vector<const SegmentRecord*>> by_utt;
  for (const auto& s : dump.manifest()) by_utt[s.utterance_id].push_back(&s);
  std::vector<SegmentRecord> manifest;
  std::vector<ordered_json> log_rows;
  for (const auto& e : edits) {
    for (const auto* s : by_utt[e.utterance_id]) {
      SegmentRecord copy = *s;
      copy.utterance_id = e.edit_id;
      manifest.push_back(std::move(copy));
    }
    log_rows.push_back(to_json(e));
  }
  write_manifest(edited_root / "manifest.jsonl", manifest);
  write_output(cfg, "edits.jsonl", jsonl(log_rows));

  ordered_json side;
  side["vector"] = to_json(*vec);
  side["layer"] = layer;
  side["source_dump"] = dir.string();
  side["n_edits"] = edits.size();
  side["lambda_min"] = cfg.lambda_min;
  side["lambda_max"] = cfg.lambda_max;
  side["seed"] = cfg.seed;
  write_output(cfg, "edit_batch.json", side.dump(2) + "\n");
  log << "edits: " << edits.size() << " (" << vec->feature << ", "
      << to_string(vec->phone_class) << ")\n";
}

void cmd_correlate(const RunConfig& cfg, std::ostream& log) {
  require_path(cfg.edits, "edit log");
  require_path(cfg.orig_audio, "original audio directory");
  require_path(cfg.edited_audio, "edited audio directory");
  const auto edits = read_edit_log(cfg.edits);
  if (edits.empty()) throw Error(Errc::EmptyInput, "edit log is empty");
  if (all_identity(edits)) {
    log << "all edits have lambda = 0: reporting resynthesis stability\n";
    run_stability(cfg, edits, log);
    return;
  }
  const auto audio = load_audio_pairs(edits, cfg.orig_audio, cfg.edited_audio, cfg.jobs);

  fs::create_directories(cfg.out);
  CsvWriter report({"feature", "class", "measurement", "n", "n_dropped", "rho", "sign_expected",
                    "sign_observed", "sign_match", "verdict"});
  CsvWriter scatter({"feature", "class", "measurement", "edit_id", "lambda", "delta"});
  std::set<std::string> seen;
  for (const auto& e : edits) seen.insert(canonical_feature_name(e.feature));
  for (const auto& name : seen) {
    if (std::none_of(default_sign_table().begin(), default_sign_table().end(),
                     [&](const SignRow& r) { return r.feature == name; })) {
      log << "note: no expected sign for feature '" << name << "'; its edits are ignored\n";
    }
  }
  for (const auto& row : default_sign_table()) {
    std::vector<EditSpec> sub;
    std::vector<AudioPair> sub_audio;
    for (std::size_t i = 0; i < edits.size(); ++i) {
      if (canonical_feature_name(edits[i].feature) != row.feature) continue;
      sub.push_back(edits[i]);
      sub_audio.push_back(audio[i]);
    }
    if (sub.empty()) continue;
    const auto obs = observe(sub, sub_audio, row.kind, {}, cfg.jobs);
    const auto r = correlate_feature(row, obs, static_cast<std::size_t>(cfg.min_pairs));
    const std::string kind(to_string(row.kind));
    const std::string cls(to_string(row.phone_class));
    report.row({r.feature, cls, kind, std::to_string(r.n_defined), std::to_string(r.n_dropped),
                opt_number(r.rho), std::to_string(r.sign_expected),
                r.sign_observed ? std::to_string(*r.sign_observed) : "",
                r.sign_match ? "true" : "false", r.verdict});
    for (std::size_t i = 0, k = 0; i < obs.size(); ++i) {
      if (!obs[i].original.defined() || !obs[i].edited.defined()) continue;
      scatter.row({r.feature, cls, kind, sub[i].edit_id, format_number(r.lambdas[k]),
                   format_number(r.deltas[k])});
      ++k;
    }
    if (cfg.svg) {
      write_output(cfg, "scatter_" + safe_name(r.feature) + ".svg",
                   scatter_svg(r.lambdas, r.deltas,
                               {r.feature + " vector vs " + kind, "lambda", "delta " + kind}));
    }
    log << r.feature << " / " << kind << ": n=" << r.n_defined << " rho="
        << (r.rho ? format_number(*r.rho) : "n/a") << " sign_match="
        << (r.sign_match ? "true" : "false") << "\n";
  }
  write_output(cfg, "correlation.csv", report.str());
  write_output(cfg, "scatter.csv", scatter.str());
}

void cmd_stability(const RunConfig& cfg, std::ostream& log) {
  require_path(cfg.edits, "edit log");
  require_path(cfg.orig_audio, "original audio directory");
  require_path(cfg.edited_audio, "resynthesized audio directory");
  const auto edits = read_edit_log(cfg.edits);
  if (edits.empty()) throw Error(Errc::EmptyInput, "edit log is empty");
  if (!all_identity(edits)) log << "note: edit log contains nonzero lambda values\n";
  run_stability(cfg, edits, log);
}

void cmd_gen_synthetic(const RunConfig& cfg, std::ostream& log) {
  const FeatureTable table = load_table(cfg);
  fs::create_directories(cfg.out);

  synth::BankSpec exact;
  exact.phones = synth::exact_phones();
  exact.instances = cfg.instances;
  exact.sigma = 0.01;
  exact.n_layers = cfg.n_layers;
  exact.seed = derive_seed(cfg.seed, fnv1a64("exact"));
  synth::write_bank_corpus(cfg.out / "exact", exact, table);

  synth::BankSpec noisy;
  noisy.phones = synth::noisy_phones();
  noisy.instances = cfg.instances;
  noisy.sigma = 0.1;
  noisy.n_layers = 1;
  noisy.seed = derive_seed(cfg.seed, fnv1a64("noisy"));
  synth::write_bank_corpus(cfg.out / "noisy", noisy, table);

  synth::BankSpec null;
  null.phones = synth::null_phones();
  null.instances = cfg.instances;
  null.null_vectors = true;
  null.n_layers = 1;
  null.seed = derive_seed(cfg.seed, fnv1a64("null"));
  synth::write_bank_corpus(cfg.out / "null", null, table);

  synth::write_dsp_signals(cfg.out / "dsp", cfg.seed);
  synth::write_correlation_rig(cfg.out / "rig", cfg.rig_edits, cfg.seed);
  synth::write_stability_batch(cfg.out / "stability", 60, cfg.seed);

  log << "exact-analogy corpus: " << exact.phones.size() << " phones x " << cfg.instances
      << " instances, " << cfg.n_layers << " layers -> " << (cfg.out / "exact").string() << "\n"
      << "noisy corpus: " << noisy.phones.size() << " phones -> " << (cfg.out / "noisy").string()
      << "\n"
      << "null corpus: " << null.phones.size() << " phones -> " << (cfg.out / "null").string()
      << "\n"
      << "dsp signals -> " << (cfg.out / "dsp").string() << "\n"
      << "correlation rig: " << cfg.rig_edits << " edits per feature -> "
      << (cfg.out / "rig").string() << "\n"
      << "stability batch -> " << (cfg.out / "stability").string() << "\n";
}

namespace {

bool is_usage_error(Errc code) {
  switch (code) {
    case Errc::InvalidConfig:
    case Errc::UnknownMode:
    case Errc::UnknownFeature:
    case Errc::UnknownPhone:
    case Errc::MissingLayer:
      return true;
    default:
      return false;
  }
}

struct Command {
  const char* name;
  const char* help;
  std::vector<std::pair<const char*, const char*>> options;
  void (*run)(const RunConfig&, std::ostream&);
};

const std::pair<const char*, const char*> kDump{"dump", "dump directory (a layer dump or a root of layer_<k> dumps)"};
const std::pair<const char*, const char*> kTable{"table", "feature table TSV (default: bundled PanPhon snapshot)"};
const std::pair<const char*, const char*> kLayers{"layers", "all | <k> | <a>-<b>"};
const std::pair<const char*, const char*> kFilters{"filters", "label conventions: none | timit"};
const std::pair<const char*, const char*> kMinOcc{"min-occurrences", "drop phones with fewer segments"};
const std::pair<const char*, const char*> kDiph{"diphthongs", "file of labels to drop"};
const std::pair<const char*, const char*> kMerge{"merge-map", "closure/release merge TSV"};
const std::pair<const char*, const char*> kLabelMap{"label-map", "corpus label -> table label TSV"};

std::vector<Command> commands() {
  const std::vector<std::pair<const char*, const char*>> bank{kDump, kTable, kLayers, kFilters,
                                                              kMinOcc, kDiph, kMerge, kLabelMap};
  auto with = [&](std::vector<std::pair<const char*, const char*>> extra) {
    auto all = bank;
    all.insert(all.end(), extra.begin(), extra.end());
    return all;
  };
  const std::vector<std::pair<const char*, const char*>> audio{
      {"edits", "edits.jsonl"},
      {"orig-audio", "directory of <utterance_id>.wav originals"},
      {"edited-audio", "directory of <edit_id>.wav resyntheses"},
      {"min-pairs", "minimum defined pairs per feature"},
      {"bins", "histogram bins"}};
  return {
      {"mine", "mine analogy quadruplets",
       with({{"vocab", "comma-separated phones or @file (default: phones of the dump)"}}), cmd_mine},
      {"eval", "bootstrap analogy evaluation per layer",
       with({{"n-samples", "samples per replicate"},
             {"n-replicates", "bootstrap replicates"},
             {"ci-level", "confidence level"},
             {"stratify", "comma list of cv-class, feature, distance-bin"},
             {"pcs-shuffles", "derangements per PCS category"}}),
       cmd_eval},
      {"pcs", "offset-based pairing consistency per layer",
       with({{"pcs-shuffles", "derangements per PCS category"}}), cmd_pcs},
      {"vectors", "extract phonological vectors",
       with({{"features", "comma list of feature[:class] (default: the 8 reported features)"},
             {"weighting", "instance | phone-type"},
             {"repeats", "sample-efficiency repeats per N"},
             {"sizes", "comma list of N"},
             {"bins", "histogram bins"}}),
       cmd_vectors},
      {"edit", "apply a phonological vector to sampled segments",
       with({{"vectors", "vectors.jsonl"},
             {"feature", "feature of the vector to apply"},
             {"class", "consonant | vowel"},
             {"n-utts", "number of edits"},
             {"lambda-min", "lowest lambda"},
             {"lambda-max", "highest lambda"}}),
       cmd_edit},
      {"correlate", "correlate lambda with acoustic deltas", audio, cmd_correlate},
      {"stability", "acoustic deltas of identity resynthesis", audio, cmd_stability},
      {"gen-synthetic", "write the synthetic corpora, test signals and rigs",
       {kTable,
        {"instances", "instances per phone"},
        {"n-layers", "layers of the exact-analogy corpus"},
        {"rig-edits", "correlation-rig edits per feature"}},
       cmd_gen_synthetic},
  };
}

std::string key_of(const char* flag) {
  std::string k = flag;
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phonological analogy analysis of speech representations", "phonovec"};
  app.require_subcommand(1);
  std::string config_path, seed, jobs, out_dir;
  auto* config_opt = app.add_option("--config", config_path, "flat key = value config file");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");

  const auto cmds = commands();
  std::map<std::string, std::string> storage;
  std::vector<std::pair<std::string, CLI::Option*>> flags;
  std::vector<CLI::App*> subs;
  bool no_svg = false;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    for (const auto& [flag, help] : c.options) {
      const std::string key = std::string(c.name) + "." + key_of(flag);
      flags.emplace_back(key, sub->add_option(std::string("--") + flag, storage[key], help));
    }
    if (std::string_view(c.name) == "correlate" || std::string_view(c.name) == "stability" ||
        std::string_view(c.name) == "vectors") {
      sub->add_flag("--no-svg", no_svg, "write CSV output only");
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::size_t chosen = 0;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) chosen = i;
  }
  const Command& cmd = cmds[chosen];

  try {
    Settings settings;
    if (config_opt->count() > 0) settings = Settings::load(config_path);
    const std::string prefix = std::string(cmd.name) + ".";
    for (const auto& [key, opt] : flags) {
      if (opt->count() > 0 && key.rfind(prefix, 0) == 0) {
        settings.set(key.substr(prefix.size()), storage[key]);
      }
    }
    if (seed_opt->count() > 0) settings.set("seed", seed);
    if (jobs_opt->count() > 0) settings.set("jobs", jobs);
    if (out_opt->count() > 0) settings.set("out", out_dir);
    if (no_svg) settings.set("svg", "false");
    const RunConfig cfg = RunConfig::from_settings(settings);
    cmd.run(cfg, out);
    return 0;
  } catch (const Error& e) {
    err << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return is_usage_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace phonovec
