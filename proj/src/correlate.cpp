#include "phonovec/correlate.hpp"

#include <algorithm>
#include <cmath>

#include "phonovec/error.hpp"
#include "phonovec/io_util.hpp"
#include "phonovec/stats.hpp"

namespace phonovec {

const std::vector<SignRow>& default_sign_table() {
  static const std::vector<SignRow> table{
      {"hi", "high", PhoneClass::Vowel, MeasureKind::F1, -1},
      {"lo", "low", PhoneClass::Vowel, MeasureKind::F1, +1},
      {"back", "back", PhoneClass::Vowel, MeasureKind::F2, -1},
      {"round", "round", PhoneClass::Vowel, MeasureKind::F2, -1},
      {"nas", "nasal", PhoneClass::Consonant, MeasureKind::F1BW, -1},
      {"son", "sonorant", PhoneClass::Consonant, MeasureKind::HNR, +1},
      {"strid", "strident", PhoneClass::Consonant, MeasureKind::COG, +1},
      {"voi", "voice", PhoneClass::Consonant, MeasureKind::COG, -1},
  };
  return table;
}

const SignRow& sign_row(std::string_view feature) {
  const std::string name = canonical_feature_name(feature);
  for (const auto& row : default_sign_table()) {
    if (row.feature == name) return row;
  }
  throw Error(Errc::UnknownFeature,
              "feature '" + std::string(feature) + "' has no expected correlation sign");
}

CorrelationRow correlate_feature(const SignRow& row, std::span<const EditObservation> obs,
                                 std::size_t min_pairs) {
  CorrelationRow out;
  out.feature = row.display;
  out.phone_class = row.phone_class;
  out.kind = row.kind;
  out.sign_expected = row.expected_sign;
  for (const auto& o : obs) {
    if (o.original.defined() && o.edited.defined()) {
      out.lambdas.push_back(o.lambda);
      out.deltas.push_back(*o.edited.value - *o.original.value);
    }
  }
  out.n_defined = out.lambdas.size();
  out.n_dropped = obs.size() - out.n_defined;
  if (out.n_defined < min_pairs) {
    throw Error(Errc::TooFewPairs, "feature '" + row.display + "': " +
                                       std::to_string(out.n_defined) +
                                       " defined pairs, need " + std::to_string(min_pairs));
  }
  try {
    out.rho = spearman(out.lambdas, out.deltas);
  } catch (const Error& e) {
    if (e.code() != Errc::ConstantSeries) throw;
    out.verdict = "no_effect";
    return out;
  }
  if (*out.rho != 0.0) out.sign_observed = *out.rho > 0 ? 1 : -1;
  out.sign_match = out.sign_observed == out.sign_expected;
  return out;
}

std::vector<AudioPair> load_audio_pairs(std::span<const EditSpec> edits,
                                        const std::filesystem::path& orig_dir,
                                        const std::filesystem::path& edited_dir, int jobs) {
  for (const auto& e : edits) {
    const auto orig = orig_dir / (e.utterance_id + ".wav");
    const auto edited = edited_dir / (e.edit_id + ".wav");
    if (!std::filesystem::is_regular_file(orig)) {
      throw Error(Errc::UnpairedAudio, "edit " + e.edit_id + ": missing original " + orig.string());
    }
    if (!std::filesystem::is_regular_file(edited)) {
      throw Error(Errc::UnpairedAudio,
                  "edit " + e.edit_id + ": missing resynthesis " + edited.string());
    }
  }
  std::vector<AudioPair> out(edits.size());
  parallel_for(edits.size(), jobs, [&](std::size_t i) {
    const auto& e = edits[i];
    out[i].original = read_wav(orig_dir / (e.utterance_id + ".wav"));
    out[i].resynth = read_wav(edited_dir / (e.edit_id + ".wav"));
    out[i].t_start = e.t_start;
    out[i].t_end = e.t_end;
  });
  return out;
}

std::vector<EditObservation> observe(std::span<const EditSpec> edits,
                                     std::span<const AudioPair> audio, MeasureKind kind,
                                     const MeasureParams& params, int jobs) {
  if (edits.size() != audio.size()) {
    throw Error(Errc::LengthMismatch, "one audio pair per edit is required");
  }
  std::vector<EditObservation> out(edits.size());
  parallel_for(edits.size(), jobs, [&](std::size_t i) {
    const auto& a = audio[i];
    out[i].lambda = edits[i].lambda;
    out[i].original = measure(kind, a.original, a.t_start, a.t_end, params);
    out[i].edited = measure(kind, a.resynth, a.t_start, a.t_end, params);
  });
  return out;
}

std::map<MeasureKind, double> default_stability_thresholds() {
  return {{MeasureKind::F1, 25.0},
          {MeasureKind::F2, 50.0},
          {MeasureKind::F1BW, 25.0},
          {MeasureKind::HNR, 1.0},
          {MeasureKind::COG, 100.0}};
}

std::vector<StabilityRow> stability_check(std::span<const AudioPair> pairs,
                                          const MeasureParams& params,
                                          const std::map<MeasureKind, double>& thresholds,
                                          int jobs) {
  if (pairs.empty()) throw Error(Errc::EmptyInput, "stability check needs audio pairs");
  struct PerPair {
    FormantMeasurement fo, fr;
    Measurement co, cr, ho, hr;
  };
  std::vector<PerPair> per(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const auto& p = pairs[i];
    per[i].fo = formants(p.original, p.t_start, p.t_end, params.formant);
    per[i].fr = formants(p.resynth, p.t_start, p.t_end, params.formant);
    per[i].co = cog(p.original, p.t_start, p.t_end, params.cog);
    per[i].cr = cog(p.resynth, p.t_start, p.t_end, params.cog);
    per[i].ho = hnr(p.original, p.t_start, p.t_end, params.hnr);
    per[i].hr = hnr(p.resynth, p.t_start, p.t_end, params.hnr);
  });
  std::vector<StabilityRow> rows;
  for (auto kind : {MeasureKind::F1, MeasureKind::F2, MeasureKind::F1BW, MeasureKind::HNR,
                    MeasureKind::COG}) {
    StabilityRow row;
    row.kind = kind;
    row.threshold = thresholds.at(kind);
    for (const auto& p : per) {
      const Measurement* a = nullptr;
      const Measurement* b = nullptr;
      switch (kind) {
        case MeasureKind::F1: a = &p.fo.f1; b = &p.fr.f1; break;
        case MeasureKind::F2: a = &p.fo.f2; b = &p.fr.f2; break;
        case MeasureKind::F1BW: a = &p.fo.b1; b = &p.fr.b1; break;
        case MeasureKind::HNR: a = &p.ho; b = &p.hr; break;
        case MeasureKind::COG: a = &p.co; b = &p.cr; break;
      }
      if (a->defined() && b->defined()) {
        row.deltas.push_back(*b->value - *a->value);
      } else {
        ++row.n_dropped;
      }
    }
    row.n = row.deltas.size();
    if (row.n > 0) {
      row.median = median(row.deltas);
      row.q25 = quantile(row.deltas, 0.25);
      row.q75 = quantile(row.deltas, 0.75);
      std::vector<double> abs_d;
      std::size_t below = 0;
      for (double d : row.deltas) {
        abs_d.push_back(std::abs(d));
        below += std::abs(d) < row.threshold;
      }
      row.median_abs = median(abs_d);
      row.frac_below = static_cast<double>(below) / static_cast<double>(row.n);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace phonovec
