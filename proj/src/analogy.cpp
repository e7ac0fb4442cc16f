#include "phonovec/analogy.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "phonovec/error.hpp"
#include "phonovec/io_util.hpp"
#include "phonovec/random.hpp"
#include "phonovec/stats.hpp"

namespace phonovec {

namespace {

enum StreamKind : std::uint64_t { kAnalogy = 1, kSame = 2, kDiff = 3 };

std::string delta_key(const FeatureDelta& delta) {
  return std::string(reinterpret_cast<const char*>(delta.data()),
                     static_cast<std::size_t>(delta.size()));
}

// Instances of one phone stored column-wise (F x N) for contiguous access.
struct Pool {
  Eigen::MatrixXd cols;
  Eigen::Index size() const { return cols.cols(); }
};

Pool pool_of(const PhoneBank& bank, std::string_view phone) {
  return Pool{bank.instances(phone).transpose()};
}

template <typename SampleFn>
BootstrapEstimate run_bootstrap(const Quadruplet& q, const BootstrapConfig& cfg,
                                StreamKind kind, SampleFn&& sample) {
  validate(cfg);
  const std::uint64_t base = derive_seed(cfg.seed, fnv1a64(q.id()), kind);
  std::vector<double> replicate_means(static_cast<std::size_t>(cfg.n_replicates));
  for (int r = 0; r < cfg.n_replicates; ++r) {
    Rng rng(derive_seed(base, static_cast<std::uint64_t>(r)));
    double sum = 0.0;
    for (int s = 0; s < cfg.n_samples; ++s) {
      double c = sample(rng);
      int redraws = 0;
      while (std::isnan(c)) {
        if (++redraws > cfg.max_redraws) {
          throw Error(Errc::ZeroNorm, "quadruplet " + q.id() + ": zero-norm vectors persisted after " +
                                          std::to_string(cfg.max_redraws) + " redraws");
        }
        c = sample(rng);
      }
      sum += c;
    }
    replicate_means[static_cast<std::size_t>(r)] = sum / cfg.n_samples;
  }
  return summarize_replicates(replicate_means, cfg.ci_level, cfg.n_samples, base);
}

void require_phones(const PhoneBank& bank, const Quadruplet& q) {
  for (const auto& p : q.phones) {
    if (!bank.contains(p)) {
      throw Error(Errc::MissingPhone, "quadruplet " + q.id() + ": phone '" + p +
                                          "' is not in the bank");
    }
  }
}

}  // namespace

std::string_view to_string(ClassMix mix) {
  switch (mix) {
    case ClassMix::ConsonantOnly: return "consonant";
    case ClassMix::VowelOnly: return "vowel";
    case ClassMix::Mixed: return "mixed";
  }
  return "mixed";
}

std::string Quadruplet::id() const {
  return phones[0] + "|" + phones[1] + "|" + phones[2] + "|" + phones[3];
}

std::vector<PhoneTuple> analogy_orbit(const PhoneTuple& tuple) {
  static constexpr std::array<std::array<int, 4>, 3> kGenerators{
      {{0, 2, 1, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}}};
  std::set<PhoneTuple> seen{tuple};
  std::vector<PhoneTuple> frontier{tuple};
  while (!frontier.empty()) {
    PhoneTuple t = frontier.back();
    frontier.pop_back();
    for (const auto& g : kGenerators) {
      PhoneTuple u{t[g[0]], t[g[1]], t[g[2]], t[g[3]]};
      if (seen.insert(u).second) frontier.push_back(u);
    }
  }
  return {seen.begin(), seen.end()};
}

PhoneTuple canonicalize(const PhoneTuple& tuple) {
  return analogy_orbit(tuple).front();
}

bool is_valid_quadruplet(const PhoneTuple& t, const FeatureTable& table) {
  const auto& h1 = table.binary(t[0]);
  const auto& h2 = table.binary(t[1]);
  const auto& h3 = table.binary(t[2]);
  const auto& h4 = table.binary(t[3]);
  if (h1 == h2 || h1 == h3) return false;
  return (h1 - h2) == (h3 - h4);
}

Quadruplet make_quadruplet(const PhoneTuple& tuple, const FeatureTable& table) {
  Quadruplet q;
  q.phones = tuple;
  q.delta = feature_delta(tuple[0], tuple[1], table);
  int vowels = 0;
  for (const auto& p : tuple) vowels += phone_class(p, table) == PhoneClass::Vowel;
  q.class_mix = vowels == 0 ? ClassMix::ConsonantOnly
                : vowels == 4 ? ClassMix::VowelOnly
                              : ClassMix::Mixed;
  q.max_pair_distance = std::max(phonological_distance(tuple[1], tuple[2], table),
                                 phonological_distance(tuple[1], tuple[3], table));
  const auto& h1 = table.ternary(tuple[0]);
  const auto& h2 = table.ternary(tuple[1]);
  const auto& h3 = table.ternary(tuple[2]);
  for (Eigen::Index i = 0; i < h1.size(); ++i) {
    if (h1[i] != h2[i] || h1[i] != h3[i]) q.active_features.push_back(static_cast<int>(i));
  }
  return q;
}

MiningResult mine_quadruplets(const FeatureTable& table, std::span<const std::string> vocab) {
  std::vector<std::string> phones(vocab.begin(), vocab.end());
  std::sort(phones.begin(), phones.end());
  phones.erase(std::unique(phones.begin(), phones.end()), phones.end());
  for (const auto& p : phones) {
    if (!table.contains(p)) {
      throw Error(Errc::UnknownPhone, "vocabulary phone '" + p + "' is not in the feature table");
    }
  }

  std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> buckets;
  for (std::size_t a = 0; a < phones.size(); ++a) {
    for (std::size_t b = 0; b < phones.size(); ++b) {
      if (a == b) continue;
      const auto delta = feature_delta(phones[a], phones[b], table);
      if ((delta.array() == 0).all()) continue;
      buckets[delta_key(delta)].emplace_back(a, b);
    }
  }

  MiningResult result;
  std::set<PhoneTuple> canonical;
  for (const auto& [key, pairs] : buckets) {
    for (const auto& [a, b] : pairs) {
      for (const auto& [c, d] : pairs) {
        if (table.binary(phones[a]) == table.binary(phones[c])) continue;
        ++result.raw_count;
        canonical.insert(canonicalize({phones[a], phones[b], phones[c], phones[d]}));
      }
    }
  }
  result.quadruplets.reserve(canonical.size());
  for (const auto& t : canonical) result.quadruplets.push_back(make_quadruplet(t, table));
  return result;
}

BootstrapEstimate bootstrap_cosine_analogy(const PhoneBank& bank, const Quadruplet& q,
                                           const BootstrapConfig& cfg) {
  require_phones(bank, q);
  const Pool p1 = pool_of(bank, q.phones[0]);
  const Pool p2 = pool_of(bank, q.phones[1]);
  const Pool p3 = pool_of(bank, q.phones[2]);
  const Pool p4 = pool_of(bank, q.phones[3]);
  Eigen::VectorXd target(bank.dims());
  return run_bootstrap(q, cfg, kAnalogy, [&](Rng& rng) {
    const auto i1 = static_cast<Eigen::Index>(draw_index(rng, p1.size()));
    const auto i2 = static_cast<Eigen::Index>(draw_index(rng, p2.size()));
    const auto i3 = static_cast<Eigen::Index>(draw_index(rng, p3.size()));
    const auto i4 = static_cast<Eigen::Index>(draw_index(rng, p4.size()));
    target.noalias() = p2.cols.col(i2) + p3.cols.col(i3) - p4.cols.col(i4);
    return cosine(p1.cols.col(i1), target);
  });
}

BootstrapEstimate bootstrap_cosine_same(const PhoneBank& bank, const Quadruplet& q,
                                        const BootstrapConfig& cfg) {
  if (!bank.contains(q.phones[0])) {
    throw Error(Errc::MissingPhone, "phone '" + q.phones[0] + "' is not in the bank");
  }
  const Pool p1 = pool_of(bank, q.phones[0]);
  if (p1.size() < 2) {
    throw Error(Errc::TooFewInstances,
                "same-phone baseline needs two instances of '" + q.phones[0] + "'");
  }
  return run_bootstrap(q, cfg, kSame, [&](Rng& rng) {
    const auto n = static_cast<std::size_t>(p1.size());
    const std::size_t i = draw_index(rng, n);
    std::size_t j = draw_index(rng, n - 1);
    if (j >= i) ++j;
    return cosine(p1.cols.col(static_cast<Eigen::Index>(i)),
                  p1.cols.col(static_cast<Eigen::Index>(j)));
  });
}

BootstrapEstimate bootstrap_cosine_diff(const PhoneBank& bank, const Quadruplet& q,
                                        const BootstrapConfig& cfg) {
  if (!bank.contains(q.phones[0])) {
    throw Error(Errc::MissingPhone, "phone '" + q.phones[0] + "' is not in the bank");
  }
  std::vector<Pool> others;
  for (const auto& p : bank.phones()) {
    if (p != q.phones[0]) others.push_back(pool_of(bank, p));
  }
  if (others.empty()) {
    throw Error(Errc::TooFewPhoneTypes, "different-phone baseline needs two phone types");
  }
  const Pool p1 = pool_of(bank, q.phones[0]);
  return run_bootstrap(q, cfg, kDiff, [&](Rng& rng) {
    const auto i = static_cast<Eigen::Index>(draw_index(rng, p1.size()));
    const Pool& other = others[draw_index(rng, others.size())];
    const auto j = static_cast<Eigen::Index>(draw_index(rng, other.size()));
    return cosine(p1.cols.col(i), other.cols.col(j));
  });
}

bool judge_success(const BootstrapEstimate& diff, const BootstrapEstimate& analogy,
                   const BootstrapEstimate& same) {
  return diff.ci_high < analogy.ci_low && analogy.ci_high < same.ci_low;
}

AnalogyResult evaluate_quadruplet(const PhoneBank& bank, const Quadruplet& q,
                                  const BootstrapConfig& cfg) {
  AnalogyResult r;
  r.quadruplet = q;
  r.est_analogy = bootstrap_cosine_analogy(bank, q, cfg);
  r.est_same = bootstrap_cosine_same(bank, q, cfg);
  r.est_diff = bootstrap_cosine_diff(bank, q, cfg);
  r.success = judge_success(r.est_diff, r.est_analogy, r.est_same);
  return r;
}

std::vector<AnalogyResult> evaluate_quadruplets(const PhoneBank& bank,
                                                std::span<const Quadruplet> quads,
                                                const BootstrapConfig& cfg, int jobs) {
  std::vector<AnalogyResult> out(quads.size());
  parallel_for(quads.size(), jobs,
               [&](std::size_t i) { out[i] = evaluate_quadruplet(bank, quads[i], cfg); });
  return out;
}

double success_rate(std::span<const AnalogyResult> results) {
  if (results.empty()) throw Error(Errc::EmptyInput, "success rate of an empty result set");
  const auto hits = std::count_if(results.begin(), results.end(),
                                  [](const AnalogyResult& r) { return r.success; });
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

BootstrapEstimate averaged_similarity(std::span<const AnalogyResult> results,
                                      double ci_level) {
  if (results.empty()) {
    throw Error(Errc::EmptyInput, "averaged similarity of an empty result set");
  }
  std::vector<double> means;
  means.reserve(results.size());
  for (const auto& r : results) means.push_back(r.est_analogy.mean);
  const double m = mean(means);
  const double se = sample_stddev(means) / std::sqrt(static_cast<double>(means.size()));
  const double half = normal_quantile(0.5 + ci_level / 2) * se;
  return {m, m - half, m + half, static_cast<int>(means.size()), 0, 0};
}

StratifyMode parse_stratify_mode(std::string_view text) {
  if (text == "cv-class") return StratifyMode::CvClass;
  if (text == "feature") return StratifyMode::Feature;
  if (text == "distance-bin") return StratifyMode::DistanceBin;
  throw Error(Errc::UnknownMode, "unknown stratification mode '" + std::string(text) + "'");
}

std::map<std::string, Stratum> stratify(std::span<const AnalogyResult> results,
                                        StratifyMode mode, const FeatureTable& table) {
  struct Acc {
    std::size_t n = 0, hits = 0;
    double sim = 0.0;
  };
  std::map<std::string, Acc> acc;
  auto add = [&](const std::string& key, const AnalogyResult& r) {
    auto& a = acc[key];
    ++a.n;
    a.hits += r.success;
    a.sim += r.est_analogy.mean;
  };
  for (const auto& r : results) {
    const auto& q = r.quadruplet;
    switch (mode) {
      case StratifyMode::CvClass:
        if (q.class_mix != ClassMix::Mixed) add(std::string(to_string(q.class_mix)), r);
        break;
      case StratifyMode::Feature:
        if (q.class_mix == ClassMix::Mixed) break;
        for (int i : q.active_features) {
          add(std::string(to_string(q.class_mix)) + ":" +
                  table.features()[static_cast<std::size_t>(i)],
              r);
        }
        break;
      case StratifyMode::DistanceBin:
        add("dist=" + std::to_string(q.max_pair_distance), r);
        break;
    }
  }
  std::map<std::string, Stratum> out;
  for (const auto& [key, a] : acc) {
    out[key] = {a.n, static_cast<double>(a.hits) / static_cast<double>(a.n),
                a.sim / static_cast<double>(a.n)};
  }
  return out;
}

}  // namespace phonovec
