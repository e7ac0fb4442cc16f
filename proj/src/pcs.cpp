#include "phonovec/pcs.hpp"

#include <algorithm>
#include <map>

#include "phonovec/error.hpp"
#include "phonovec/random.hpp"
#include "phonovec/stats.hpp"

namespace phonovec {

namespace {

// A permutation without fixed points, uniformly over shuffles with rejection.
std::vector<std::size_t> derangement(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[draw_index(rng, i)]);
    bool fixed = false;
    for (std::size_t i = 0; i < n && !fixed; ++i) fixed = perm[i] == i;
    if (!fixed) return perm;
  }
}

bool positive_direction(const FeatureDelta& delta) {
  for (Eigen::Index i = 0; i < delta.size(); ++i) {
    if (delta[i] != 0) return delta[i] > 0;
  }
  return false;
}

}  // namespace

std::string delta_label(const FeatureDelta& delta, const FeatureTable& table) {
  // Per feature, (d_plus, d_minus) determines the two ternary values.
  auto values = [](int plus, int minus) -> const char* {
    if (plus == 1 && minus == -1) return "+/-";
    if (plus == -1 && minus == 1) return "-/+";
    if (plus == 1) return "+/0";
    if (plus == -1) return "0/+";
    if (minus == 1) return "-/0";
    return "0/-";
  };
  std::string out;
  for (Eigen::Index i = 0; i < table.num_features(); ++i) {
    const int plus = delta[2 * i];
    const int minus = delta[2 * i + 1];
    if (plus == 0 && minus == 0) continue;
    if (!out.empty()) out += ' ';
    out += table.features()[static_cast<std::size_t>(i)];
    out += values(plus, minus);
  }
  return out;
}

PcsResult pairing_consistency(const PhoneBank& bank, const FeatureTable& table,
                              const PcsConfig& cfg) {
  std::vector<std::string> phones;
  for (const auto& p : bank.phones()) {
    if (table.contains(p)) phones.push_back(p);
  }
  std::map<std::string, Eigen::VectorXd> means;
  for (const auto& p : phones) means.emplace(p, bank.mean(p));

  // Groups keyed by the delta bytes so iteration order is fixed.
  std::map<std::string, std::pair<FeatureDelta, std::vector<std::pair<std::string, std::string>>>>
      groups;
  for (const auto& a : phones) {
    for (const auto& b : phones) {
      if (a == b) continue;
      FeatureDelta delta = feature_delta(a, b, table);
      if ((delta.array() == 0).all() || !positive_direction(delta)) continue;
      std::string key(reinterpret_cast<const char*>(delta.data()),
                      static_cast<std::size_t>(delta.size()));
      auto& g = groups[key];
      g.first = delta;
      g.second.emplace_back(a, b);
    }
  }

  PcsResult result;
  std::vector<double> all_pos, all_neg;
  for (const auto& [key, group] : groups) {
    const auto& [delta, pairs] = group;
    const std::string label = delta_label(delta, table);
    if (pairs.size() < 2) {
      result.skipped.push_back(label);
      continue;
    }
    PcsCategory cat;
    cat.label = label;
    cat.pairs = pairs;
    const std::size_t k = pairs.size();
    std::vector<Eigen::VectorXd> offsets(k);
    for (std::size_t i = 0; i < k; ++i) {
      offsets[i] = means.at(pairs[i].first) - means.at(pairs[i].second);
    }
    // Mean correct offset over pairs disjoint from {first, second}.
    auto reference = [&](const std::string& first, const std::string& second)
        -> std::optional<Eigen::VectorXd> {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(bank.dims());
      int n = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const auto& [a, b] = pairs[j];
        if (a == first || a == second || b == first || b == second) continue;
        sum += offsets[j];
        ++n;
      }
      if (n == 0) return std::nullopt;
      return Eigen::VectorXd(sum / n);
    };
    for (std::size_t i = 0; i < k; ++i) {
      if (auto ref = reference(pairs[i].first, pairs[i].second)) {
        const double s = cosine(offsets[i], *ref);
        if (!std::isnan(s)) cat.correct_scores.push_back(s);
      }
    }
    Rng rng(derive_seed(cfg.seed, fnv1a64(key)));
    for (int s = 0; s < cfg.shuffles; ++s) {
      const auto perm = derangement(k, rng);
      for (std::size_t i = 0; i < k; ++i) {
        const std::string& a = pairs[i].first;
        const std::string& b = pairs[perm[i]].second;
        if (a == b) continue;
        if (auto ref = reference(a, b)) {
          const double score = cosine(means.at(a) - means.at(b), *ref);
          if (!std::isnan(score)) cat.mismatched_scores.push_back(score);
        }
      }
    }
    if (!cat.correct_scores.empty() && !cat.mismatched_scores.empty()) {
      cat.auc = roc_auc(cat.correct_scores, cat.mismatched_scores);
    }
    all_pos.insert(all_pos.end(), cat.correct_scores.begin(), cat.correct_scores.end());
    all_neg.insert(all_neg.end(), cat.mismatched_scores.begin(), cat.mismatched_scores.end());
    result.categories.push_back(std::move(cat));
  }
  if (all_pos.empty() || all_neg.empty()) {
    throw Error(Errc::EmptyInput,
                "pairing consistency needs categories with at least two phone pairs");
  }
  result.overall_auc = roc_auc(all_pos, all_neg);
  result.n_correct = all_pos.size();
  result.n_mismatched = all_neg.size();
  return result;
}

}  // namespace phonovec
