#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "phonovec/analogy.hpp"
#include "test_util.hpp"

using namespace phonovec;

namespace {

BootstrapConfig small_config(std::uint64_t seed) {
  BootstrapConfig cfg;
  cfg.n_samples = 200;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Orbit, EightMembersSharingOneCanonicalForm) {
  const PhoneTuple t{"b", "p", "d", "t"};
  const auto orbit = analogy_orbit(t);
  EXPECT_EQ(std::set<PhoneTuple>(orbit.begin(), orbit.end()).size(), 8u);
  for (const auto& member : orbit) EXPECT_EQ(canonicalize(member), canonicalize(t));
  EXPECT_EQ(canonicalize(t), (PhoneTuple{"b", "d", "p", "t"}));
}

TEST(Orbit, SymmetriesPreserveValidity) {
  const auto& table = FeatureTable::bundled();
  for (const auto& member : analogy_orbit({"b", "p", "d", "t"})) {
    EXPECT_TRUE(is_valid_quadruplet(member, table));
  }
  EXPECT_FALSE(is_valid_quadruplet({"b", "b", "d", "d"}, table));
  EXPECT_FALSE(is_valid_quadruplet({"b", "p", "b", "p"}, table));
  EXPECT_FALSE(is_valid_quadruplet({"b", "p", "d", "k"}, table));
}

TEST(Mining, VoicingPlaceExample) {
  const auto& table = FeatureTable::bundled();
  const std::vector<std::string> vocab{"b", "p", "d", "t"};
  const auto mined = mine_quadruplets(table, vocab);
  ASSERT_EQ(mined.quadruplets.size(), 1u);
  EXPECT_EQ(mined.quadruplets[0].phones, (PhoneTuple{"b", "d", "p", "t"}));
  EXPECT_EQ(mined.raw_count, 8u);
  EXPECT_EQ(mined.quadruplets[0].class_mix, ClassMix::ConsonantOnly);
}

TEST(Mining, SinglePhoneAndUnknownPhone) {
  const auto& table = FeatureTable::bundled();
  const std::vector<std::string> one{"b"};
  EXPECT_TRUE(mine_quadruplets(table, one).quadruplets.empty());
  const std::vector<std::string> bad{"b", "no-such-phone"};
  EXPECT_ERRC(mine_quadruplets(table, bad), Errc::UnknownPhone);
}

TEST(Mining, HashJoinEqualsBruteForce) {
  Rng rng(99);
  for (int t = 0; t < 10; ++t) {
    const auto table = oracle::random_table(rng, 10, 3 + t % 3);
    const auto vocab = table.phones();
    const auto mined = mine_quadruplets(table, vocab);
    const auto oracle_set = oracle::brute_force_mine(table, vocab);
    std::set<oracle::Tuple> got;
    for (const auto& q : mined.quadruplets) got.insert(q.phones);
    EXPECT_EQ(got, oracle_set.canonical) << "table " << t;
    EXPECT_EQ(mined.raw_count, oracle_set.ordered);
  }
}

TEST(Mining, QuadrupletMetadata) {
  const auto& table = FeatureTable::bundled();
  const auto q = make_quadruplet({"b", "d", "p", "t"}, table);
  EXPECT_EQ(q.max_pair_distance,
            std::max(phonological_distance("d", "p", table), phonological_distance("d", "t", table)));
  std::set<std::string> active;
  for (int i : q.active_features) active.insert(table.features()[i]);
  EXPECT_TRUE(active.count("voi"));
  EXPECT_TRUE(active.count("cor"));
  EXPECT_FALSE(active.count("syl"));
  EXPECT_EQ(q.id(), "b|d|p|t");
}

TEST(Bootstrap, ExactAnalogyIsOrderedAndSucceeds) {
  const auto bank = oracle::feature_bank({"b", "p", "d", "t", "m", "n"}, 0.01, 60, 1);
  const auto q = make_quadruplet({"b", "d", "p", "t"}, FeatureTable::bundled());
  const auto r = evaluate_quadruplet(bank, q, small_config(5));
  EXPECT_TRUE(r.success);
  EXPECT_LT(r.est_diff.ci_high, r.est_analogy.ci_low);
  EXPECT_LT(r.est_analogy.ci_high, r.est_same.ci_low);
  EXPECT_GT(r.est_analogy.mean, 0.99);
  EXPECT_EQ(r.est_analogy.n_replicates, 10);
}

TEST(Bootstrap, DeterministicUnderSeedAndJobs) {
  const auto bank = oracle::feature_bank({"b", "p", "d", "t", "ɡ", "k"}, 0.3, 30, 2);
  const auto& table = FeatureTable::bundled();
  const std::vector<std::string> vocab{"b", "p", "d", "t", "ɡ", "k"};
  const auto quads = mine_quadruplets(table, vocab).quadruplets;
  const auto a = evaluate_quadruplets(bank, quads, small_config(9), 1);
  const auto b = evaluate_quadruplets(bank, quads, small_config(9), 8);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].est_analogy.mean, b[i].est_analogy.mean);
    EXPECT_EQ(a[i].est_diff.ci_low, b[i].est_diff.ci_low);
  }
  const auto c = evaluate_quadruplets(bank, quads, small_config(10), 1);
  EXPECT_NE(a[0].est_analogy.mean, c[0].est_analogy.mean);
}

TEST(Bootstrap, SingleInstanceCannotGiveSameBaseline) {
  std::map<std::string, Eigen::MatrixXd> m;
  for (const char* p : {"b", "p", "d", "t"}) m[p] = Eigen::MatrixXd::Random(1, 4);
  const auto bank = PhoneBank::from_matrices(m);
  const auto q = make_quadruplet({"b", "d", "p", "t"}, FeatureTable::bundled());
  EXPECT_ERRC(bootstrap_cosine_same(bank, q, small_config(1)), Errc::TooFewInstances);
}

TEST(Bootstrap, ZeroVectorsExhaustRedraws) {
  std::map<std::string, Eigen::MatrixXd> m;
  for (const char* p : {"b", "p", "d", "t"}) m[p] = Eigen::MatrixXd::Zero(3, 4);
  const auto bank = PhoneBank::from_matrices(m);
  const auto q = make_quadruplet({"b", "d", "p", "t"}, FeatureTable::bundled());
  EXPECT_ERRC(bootstrap_cosine_analogy(bank, q, small_config(1)), Errc::ZeroNorm);
}

TEST(Success, CiOrderingRule) {
  BootstrapEstimate diff{0.1, 0.05, 0.15}, ana{0.5, 0.45, 0.55}, same{0.9, 0.85, 0.95};
  EXPECT_TRUE(judge_success(diff, ana, same));
  BootstrapEstimate overlap{0.5, 0.4, 0.9};
  EXPECT_FALSE(judge_success(diff, overlap, same));
  EXPECT_FALSE(judge_success(ana, diff, same));
}

TEST(Aggregates, SuccessRateAndAveragedSimilarity) {
  std::vector<AnalogyResult> rs(4);
  const double means[] = {0.2, 0.4, 0.6, 0.8};
  for (int i = 0; i < 4; ++i) {
    rs[i].est_analogy.mean = means[i];
    rs[i].success = i % 2 == 0;
  }
  EXPECT_DOUBLE_EQ(success_rate(rs), 0.5);
  const auto sim = averaged_similarity(rs, 0.99);
  EXPECT_DOUBLE_EQ(sim.mean, 0.5);
  const double se = std::sqrt(0.2 / 3.0) / 2.0;
  EXPECT_NEAR(sim.ci_high - sim.mean, 2.5758293035489004 * se, 1e-12);
  EXPECT_ERRC(success_rate(std::vector<AnalogyResult>{}), Errc::EmptyInput);
}

TEST(Stratify, DistanceBinsPartition) {
  const auto& table = FeatureTable::bundled();
  const std::vector<std::string> vocab{"b", "p", "d", "t", "ɡ", "k", "m", "n", "a", "i", "u"};
  std::vector<AnalogyResult> rs;
  for (const auto& q : mine_quadruplets(table, vocab).quadruplets) {
    AnalogyResult r;
    r.quadruplet = q;
    rs.push_back(r);
  }
  std::size_t total = 0;
  for (const auto& [key, s] : stratify(rs, StratifyMode::DistanceBin, table)) total += s.n_quads;
  EXPECT_EQ(total, rs.size());

  std::size_t classed = 0, unmixed = 0;
  for (const auto& [key, s] : stratify(rs, StratifyMode::CvClass, table)) {
    EXPECT_TRUE(key == "consonant" || key == "vowel");
    classed += s.n_quads;
  }
  for (const auto& r : rs) unmixed += r.quadruplet.class_mix != ClassMix::Mixed;
  EXPECT_EQ(classed, unmixed);

  for (const auto& [key, s] : stratify(rs, StratifyMode::Feature, table)) {
    EXPECT_NE(key.find(':'), std::string::npos);
  }
  EXPECT_ERRC(parse_stratify_mode("by-moon"), Errc::UnknownMode);
}
