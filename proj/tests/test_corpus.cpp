#include <gtest/gtest.h>

#include "phonovec/corpus.hpp"
#include "phonovec/random.hpp"
#include "test_util.hpp"

using namespace phonovec;

namespace {

RepresentationMatrix random_rep(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  RepresentationMatrix rep;
  rep.data.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) rep.data(i, j) = static_cast<float>(draw_normal(rng));
  return rep;
}

// Row mean accumulated one element at a time.
Eigen::VectorXd loop_mean(const FrameMatrix& m, Eigen::Index b, Eigen::Index e) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = 0;
    for (Eigen::Index i = b; i < e; ++i) s += m(i, j);
    out[j] = s / static_cast<double>(e - b);
  }
  return out;
}

}  // namespace

TEST(FrameRange, FloorAndCeil) {
  // 20 ms frames: [0.03, 0.07) covers frames 1..3.
  EXPECT_EQ(frame_range(0.03, 0.07, 320, 16000, 50), (FrameRange{1, 4}));
  EXPECT_EQ(frame_range(0.04, 0.08, 320, 16000, 50), (FrameRange{2, 4}));
}

TEST(FrameRange, ShortSegmentGetsOneFrame) {
  EXPECT_EQ(frame_range(0.041, 0.041, 320, 16000, 50), (FrameRange{2, 3}));
}

TEST(FrameRange, EndClampedAndStartChecked) {
  EXPECT_EQ(frame_range(0.9, 1.2, 320, 16000, 49), (FrameRange{45, 49}));
  EXPECT_ERRC(frame_range(1.0, 1.1, 320, 16000, 50), Errc::SegmentOutOfRange);
}

TEST(Pooling, MatchesRowMeanOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index T = 1 + static_cast<Eigen::Index>(draw_index(rng, 60));
    const Eigen::Index F = 1 + static_cast<Eigen::Index>(draw_index(rng, 24));
    auto rep = random_rep(rng, T, F);
    const double seconds = static_cast<double>(T) * 0.02;
    SegmentRecord seg;
    if (trial % 10 == 0) {
      seg.t_start = 0, seg.t_end = seconds;  // whole matrix
    } else if (trial % 10 == 1) {
      seg.t_start = seg.t_end = draw_unit(rng) * seconds * 0.999;  // single frame
    } else {
      seg.t_start = draw_unit(rng) * seconds * 0.999;
      seg.t_end = seg.t_start + draw_unit(rng) * (seconds - seg.t_start);
    }
    const auto r = frame_range(seg, rep);
    const auto pooled = slice_and_pool(rep, seg);
    const auto oracle = loop_mean(rep.data, r.begin, r.end);
    ASSERT_LE((pooled - oracle).norm(), 1e-6 * std::max(1.0, oracle.norm())) << trial;
  }
}

TEST(Pooling, EmptyRangeRejected) {
  FrameMatrix m = FrameMatrix::Ones(3, 2);
  EXPECT_ERRC(average_pool(m, FrameRange{2, 2}), Errc::EmptySlice);
  EXPECT_ERRC(average_pool(m, FrameRange{1, 4}), Errc::EmptySlice);
}

TEST(SegmentRules, MergesClosureAndDropsDiphthongs) {
  BankFilters f = timit_filters();
  std::vector<SegmentRecord> segs{
      {"u", "bcl", 0.10, 0.15, "", ""}, {"u", "b", 0.15, 0.18, "", ""},
      {"u", "ay", 0.18, 0.30, "", ""},  {"u", "tcl", 0.30, 0.35, "", ""},
      {"u", "s", 0.35, 0.40, "", ""},   {"u", "iy", 0.0, 0.1, "", ""}};
  const auto out = apply_segment_rules(segs, f);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0].phone, "i");
  EXPECT_EQ(out[1].phone, "b");
  EXPECT_DOUBLE_EQ(out[1].t_start, 0.10);
  EXPECT_DOUBLE_EQ(out[1].t_end, 0.18);
  EXPECT_EQ(out[2].phone, "tcl");  // no release follows
  EXPECT_EQ(out[3].phone, "s");
}

TEST(SegmentRules, AffricateClosures) {
  BankFilters f = timit_filters();
  std::vector<SegmentRecord> segs{{"u", "dcl", 0.0, 0.05, "", ""}, {"u", "jh", 0.05, 0.1, "", ""}};
  const auto out = apply_segment_rules(segs, f);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].phone, "d͡ʒ");
}

TEST(PhoneBank, MinOccurrencesAndMissingUtterance) {
  TempDir dir;
  Rng rng(3);
  std::vector<SegmentRecord> segs;
  for (int k = 0; k < 3; ++k) segs.push_back({"u", "a", 0.02 * k, 0.02 * (k + 1), "", ""});
  segs.push_back({"u", "b", 0.06, 0.08, "", ""});
  write_rep_dump(dir.path(), segs, {{"u", random_rep(rng, 4, 5)}});
  RepDump dump(dir.path());
  BankFilters f;
  f.min_occurrences = 2;
  const auto bank = build_phone_bank(dump, f);
  EXPECT_EQ(bank.phones(), std::vector<std::string>{"a"});
  EXPECT_EQ(bank.count("a"), 3);
  EXPECT_EQ(bank.dims(), 5);
  EXPECT_ERRC(bank.instances("b"), Errc::MissingPhone);

  f.min_occurrences = 4;
  EXPECT_ERRC(build_phone_bank(dump, f), Errc::NoSegments);

  segs.push_back({"v", "a", 0, 0.02, "", ""});
  write_manifest(dir / "manifest.jsonl", segs);
  f.min_occurrences = 1;
  EXPECT_ERRC(build_phone_bank(RepDump(dir.path()), f), Errc::MissingUtterance);
}

TEST(PhoneBank, IndependentOfJobs) {
  TempDir dir;
  Rng rng(5);
  std::vector<SegmentRecord> segs;
  std::vector<std::pair<std::string, RepresentationMatrix>> reps;
  for (int u = 0; u < 20; ++u) {
    const std::string id = "u" + std::to_string(u);
    for (int k = 0; k < 5; ++k) segs.push_back({id, k % 2 ? "a" : "b", 0.02 * k, 0.02 * k + 0.03, "", ""});
    reps.emplace_back(id, random_rep(rng, 6, 4));
  }
  write_rep_dump(dir.path(), segs, reps);
  BankFilters f;
  f.min_occurrences = 1;
  RepDump dump(dir.path());
  const auto one = build_phone_bank(dump, f, 1);
  const auto many = build_phone_bank(dump, f, 8);
  EXPECT_EQ(one.instances("a"), many.instances("a"));
  EXPECT_EQ(one.instances("b"), many.instances("b"));
}
