#include <sstream>

#include <gtest/gtest.h>

#include "phonovec/error.hpp"
#include "phonovec/feature_system.hpp"

using namespace phonovec;

namespace {

Errc parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    FeatureTable::parse(in);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::Io;
}

}  // namespace

TEST(Extend, TernaryToBinaryPairs) {
  TernaryVector h(3);
  h << 1, 0, -1;
  BinaryFeatureVector expected(6);
  expected << 1, 0, 0, 0, 0, 1;
  EXPECT_EQ(extend(h), expected);
}

TEST(FeatureTable, ParsesToyTable) {
  std::istringstream in("# toy\nipa\tvoi\tlab\nb\t+\t+\np\t-\t+\n\nd\t+\t\xE2\x88\x92\n");
  const auto t = FeatureTable::parse(in);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.num_features(), 2);
  EXPECT_EQ(t.ternary("d")[1], -1);
  EXPECT_EQ(t.phones(), (std::vector<std::string>{"b", "d", "p"}));
  EXPECT_EQ(phonological_distance("b", "p", t), 1);
  EXPECT_EQ(phonological_distance("p", "d", t), 2);
}

TEST(FeatureTable, RoundTripsThroughWrite) {
  const auto& t = FeatureTable::bundled();
  std::stringstream buf;
  t.write(buf);
  EXPECT_EQ(FeatureTable::parse(buf), t);
}

TEST(FeatureTable, ParseErrors) {
  EXPECT_EQ(parse_error("ipa\tvoi\n"), Errc::EmptyTable);
  EXPECT_EQ(parse_error("ipa\tvoi\nb\t+\nb\t-\n"), Errc::DuplicatePhone);
  EXPECT_EQ(parse_error("ipa\tvoi\tlab\nb\t+\n"), Errc::ArityMismatch);
  EXPECT_EQ(parse_error("ipa\tvoi\nb\tx\n"), Errc::BadFeatureValue);
}

TEST(FeatureTable, UnknownPhoneAndFeature) {
  const auto& t = FeatureTable::bundled();
  try {
    t.ternary("not-a-phone");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownPhone);
  }
  EXPECT_THROW(t.feature_index("sparkle"), Error);
}

TEST(FeatureTable, BundledSnapshot) {
  const auto& t = FeatureTable::bundled();
  EXPECT_EQ(t.num_features(), 21);
  EXPECT_GT(t.size(), 100u);
  // b and p differ only in voicing.
  const auto d = feature_delta("b", "p", t);
  EXPECT_EQ(d.cwiseAbs().sum(), 2);
  EXPECT_EQ(d[2 * t.feature_index("voice")], 1);
  EXPECT_EQ(t.feature_index("high"), t.feature_index("hi"));
}

TEST(PhoneClass, SyllabicIsVowel) {
  const auto& t = FeatureTable::bundled();
  EXPECT_EQ(phone_class("a", t), PhoneClass::Vowel);
  EXPECT_EQ(phone_class("t", t), PhoneClass::Consonant);
  EXPECT_EQ(phone_class("l̩", t), PhoneClass::Vowel);
  EXPECT_TRUE(is_syllabic_consonant("l̩", t));
  EXPECT_FALSE(is_syllabic_consonant("a", t));
}

TEST(PhoneClass, NamesRoundTrip) {
  EXPECT_EQ(parse_phone_class(to_string(PhoneClass::Vowel)), PhoneClass::Vowel);
  EXPECT_EQ(parse_phone_class("consonant"), PhoneClass::Consonant);
}
