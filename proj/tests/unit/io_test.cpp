#include <gtest/gtest.h>

#include <string>

#include "tailfactor/error.hpp"
#include "tailfactor/io.hpp"

namespace tf = tailfactor;

namespace {

std::string message_of(const std::string& text) {
  try {
    tf::parse_csv(text, "obs.csv");
  } catch (const tf::InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Csv, HeaderAndBody) {
  const auto t = tf::parse_csv("a,b\n1,2\n3.5,-4e-1\n", "x");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.values.rows(), 2);
  EXPECT_EQ(t.values(1, 1), -0.4);
  const auto bare = tf::parse_csv("1,2\n3,4\n", "x");
  EXPECT_TRUE(bare.header.empty());
  EXPECT_EQ(bare.values.rows(), 2);
}

TEST(Csv, LineNumberedErrors) {
  EXPECT_EQ(message_of("a,b\n1,2\n3,x\n"), "obs.csv:3: non-numeric value 'x' in column 2");
  EXPECT_EQ(message_of("a,b\n1,2\n3\n"), "obs.csv:3: expected 2 fields, found 1");
  EXPECT_EQ(message_of("a,b\n1,NA\n"), "obs.csv:2: missing value in column 2");
  EXPECT_EQ(message_of("a,b\n"), "obs.csv: no data rows");
}

TEST(CapacityWeights, RenormalizeOrReject) {
  std::vector<std::string> warnings;
  const auto w = tf::normalize_capacity_weights({0.5, 0.5000005}, &warnings);
  EXPECT_NEAR(w[0] + w[1], 1.0, 1e-15);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_THROW(tf::normalize_capacity_weights({2.0, 2.0}), tf::InputError);
  EXPECT_THROW(tf::normalize_capacity_weights({1.5, -0.5}), tf::InputError);
  warnings.clear();
  tf::normalize_capacity_weights({0.25, 0.75}, &warnings);
  EXPECT_TRUE(warnings.empty());
}

TEST(Thresholds, ScalarBroadcast) {
  EXPECT_EQ(tf::broadcast_thresholds({3.0}, 4), std::vector<double>(4, 3.0));
  EXPECT_EQ(tf::broadcast_thresholds({1.0, 2.0}, 2), (std::vector<double>{1.0, 2.0}));
  EXPECT_THROW(tf::broadcast_thresholds({1.0, 2.0}, 3), tf::InputError);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(tf::format_real(0.1), "0.1");
  EXPECT_EQ(tf::format_real(1.0 / 3.0), "0.3333333333333333");
  tf::Matrix m(1, 2);
  m << 1.0, 0.25;
  EXPECT_EQ(tf::format_csv({"a", "b"}, m), "a,b\n1,0.25\n");
}
