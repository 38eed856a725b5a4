// Copyright 2026 The codecwb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <codecwb/common.hpp>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

using namespace codecwb;

TEST(Mix64, MatchesSplitmix64ReferenceOutput) {
  // First output of the reference splitmix64 generator with state 0.
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Fnv1a64, KnownVectors) {
  EXPECT_EQ(fnv1a64(std::string_view("")), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64(std::string_view("a")), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64(std::string_view("foobar")), 0x85944171f73967e8ULL);
}

TEST(Hex64, SixteenLowercaseDigits) {
  EXPECT_EQ(hex64(0), "0000000000000000");
  EXPECT_EQ(hex64(0xDEADBEEFULL), "00000000deadbeef");
}

TEST(DeriveSeed, StreamsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(42, "split"), derive_seed(42, "split"));
  EXPECT_NE(derive_seed(42, "split"), derive_seed(42, "init"));
  EXPECT_NE(derive_seed(42, "split"), derive_seed(43, "split"));
  EXPECT_NE(derive_seed(42, "batching", 0), derive_seed(42, "batching", 1));
  const std::uint64_t expect =
      mix64(mix64(42 ^ fnv1a64(std::string_view("split"))) + 3 * 0x9e3779b97f4a7c15ULL);
  EXPECT_EQ(derive_seed(42, "split", 3), expect);
}

TEST(Rng, EngineIsStandardMt19937_64) {
  // The standard requires the 10000th output of a default-seeded
  // mt19937_64 to be this value.
  Rng rng(5489);
  for (int i = 0; i < 9999; ++i) rng.next();
  EXPECT_EQ(rng.next(), 9981545732273789042ULL);
}

TEST(Rng, UniformInHalfOpenUnitInterval) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, BelowCoversRangeUniformly) {
  Rng rng(2);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[rng.below(7)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
  EXPECT_THROW(rng.below(0), InvalidArgument);
}

TEST(Rng, NormalMoments) {
  Rng rng(3);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(4);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  std::vector<int> id(100);
  std::iota(id.begin(), id.end(), 0);
  EXPECT_NE(v, id);
}

TEST(Labels, RoundTrip) {
  EXPECT_EQ(parse_label(to_string(Label::kBonafide)), Label::kBonafide);
  EXPECT_EQ(parse_label(to_string(Label::kSpoof)), Label::kSpoof);
  EXPECT_THROW(parse_label("maybe"), FormatError);
}

TEST(FormatDouble, RoundTripsExactly) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(F32Blocks, LittleEndianRoundTrip) {
  std::stringstream buf;
  const std::vector<float> values{1.0f, -2.5f, 3.25e-7f};
  write_f32_le(buf, values);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 12u);
  // 1.0f = 0x3f800000, least significant byte first.
  EXPECT_EQ(static_cast<unsigned char>(bytes[3]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(bytes[2]), 0x80);
  std::vector<float> back(3);
  read_f32_le(buf, back);
  EXPECT_EQ(back, values);
  std::vector<float> more(1);
  EXPECT_THROW(read_f32_le(buf, more), FormatError);
}

TEST(TextHeader, ParsesUntilEnd) {
  std::istringstream in("alpha 1\nbeta two words\nend\nrest");
  const auto h = read_text_header(in, "mem");
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(header_value(h, "beta", "mem"), "two words");
  EXPECT_THROW(header_value(h, "gamma", "mem"), FormatError);
  std::istringstream missing_end("alpha 1\n");
  EXPECT_THROW(read_text_header(missing_end, "mem"), FormatError);
}
