/*
 * Copyright 2026 The shep-xai Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "shep/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "gtest/gtest.h"

namespace shep {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(PeriodicImpulseTest, FirstPeriodIsOneDampedSinusoid) {
  const ComponentSpec c{.f_m = 50.0, .f_c = 1500.0, .beta = 0.04};
  const double fs = 10000.0, phi = 0.7;
  const auto s = PeriodicImpulse(c, phi, fs, 2000);
  for (std::size_t i = 0; i < 200; ++i) {
    const double expect = std::exp(-0.04 * i) * std::sin(2.0 * kPi * 1500.0 * i / fs + phi);
    EXPECT_NEAR(s.samples[i], expect, 1e-12) << i;
  }
}

TEST(PeriodicImpulseTest, LaterImpulsesSuperpose) {
  const ComponentSpec c{.f_m = 100.0, .f_c = 2500.0, .beta = 0.04};
  const double fs = 10000.0;
  const auto s = PeriodicImpulse(c, 0.0, fs, 400);
  for (std::size_t i = 100; i < 200; ++i) {
    const double a = std::exp(-0.04 * i) * std::sin(2.0 * kPi * 2500.0 * i / fs);
    const double m = static_cast<double>(i - 100);
    const double b = std::exp(-0.04 * m) * std::sin(2.0 * kPi * 2500.0 * m / fs);
    EXPECT_NEAR(s.samples[i], a + b, 1e-12) << i;
  }
}

TEST(PeriodicImpulseTest, RejectsBadParameters) {
  EXPECT_THROW(PeriodicImpulse({.f_m = 0.0}, 0.0, 1000.0, 10), ParameterError);
  EXPECT_THROW(PeriodicImpulse({.f_m = 10.0, .f_c = 600.0}, 0.0, 1000.0, 10), ParameterError);
  EXPECT_THROW(PeriodicImpulse({.beta = -1.0}, 0.0, 10000.0, 10), ParameterError);
  EXPECT_THROW(PeriodicImpulse({}, 0.0, 10000.0, 0), ParameterError);
}

TEST(NoiseTest, SnrMatchesWithinFivePercent) {
  Rng rng(20260101);
  const auto clean = PeriodicImpulse({}, 0.3, 10000.0, 20000);
  for (double snr : {-5.0, 0.0, 10.0}) {
    const auto noisy = AddWhiteNoise(clean, snr, rng);
    std::vector<double> noise(clean.size());
    for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = noisy.samples[i] - clean.samples[i];
    const double target = MeanPower(clean.samples) / std::pow(10.0, snr / 10.0);
    EXPECT_NEAR(MeanPower(noise) / target, 1.0, 0.05) << snr;
  }
}

TEST(NoiseTest, InfiniteSnrIsNoiseless) {
  Rng rng(1);
  const auto clean = PeriodicImpulse({}, 0.3, 10000.0, 500);
  EXPECT_EQ(AddWhiteNoise(clean, std::numeric_limits<double>::infinity(), rng).samples, clean.samples);
}

TEST(NoiseTest, ZeroPowerSignalIsDegenerate) {
  Rng rng(1);
  EXPECT_THROW(AddWhiteNoise(Signal{std::vector<double>(10, 0.0), 100.0}, 0.0, rng), DegenerateInputError);
}

TEST(StandardizeTest, ZeroMeanUnitVariance) {
  const auto s = Standardize(Signal{{1.0, 2.0, 3.0, 4.0, 10.0}, 1.0});
  double mean = 0.0, var = 0.0;
  for (double v : s.samples) mean += v;
  mean /= 5.0;
  for (double v : s.samples) var += (v - mean) * (v - mean);
  EXPECT_NEAR(mean, 0.0, 1e-15);
  EXPECT_NEAR(var / 5.0, 1.0, 1e-14);
  EXPECT_THROW(Standardize(Signal{{2.0, 2.0, 2.0}, 1.0}), DegenerateInputError);
}

TEST(ClassSpecTest, DefaultConfiguration) {
  const auto specs = DefaultClassSpecs();
  ASSERT_EQ(specs.size(), 3u);
  EXPECT_EQ(specs[0].name, "H");
  EXPECT_EQ(specs[1].name, "F1");
  EXPECT_EQ(specs[2].name, "F2");
  for (const auto& s : specs) {
    ASSERT_EQ(s.components.size(), 2u);
    EXPECT_DOUBLE_EQ(s.components[0].f_c, 1500.0);
    EXPECT_DOUBLE_EQ(s.components[0].f_m, 50.0);
    EXPECT_DOUBLE_EQ(s.snr_db, 0.0);
  }
  EXPECT_TRUE(specs[0].components[1].randomize);
  EXPECT_DOUBLE_EQ(specs[1].components[1].f_c, 2500.0);
  EXPECT_DOUBLE_EQ(specs[1].components[1].f_m, 100.0);
  EXPECT_DOUBLE_EQ(specs[2].components[1].f_c, 3500.0);
  EXPECT_DOUBLE_EQ(specs[2].components[1].f_m, 125.0);
}

TEST(RngTest, UniformIndexAndShuffle) {
  Rng rng(3);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) ++hist[UniformIndex(rng, 7)];
  for (int h : hist) EXPECT_GT(h, 850);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  Shuffle(v, rng);
  std::set<int> seen(v.begin(), v.end());
  EXPECT_EQ(seen.size(), 50u);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(SplitTest, TrainCountRoundsAndClamps) {
  EXPECT_EQ(TrainCount(50, 0.7), 35u);
  EXPECT_EQ(TrainCount(2, 0.99), 1u);
  EXPECT_EQ(TrainCount(2, 0.01), 1u);
  EXPECT_EQ(TrainCount(1, 0.7), 1u);
}

TEST(DatasetTest, CountsSplitAndLabels) {
  const auto ds = BuildDataset(DefaultClassSpecs(), 10, 500, 10000.0, 0.7, 7);
  ASSERT_EQ(ds.signals.size(), 30u);
  EXPECT_EQ(ds.num_classes(), 3u);
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t total = 0, train = 0;
    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
      ASSERT_GE(ds.labels[i], 0);
      ASSERT_LT(ds.labels[i], 3);
      if (ds.labels[i] != static_cast<int>(c)) continue;
      ++total;
      train += ds.is_train[i];
    }
    EXPECT_EQ(total, 10u);
    EXPECT_EQ(train, 7u);
  }
  for (const auto& s : ds.signals) {
    EXPECT_EQ(s.size(), 500u);
    EXPECT_DOUBLE_EQ(s.fs, 10000.0);
  }
}

TEST(DatasetTest, DeterministicPerSeed) {
  const auto a = BuildDataset(DefaultClassSpecs(), 5, 300, 10000.0, 0.6, 11);
  const auto b = BuildDataset(DefaultClassSpecs(), 5, 300, 10000.0, 0.6, 11);
  const auto c = BuildDataset(DefaultClassSpecs(), 5, 300, 10000.0, 0.6, 12);
  for (std::size_t i = 0; i < a.signals.size(); ++i) EXPECT_EQ(a.signals[i].samples, b.signals[i].samples);
  EXPECT_EQ(a.is_train, b.is_train);
  EXPECT_NE(a.signals[0].samples, c.signals[0].samples);
}

TEST(DatasetTest, RejectsInvalidConfigurations) {
  EXPECT_THROW(BuildDataset(DefaultClassSpecs(), 1, 100, 10000.0, 0.7, 0), ParameterError);
  EXPECT_THROW(BuildDataset(DefaultClassSpecs(), 5, 100, 10000.0, 1.0, 0), ParameterError);
  EXPECT_THROW(BuildDataset({}, 5, 100, 10000.0, 0.7, 0), ParameterError);
  auto dup = DefaultClassSpecs();
  dup[1].name = "H";
  EXPECT_THROW(BuildDataset(dup, 5, 100, 10000.0, 0.7, 0), ParameterError);
  auto empty = DefaultClassSpecs();
  empty[0].components.clear();
  EXPECT_THROW(BuildDataset(empty, 5, 100, 10000.0, 0.7, 0), ParameterError);
}

}  // namespace
}  // namespace shep
