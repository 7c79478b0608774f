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

#include "shep/attribution.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "shep/evaluation.hpp"
#include "toy_models.hpp"

namespace shep {
namespace {

using testing::InteractionToy;
using testing::LinearToy;
using testing::MaxAbsDiff;
using testing::PatchMeans;
using testing::RandomBackground;
using testing::RandomPatches;

// d patches of width 2 on a single row.
std::shared_ptr<const PatchGeometry> Geometry(std::size_t d) { return MakeGeometry(1, 2 * d, {1, 2}); }

LinearToy MakeLinear(std::size_t d, std::size_t k, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<std::vector<double>> w(k, std::vector<double>(d));
  std::vector<double> b(k);
  for (auto& row : w) {
    for (auto& v : row) v = nd(rng);
  }
  for (auto& v : b) v = nd(rng);
  return LinearToy(Geometry(d), w, b);
}

TEST(ShapleyWeightsTest, KnownValuesAndNormalization) {
  const auto w = ShapleyWeights::For(3);
  ASSERT_EQ(w.w.size(), 3u);
  EXPECT_DOUBLE_EQ(w.w[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(w.w[1], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(w.w[2], 1.0 / 3.0);
  for (std::size_t d = 1; d <= 20; ++d) {
    const auto sw = ShapleyWeights::For(d);
    double total = 0.0, binom = 1.0;
    for (std::size_t s = 0; s < d; ++s) {
      total += binom * sw.w[s];
      binom = binom * (d - 1 - s) / (s + 1);
    }
    EXPECT_NEAR(total, 1.0, 1e-12) << d;
  }
}

TEST(CoalitionTest, MaskAndIndexForms) {
  const auto c = Coalition::FromIndices({3, 0}, 5);
  EXPECT_TRUE(c.Contains(0));
  EXPECT_TRUE(c.Contains(3));
  EXPECT_FALSE(c.Contains(1));
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.Membership(), (std::vector<unsigned char>{1, 0, 0, 1, 0}));
  EXPECT_EQ(Coalition::Full(70).size(), 70u);
  EXPECT_TRUE(Coalition::Full(70).Contains(69));
  EXPECT_EQ(Coalition::Empty(4).size(), 0u);
  EXPECT_THROW(Coalition::FromIndices({5}, 5), ParameterError);
  EXPECT_THROW(Coalition::FromIndices({1, 1}, 5), ParameterError);
  EXPECT_THROW(Coalition::FromMask(0b100000, 5), ParameterError);
}

TEST(CompositeTest, TakesMembersFromSample) {
  const auto g = Geometry(3);
  PatchRep x{g, {1, 2, 3, 4, 5, 6}};
  PatchRep b{g, {-1, -2, -3, -4, -5, -6}};
  const auto z = Composite(x, b, Coalition::FromIndices({1}, 3));
  EXPECT_EQ(z.values, (std::vector<double>{-1, -2, 3, 4, -5, -6}));
  PatchRep other{Geometry(2), {0, 0, 0, 0}};
  EXPECT_THROW(Composite(x, other, Coalition::Empty(3)), InconsistencyError);
}

TEST(ValueFunctionTest, EmptyAndFullCoalitions) {
  std::mt19937_64 rng(1);
  const auto m = MakeLinear(4, 2, rng);
  const auto x = RandomPatches(m.geometry(), rng);
  const auto bg = RandomBackground(m.geometry(), 6, rng);
  const auto v0 = ValueFunction(m, x, bg, Coalition::Empty(4));
  EXPECT_EQ(v0, (std::vector<double>{0.0, 0.0}));
  const auto vu = ValueFunction(m, x, bg, Coalition::Full(4));
  const auto full = testing::OracleExpectation(m, x, bg, std::vector<bool>(4, true));
  const auto base = testing::OracleExpectation(m, x, bg, std::vector<bool>(4, false));
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(vu[k], full[k] - base[k], 1e-12);
}

// Additive model: every Shapley estimator recovers w_ki (f_i(x) - E f_i(b)).
TEST(LinearModelTest, ShapleyFamilyMatchesClosedForm) {
  std::mt19937_64 rng(7);
  const std::size_t d = 6, k = 3;
  const auto m = MakeLinear(d, k, rng);
  const auto x = RandomPatches(m.geometry(), rng);
  const auto bg = RandomBackground(m.geometry(), 5, rng);
  const auto fx = PatchMeans(x);
  std::vector<double> fb(d, 0.0);
  for (const auto& b : bg.samples) {
    const auto f = PatchMeans(b);
    for (std::size_t i = 0; i < d; ++i) fb[i] += f[i] / bg.size();
  }
  std::vector<double> expect(d * k);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t c = 0; c < k; ++c) expect[i * k + c] = m.weight(c, i) * (fx[i] - fb[i]);
  }
  EXPECT_LT(MaxAbsDiff(ShapExact(m, x, bg).values, expect), 1e-12);
  EXPECT_LT(MaxAbsDiff(ShapPermutation(m, x, bg, 3, 11).values, expect), 1e-12);
  EXPECT_LT(MaxAbsDiff(Shep(m, x, bg).values, expect), 1e-12);
  EXPECT_LT(MaxAbsDiff(ShepRemove(m, x, bg).values, expect), 1e-12);
  EXPECT_LT(MaxAbsDiff(ShepAdd(m, x, bg).values, expect), 1e-12);
}

TEST(LinearModelTest, PerturbationBaselinesMatchClosedForm) {
  std::mt19937_64 rng(8);
  const std::size_t d = 5, k = 2;
  const auto m = MakeLinear(d, k, rng);
  const auto x = RandomPatches(m.geometry(), rng);
  const auto fx = PatchMeans(x);
  std::vector<double> mask(d * k), scale(d * k);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      mask[i * k + c] = m.weight(c, i) * fx[i];
      // mean over factors {0, 0.5, 2} of (1 - s) is 1/6
      scale[i * k + c] = m.weight(c, i) * fx[i] / 6.0;
    }
  }
  EXPECT_LT(MaxAbsDiff(MaskBaseline(m, x).values, mask), 1e-12);
  EXPECT_LT(MaxAbsDiff(ScaleBaseline(m, x, DefaultScaleFactors()).values, scale), 1e-12);
}

TEST(ExactShapTest, MatchesAllOrdersOracle) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t d = 1 + seed % 5;
    const InteractionToy m(Geometry(d), 3, seed + 100);
    const auto x = RandomPatches(m.geometry(), rng);
    const auto bg = RandomBackground(m.geometry(), 1 + seed % 4, rng);
    const auto exact = ShapExact(m, x, bg);
    EXPECT_LT(MaxAbsDiff(exact.values, testing::PermutationOracle(m, x, bg)), 1e-10) << "seed " << seed;
  }
}

TEST(ExactShapTest, EfficiencyDummyAndSymmetry) {
  std::mt19937_64 rng(5);
  const std::size_t d = 6;
  const InteractionToy m(Geometry(d), 2, 9, /*dummies=*/{4}, /*pairs=*/{{1, 3}});
  auto x = RandomPatches(m.geometry(), rng);
  auto bg = RandomBackground(m.geometry(), 4, rng);
  // Symmetric patches need matching values in x and in every background.
  auto copy_patch = [](PatchRep& p, std::size_t from, std::size_t to) {
    const auto src = p.patch(from);
    auto dst = p.patch(to);
    std::copy(src.begin(), src.end(), dst.begin());
  };
  copy_patch(x, 1, 3);
  for (auto& b : bg.samples) copy_patch(b, 1, 3);

  const auto a = ShapExact(m, x, bg);
  const auto vu = ValueFunction(m, x, bg, Coalition::Full(d));
  for (std::size_t c = 0; c < 2; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) sum += a.at(i, c);
    EXPECT_NEAR(sum, vu[c], 1e-12);
    EXPECT_EQ(a.at(4, c), 0.0);
    EXPECT_NEAR(a.at(1, c), a.at(3, c), 1e-12);
  }
}

TEST(ExactShapTest, GuardRefusesLargeD) {
  std::mt19937_64 rng(1);
  const auto g = Geometry(16);
  const InteractionToy m(g, 2, 1);
  const auto x = RandomPatches(g, rng);
  const auto bg = RandomBackground(g, 15, rng);
  try {
    ShapExact(m, x, bg);
    FAIL() << "guard did not trigger";
  } catch (const ComplexityGuardError& e) {
    EXPECT_NE(std::string(e.what()).find("2^d*n = 983040"), std::string::npos) << e.what();
  }
  EXPECT_EQ(m.call_count(), 0u);
}

TEST(ShepTest, TermsEqualExactEnumerationTerms) {
  std::mt19937_64 rng(3);
  const std::size_t d = 5, k = 3;
  const InteractionToy m(Geometry(d), k, 77);
  const auto x = RandomPatches(m.geometry(), rng);
  const auto bg = RandomBackground(m.geometry(), 5, rng);
  const auto ex = ShapExactDetailed(m, x, bg);
  const auto rm = ShepRemove(m, x, bg);
  const auto ad = ShepAdd(m, x, bg);
  const auto both = Shep(m, x, bg);
  const std::uint64_t full = (1u << d) - 1;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      const double r = ex.Expectation(full)[c] - ex.Expectation(full & ~(1u << i))[c];
      const double a = ex.Expectation(1u << i)[c] - ex.Expectation(0)[c];
      EXPECT_EQ(rm.at(i, c), r);
      EXPECT_EQ(ad.at(i, c), a);
      EXPECT_EQ(both.at(i, c), 0.5 * (r + a));
    }
  }
}

TEST(ShepTest, BreakdownAveragesToTheAttribution) {
  std::mt19937_64 rng(4);
  const InteractionToy m(Geometry(4), 3, 5);
  const auto x = RandomPatches(m.geometry(), rng);
  const auto bg = RandomBackground(m.geometry(), 6, rng);
  Breakdown br;
  const auto a = Shep(m, x, bg, {}, &br);
  EXPECT_EQ(br.n, 6u);
  EXPECT_LT(MaxAbsDiff(br.Mean(), a.values), 1e-12);
  const auto groups = br.ClassMeans();
  ASSERT_EQ(groups.size(), 3u);
  // labels cycle 0,1,2: class 0 holds backgrounds 0 and 3.
  for (std::size_t e = 0; e < a.values.size(); ++e) {
    const double expect = 0.5 * (br.values[e] + br.values[3 * 4 * 3 + e]);
    EXPECT_NEAR(groups.at(0)[e], expect, 1e-15);
  }
}

TEST(PermutationTest, TwoPatchesAreExactWithOnePair) {
  std::mt19937_64 rng(9);
  const InteractionToy m(Geometry(2), 2, 3);
  const auto x = RandomPatches(m.geometry(), rng);
  const auto bg = RandomBackground(m.geometry(), 3, rng);
  EXPECT_LT(MaxAbsDiff(ShapPermutation(m, x, bg, 1, 0).values, ShapExact(m, x, bg).values), 1e-12);
}

TEST(PermutationTest, EveryTraversalIsEfficient) {
  std::mt19937_64 rng(10);
  const InteractionToy m(Geometry(7), 2, 4);
  const auto x = RandomPatches(m.geometry(), rng);
  const auto bg = RandomBackground(m.geometry(), 3, rng);
  const auto a = ShapPermutation(m, x, bg, 4, 42);
  const auto vu = ValueFunction(m, x, bg, Coalition::Full(7));
  for (std::size_t c = 0; c < 2; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 7; ++i) sum += a.at(i, c);
    EXPECT_NEAR(sum, vu[c], 1e-12);
  }
  EXPECT_EQ(a.k_p, 4u);
  EXPECT_EQ(a.seed, 42u);
}

TEST(CallCountTest, ClosedForms) {
  std::mt19937_64 rng(11);
  for (std::size_t d : {1u, 3u, 8u}) {
    for (std::size_t n : {1u, 4u}) {
      const InteractionToy m(Geometry(d), 3, d);
      const auto x = RandomPatches(m.geometry(), rng);
      const auto bg = RandomBackground(m.geometry(), n, rng);
      EXPECT_EQ(ShapExact(m, x, bg).model_calls, (1u << d) * n);
      EXPECT_EQ(ShapPermutation(m, x, bg, 3, 1).model_calls, 2 * 3 * (d + 1) * n);
      EXPECT_EQ(Shep(m, x, bg).model_calls, 2 * d * n + n + 1);
      EXPECT_EQ(ShepRemove(m, x, bg).model_calls, d * n + 1);
      EXPECT_EQ(ShepAdd(m, x, bg).model_calls, d * n + n);
      EXPECT_EQ(MaskBaseline(m, x).model_calls, d + 1);
      EXPECT_EQ(ScaleBaseline(m, x, DefaultScaleFactors()).model_calls, 3 * d + 1);
    }
  }
}

TEST(DeterminismTest, WorkerCountDoesNotChangeValues) {
  std::mt19937_64 rng(12);
  const InteractionToy m(Geometry(9), 3, 8);
  const auto x = RandomPatches(m.geometry(), rng);
  const auto bg = RandomBackground(m.geometry(), 5, rng);
  const EngineOptions one{1}, many{4};
  EXPECT_EQ(ShapExact(m, x, bg, 15, one).values, ShapExact(m, x, bg, 15, many).values);
  EXPECT_EQ(ShapPermutation(m, x, bg, 5, 3, one).values, ShapPermutation(m, x, bg, 5, 3, many).values);
  EXPECT_EQ(Shep(m, x, bg, one).values, Shep(m, x, bg, many).values);
  EXPECT_EQ(MaskBaseline(m, x, one).values, MaskBaseline(m, x, many).values);
  const auto f = DefaultScaleFactors();
  EXPECT_EQ(ScaleBaseline(m, x, f, one).values, ScaleBaseline(m, x, f, many).values);
  const auto c1 = ShapExact(m, x, bg, 15, one).model_calls;
  EXPECT_EQ(c1, ShapExact(m, x, bg, 15, many).model_calls);
}

TEST(ErrorTest, InvalidInputs) {
  std::mt19937_64 rng(13);
  const InteractionToy m(Geometry(3), 2, 1);
  const auto x = RandomPatches(m.geometry(), rng);
  const BackgroundSet empty;
  EXPECT_THROW(ShapExact(m, x, empty), ParameterError);
  EXPECT_THROW(Shep(m, x, empty), ParameterError);
  const auto bg = RandomBackground(m.geometry(), 2, rng);
  EXPECT_THROW(ShapPermutation(m, x, bg, 0, 1), ParameterError);
  const std::vector<double> negative{-1.0};
  EXPECT_THROW(ScaleBaseline(m, x, negative), ParameterError);
  const auto wrong = RandomBackground(Geometry(4), 2, rng);
  EXPECT_THROW(Shep(m, x, wrong), InconsistencyError);
  auto bad_labels = bg;
  bad_labels.labels.push_back(1);
  EXPECT_THROW(ShapExact(m, x, bad_labels), InconsistencyError);
}

TEST(MethodNameTest, ParseRoundTrip) {
  for (Method m : {Method::kShapExact, Method::kShapPerm, Method::kShep, Method::kShepRemove, Method::kShepAdd,
                   Method::kMask, Method::kScale}) {
    EXPECT_EQ(ParseMethod(MethodName(m)), m);
  }
  EXPECT_THROW(ParseMethod("lime"), ParameterError);
}

TEST(AttributionJsonTest, RoundTrip) {
  std::mt19937_64 rng(14);
  const InteractionToy m(Geometry(4), 3, 2);
  const auto x = RandomPatches(m.geometry(), rng);
  const auto bg = RandomBackground(m.geometry(), 3, rng);
  auto a = ShapPermutation(m, x, bg, 2, 5);
  a.sample_index = 12;
  a.sample_label = 2;
  const auto j = ToJson(a);
  EXPECT_EQ(j.at("method"), "shap_perm");
  EXPECT_EQ(j.at("d"), 4);
  EXPECT_EQ(j.at("K"), 3);
  EXPECT_EQ(j.at("geometry").at("order"), "row-major");
  const auto b = AttributionFromJson(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(b.values, a.values);
  EXPECT_EQ(b.model_calls, a.model_calls);
  EXPECT_EQ(b.k_p, a.k_p);
  EXPECT_EQ(b.seed, a.seed);
  EXPECT_EQ(b.sample_index, a.sample_index);
  EXPECT_EQ(b.patch, a.patch);

  auto s = ScaleBaseline(m, x, DefaultScaleFactors());
  const auto sj = ToJson(s);
  EXPECT_EQ(sj.at("k_s"), 3);
  EXPECT_EQ(AttributionFromJson(sj).scale_factors, DefaultScaleFactors());

  auto broken = j;
  broken["values"].erase(0);
  EXPECT_THROW(AttributionFromJson(broken), DataError);
  EXPECT_THROW(AttributionFromJson(nlohmann::json{{"kind", "attribution"}}), DataError);
}

}  // namespace
}  // namespace shep
