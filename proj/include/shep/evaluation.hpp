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

// Comparing attribution methods: cosine similarity matrices, patch-size
// sweep statistics, closed-form call-count audits and timing benchmarks.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "shep/attribution.hpp"
#include "shep/common.hpp"
#include "shep/patching.hpp"
#include "shep/predictor.hpp"
#include "shep/transforms.hpp"

namespace shep {

// p.q / (|p| |q|). 2-D attributions are compared through their row-major
// flattening.
inline double CosineSimilarity(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ParameterError("cosine similarity needs equal-length vectors");
  double dot = 0.0, pp = 0.0, qq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * q[i];
    pp += p[i] * p[i];
    qq += q[i] * q[i];
  }
  if (!(pp > 0.0) || !(qq > 0.0)) throw UndefinedSimilarityError("cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(pp) * std::sqrt(qq)), -1.0, 1.0);
}

struct SimilarityReport {
  std::size_t num_sample_classes = 0;
  std::size_t num_pred_classes = 0;
  // [sample class][prediction class]; NaN where no defined similarity exists.
  std::vector<std::vector<double>> matrix;
  std::vector<std::vector<std::size_t>> counts;
  std::size_t excluded = 0;  // zero-vector pairs left out of the means
  std::vector<double> similarities;  // every defined similarity, in input order
  double mean = 0.0;
  double variance = 0.0;

  double Diagonal(std::size_t c) const { return matrix[c][c]; }
};

inline std::pair<double, double> MeanVariance(std::span<const double> v) {
  if (v.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, var / static_cast<double>(v.size())};
}

// Entry (a, b): mean over class-a samples of the cosine similarity between
// candidate and reference attributions for prediction class b. Pairs are
// matched by position and must describe the same sample and geometry.
inline SimilarityReport SimilarityMatrix(const std::vector<Attribution>& reference,
                                         const std::vector<Attribution>& candidate,
                                         std::size_t num_sample_classes) {
  if (reference.size() != candidate.size()) {
    throw DataError("reference and candidate attribution counts differ");
  }
  SimilarityReport rep;
  rep.num_sample_classes = num_sample_classes;
  rep.num_pred_classes = reference.empty() ? 0 : reference.front().num_classes;
  const std::size_t kp = rep.num_pred_classes;
  std::vector<std::vector<double>> sums(num_sample_classes, std::vector<double>(kp, 0.0));
  rep.counts.assign(num_sample_classes, std::vector<std::size_t>(kp, 0));
  for (std::size_t s = 0; s < reference.size(); ++s) {
    const auto& r = reference[s];
    const auto& c = candidate[s];
    if (r.d != c.d || r.num_classes != c.num_classes || r.num_classes != kp || r.rows != c.rows ||
        r.cols != c.cols || !(r.patch == c.patch) || r.sample_index != c.sample_index) {
      throw DataError("attribution pair " + std::to_string(s) + " does not describe the same sample geometry");
    }
    if (!r.sample_label || r.sample_label != c.sample_label) {
      throw DataError("attribution pair " + std::to_string(s) + " lacks a matching sample label");
    }
    const auto a = static_cast<std::size_t>(*r.sample_label);
    if (a >= num_sample_classes) throw DataError("sample label out of range");
    for (std::size_t b = 0; b < kp; ++b) {
      try {
        const double sim = CosineSimilarity(r.ClassColumn(b), c.ClassColumn(b));
        sums[a][b] += sim;
        ++rep.counts[a][b];
        rep.similarities.push_back(sim);
      } catch (const UndefinedSimilarityError&) {
        ++rep.excluded;
      }
    }
  }
  rep.matrix.assign(num_sample_classes, std::vector<double>(kp, std::nan("")));
  for (std::size_t a = 0; a < num_sample_classes; ++a) {
    for (std::size_t b = 0; b < kp; ++b) {
      if (rep.counts[a][b] > 0) rep.matrix[a][b] = sums[a][b] / static_cast<double>(rep.counts[a][b]);
    }
  }
  std::tie(rep.mean, rep.variance) = MeanVariance(rep.similarities);
  return rep;
}

// One similarity observation for the patch-size sweep.
struct SweepRun {
  std::string method;
  std::string domain;
  std::size_t level = 0;  // patch level, 1 = finest
  double similarity = 0.0;
};

struct SweepCell {
  std::string method, domain;
  std::size_t level = 0;
  std::size_t count = 0;
  double mean = std::nan("");
  double variance = std::nan("");
  bool missing = true;  // fewer than two runs
};

struct SweepStats {
  std::vector<SweepCell> cells;  // sorted by (method, domain, level)

  const SweepCell* Find(const std::string& method, const std::string& domain, std::size_t level) const {
    for (const auto& c : cells) {
      if (c.method == method && c.domain == domain && c.level == level) return &c;
    }
    return nullptr;
  }
  // Mean at the coarsest level minus mean at the finest level for one
  // (method, domain) series; positive when similarity rises with patch size.
  std::optional<double> CoarseMinusFine(const std::string& method, const std::string& domain) const {
    const SweepCell* lo = nullptr;
    const SweepCell* hi = nullptr;
    for (const auto& c : cells) {
      if (c.method != method || c.domain != domain || c.missing) continue;
      if (!lo || c.level < lo->level) lo = &c;
      if (!hi || c.level > hi->level) hi = &c;
    }
    if (!lo || !hi) return std::nullopt;
    return hi->mean - lo->mean;
  }
  bool MonotoneNonDecreasing(const std::string& method, const std::string& domain) const {
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& c : cells) {
      if (c.method != method || c.domain != domain || c.missing) continue;
      if (c.mean < prev) return false;
      prev = c.mean;
    }
    return true;
  }
};

inline SweepStats PatchSweepStats(const std::vector<SweepRun>& runs) {
  std::map<std::tuple<std::string, std::string, std::size_t>, std::vector<double>> groups;
  for (const auto& r : runs) groups[{r.method, r.domain, r.level}].push_back(r.similarity);
  SweepStats stats;
  for (const auto& [key, values] : groups) {
    SweepCell cell{std::get<0>(key), std::get<1>(key), std::get<2>(key), values.size()};
    cell.missing = values.size() < 2;
    if (!cell.missing) std::tie(cell.mean, cell.variance) = MeanVariance(values);
    stats.cells.push_back(cell);
  }
  return stats;
}

struct ComplexityAudit {
  Method method = Method::kShep;
  std::size_t d = 0, n = 0, k_p = 0, k_s = 0;
  std::uint64_t predicted = 0;
  std::uint64_t measured = 0;
  double wall_time_s = 0.0;
  bool pass = false;
};

// Closed-form model-call counts per engine.
inline std::uint64_t PredictedCalls(Method method, std::size_t d, std::size_t n, std::size_t k_p,
                                    std::size_t k_s) {
  if (d == 0) return 0;
  switch (method) {
    case Method::kMask: return d + 1;
    case Method::kScale: return k_s * d + 1;
    case Method::kShep: return 2 * d * n + n + 1;
    case Method::kShepRemove: return d * n + 1;
    case Method::kShepAdd: return d * n + n;
    case Method::kShapPerm: return 2 * k_p * (d + 1) * n;
    case Method::kShapExact:
      if (d >= 64) throw ParameterError("2^d overflows for d >= 64");
      return (std::uint64_t{1} << d) * n;
  }
  throw ParameterError("unknown method");
}

inline ComplexityAudit AuditComplexity(const Attribution& a) {
  ComplexityAudit audit;
  audit.method = a.method;
  audit.d = a.d;
  audit.n = a.n;
  audit.k_p = a.k_p.value_or(0);
  audit.k_s = a.method == Method::kScale ? a.scale_factors.size() : 0;
  if (a.method == Method::kShapPerm && !a.k_p) throw ParameterError("shap_perm attribution lacks k_p");
  if (a.method == Method::kScale && a.scale_factors.empty()) {
    throw ParameterError("scale attribution lacks its factors");
  }
  audit.predicted = PredictedCalls(a.method, a.d, a.n, audit.k_p, audit.k_s);
  audit.measured = a.model_calls;
  audit.wall_time_s = a.wall_time_s;
  audit.pass = audit.predicted == audit.measured;
  return audit;
}

// ---------------------------------------------------------------------------
// Benchmark harness.

struct EngineSettings {
  std::size_t k_p = 5;
  std::vector<double> scale_factors = DefaultScaleFactors();
  std::size_t max_exact_d = kDefaultMaxExactPatches;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Runs one engine on an integrated model.
inline Attribution RunMethod(Method method, const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                             const EngineSettings& s) {
  const EngineOptions opt{s.workers};
  switch (method) {
    case Method::kShapExact: return ShapExact(m, x, bg, s.max_exact_d, opt);
    case Method::kShapPerm: return ShapPermutation(m, x, bg, s.k_p, s.seed, opt);
    case Method::kShep: return Shep(m, x, bg, opt);
    case Method::kShepRemove: return ShepRemove(m, x, bg, opt);
    case Method::kShepAdd: return ShepAdd(m, x, bg, opt);
    case Method::kMask: return MaskBaseline(m, x, opt);
    case Method::kScale: return ScaleBaseline(m, x, s.scale_factors, opt);
  }
  throw ParameterError("unknown method");
}

struct BenchCell {
  Domain domain = Domain::kFreq;
  std::size_t level = 0;
  PatchSpec patch;
  Method method = Method::kShep;
  std::size_t d = 0, n = 0;
  std::uint64_t predicted_calls = 0;
  std::uint64_t measured_calls = 0;
  bool calls_stable = true;  // identical call count on every repetition
  double median_s = 0.0;
  std::vector<double> times_s;
};

struct BenchInput {
  std::shared_ptr<const Predictor> predictor;
  Signal sample;
  std::vector<Signal> backgrounds;
  std::vector<int> background_labels;
  TransformOptions transform;
};

// Patch levels per domain, 1-based; levels[domain][level - 1].
using PatchLevels = std::map<Domain, std::vector<PatchSpec>>;

// For each (domain, level, method) cell: one discarded warm-up run, then
// `repetitions` timed runs. Reports the median time and the call count.
inline std::vector<BenchCell> Bench(const BenchInput& in, const std::vector<Method>& methods,
                                    const std::vector<Domain>& domains, const PatchLevels& levels,
                                    std::size_t repetitions, const EngineSettings& settings) {
  if (repetitions < 1) throw ParameterError("bench needs at least one repetition");
  std::vector<BenchCell> cells;
  for (Domain domain : domains) {
    const auto lv = levels.find(domain);
    if (lv == levels.end()) throw ParameterError("no patch levels given for domain " + std::string(DomainName(domain)));
    const auto rep = Forward(domain, in.sample, in.transform);
    std::vector<DomainRep> bg_reps;
    for (const auto& b : in.backgrounds) bg_reps.push_back(Forward(domain, b, in.transform));
    for (std::size_t l = 0; l < lv->second.size(); ++l) {
      IntegratedModel model(in.predictor, rep, lv->second[l]);
      const PatchRep x = model.SamplePatches();
      BackgroundSet bg;
      for (const auto& r : bg_reps) bg.samples.push_back(model.PatchesOf(r));
      bg.labels = in.background_labels;
      for (Method method : methods) {
        BenchCell cell;
        cell.domain = domain;
        cell.level = l + 1;
        cell.patch = lv->second[l];
        cell.method = method;
        RunMethod(method, model, x, bg, settings);  // warm-up
        for (std::size_t r = 0; r < repetitions; ++r) {
          const auto a = RunMethod(method, model, x, bg, settings);
          const auto audit = AuditComplexity(a);
          if (r == 0) {
            cell.d = a.d;
            cell.n = a.n;
            cell.predicted_calls = audit.predicted;
            cell.measured_calls = audit.measured;
          } else if (audit.measured != cell.measured_calls) {
            cell.calls_stable = false;
          }
          cell.times_s.push_back(a.wall_time_s);
        }
        auto sorted = cell.times_s;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t mid = sorted.size() / 2;
        cell.median_s = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

}  // namespace shep
