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

// Attribution engines over patched representations.
//
// A coalition S selects the patches that keep the analyzed sample's values;
// every other patch takes a background sample's values. With
//   E[S] = mean_b M(composite(x, b, S))
// the value function is v(S) = E[S] - E[empty], and
//
//   shap_exact   psi_i = sum_{S without i} w(|S|) (E[S + i] - E[S])
//   shap_perm    antithetic permutation estimate of the same quantity
//   shep_remove  psi_i = E[U] - E[U - i]            (the S = U - i term)
//   shep_add     psi_i = E[{i}] - E[empty]          (the S = empty term)
//   shep         (shep_remove + shep_add) / 2
//   mask         psi_i = M(x) - M(x with patch i zeroed)
//   scale        psi_i = mean_s [M(x) - M(x with patch i scaled by s)]
//
// Expectations over backgrounds are always accumulated in background order
// with RunningMean, and results are combined in a fixed order, so values are
// bit-identical for any worker count.

#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shep/common.hpp"
#include "shep/patching.hpp"
#include "shep/predictor.hpp"
#include "shep/simgen.hpp"

namespace shep {

enum class Method { kShapExact, kShapPerm, kShep, kShepRemove, kShepAdd, kMask, kScale };

inline std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kShapExact: return "shap_exact";
    case Method::kShapPerm: return "shap_perm";
    case Method::kShep: return "shep";
    case Method::kShepRemove: return "shep_remove";
    case Method::kShepAdd: return "shep_add";
    case Method::kMask: return "mask";
    case Method::kScale: return "scale";
  }
  return "?";
}

inline Method ParseMethod(std::string_view s) {
  const std::string v = ToLower(s);
  for (Method m : {Method::kShapExact, Method::kShapPerm, Method::kShep, Method::kShepRemove,
                   Method::kShepAdd, Method::kMask, Method::kScale}) {
    if (v == MethodName(m)) return m;
  }
  throw ParameterError("unknown method '" + std::string(s) + "'");
}

// Background samples, already patched with the analyzed sample's geometry.
struct BackgroundSet {
  std::vector<PatchRep> samples;
  std::vector<int> labels;

  std::size_t size() const { return samples.size(); }
};

struct Attribution {
  Method method = Method::kShep;
  std::optional<Domain> domain;
  PatchSpec patch;
  std::size_t rows = 0, cols = 0;  // representation shape
  std::size_t d = 0;               // patch count
  std::size_t num_classes = 0;
  std::size_t n = 0;  // background count (0 for mask/scale)
  std::vector<double> values;  // d x K, row-major
  std::uint64_t model_calls = 0;
  double wall_time_s = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k_p;
  std::vector<double> scale_factors;
  std::optional<std::size_t> sample_index;
  std::optional<int> sample_label;

  double at(std::size_t patch, std::size_t cls) const { return values[patch * num_classes + cls]; }
  // Column for one prediction class.
  std::vector<double> ClassColumn(std::size_t cls) const {
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = at(i, cls);
    return out;
  }
};

// Subset of patch indices: a bitset when d <= 64, a sorted list otherwise.
class Coalition {
 public:
  static Coalition FromMask(std::uint64_t mask, std::size_t d) {
    if (d > 64) throw ParameterError("bitset coalitions support at most 64 patches");
    if (d < 64 && (mask >> d) != 0) throw ParameterError("coalition mask has bits beyond d");
    Coalition c;
    c.d_ = d;
    c.mask_ = mask;
    return c;
  }

  static Coalition FromIndices(std::vector<std::size_t> indices, std::size_t d) {
    std::sort(indices.begin(), indices.end());
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (indices[k] >= d) throw ParameterError("coalition index out of range");
      if (k > 0 && indices[k] == indices[k - 1]) throw ParameterError("duplicate coalition index");
    }
    if (d <= 64) {
      std::uint64_t mask = 0;
      for (std::size_t i : indices) mask |= std::uint64_t{1} << i;
      return FromMask(mask, d);
    }
    Coalition c;
    c.d_ = d;
    c.indices_ = std::move(indices);
    return c;
  }

  static Coalition Empty(std::size_t d) { return FromIndices({}, d); }
  static Coalition Full(std::size_t d) {
    std::vector<std::size_t> all(d);
    for (std::size_t i = 0; i < d; ++i) all[i] = i;
    return FromIndices(std::move(all), d);
  }

  bool Contains(std::size_t i) const {
    if (d_ <= 64) return i < d_ && ((mask_ >> i) & 1u);
    return std::binary_search(indices_.begin(), indices_.end(), i);
  }
  std::size_t dimension() const { return d_; }
  std::size_t size() const {
    return d_ <= 64 ? static_cast<std::size_t>(std::popcount(mask_)) : indices_.size();
  }
  std::vector<unsigned char> Membership() const {
    std::vector<unsigned char> m(d_, 0);
    for (std::size_t i = 0; i < d_; ++i) m[i] = Contains(i) ? 1 : 0;
    return m;
  }

 private:
  std::size_t d_ = 0;
  std::uint64_t mask_ = 0;
  std::vector<std::size_t> indices_;
};

// w(s) = s! (d-s-1)! / d! = 1 / (d * C(d-1, s)).
struct ShapleyWeights {
  std::vector<double> w;

  static ShapleyWeights For(std::size_t d) {
    ShapleyWeights sw;
    if (d == 0) return sw;
    sw.w.resize(d);
    double binom = 1.0;  // C(d-1, s)
    for (std::size_t s = 0; s < d; ++s) {
      sw.w[s] = 1.0 / (static_cast<double>(d) * binom);
      binom = binom * static_cast<double>(d - 1 - s) / static_cast<double>(s + 1);
    }
    return sw;
  }
};

namespace internal {

inline void CheckCompatible(const PatchModel& m, const PatchRep& x, const BackgroundSet* bg) {
  m.CheckGeometry(x);
  if (bg != nullptr) {
    for (const auto& b : bg->samples) m.CheckGeometry(b);
    if (!bg->labels.empty() && bg->labels.size() != bg->samples.size()) {
      throw InconsistencyError("background labels do not match background samples");
    }
  }
}

inline void CompositeInto(const PatchRep& x, const PatchRep& b, std::span<const unsigned char> member,
                          PatchRep& out) {
  const auto& g = *x.geometry;
  for (std::size_t i = 0; i < g.count(); ++i) {
    const auto& r = g.rects[i];
    const auto& src = member[i] ? x.values : b.values;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(r.offset), r.size(),
                out.values.begin() + static_cast<std::ptrdiff_t>(r.offset));
  }
}

inline void RequireBackground(const BackgroundSet& bg) {
  if (bg.size() == 0) throw ParameterError("background set must contain at least one sample");
}

using Clock = std::chrono::steady_clock;

inline Attribution NewAttribution(Method method, const PatchModel& m, std::size_t n) {
  Attribution a;
  a.method = method;
  const auto& g = *m.geometry();
  a.patch = g.spec;
  a.rows = g.rows;
  a.cols = g.cols;
  a.d = g.count();
  a.num_classes = m.num_classes();
  a.n = n;
  a.values.assign(a.d * a.num_classes, 0.0);
  if (const auto* im = dynamic_cast<const IntegratedModel*>(&m)) a.domain = im->domain();
  return a;
}

// Mean model output over backgrounds for each coalition; membership(c, buf)
// fills the membership bytes of coalition c.
template <typename MembershipFn>
std::vector<double> CoalitionMeans(const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                                   std::size_t coalitions, MembershipFn&& membership,
                                   std::size_t workers) {
  const std::size_t k = m.num_classes();
  const std::size_t d = x.count();
  std::vector<double> out(coalitions * k);
  ParallelFor(coalitions, workers, [&](std::size_t c) {
    std::vector<unsigned char> member(d);
    membership(c, member);
    PatchRep comp{x.geometry, std::vector<double>(x.values.size())};
    RunningMean mean(k);
    for (const auto& b : bg.samples) {
      CompositeInto(x, b, member, comp);
      mean.Add(m.Evaluate(comp));
    }
    std::copy(mean.value().begin(), mean.value().end(), out.begin() + static_cast<std::ptrdiff_t>(c * k));
  });
  return out;
}

// Raw outputs for coalition c and background j at [(c * n + j) * K].
template <typename MembershipFn>
std::vector<double> PerBackgroundOutputs(const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                                         std::size_t coalitions, MembershipFn&& membership,
                                         std::size_t workers) {
  const std::size_t k = m.num_classes();
  const std::size_t n = bg.size();
  const std::size_t d = x.count();
  std::vector<double> out(coalitions * n * k);
  ParallelFor(coalitions * n, workers, [&](std::size_t job) {
    const std::size_t c = job / n, j = job % n;
    std::vector<unsigned char> member(d);
    membership(c, member);
    PatchRep comp{x.geometry, std::vector<double>(x.values.size())};
    CompositeInto(x, bg.samples[j], member, comp);
    const auto y = m.Evaluate(comp);
    std::copy(y.begin(), y.end(), out.begin() + static_cast<std::ptrdiff_t>(job * k));
  });
  return out;
}

}  // namespace internal

struct EngineOptions {
  std::size_t workers = 1;
};

// Patch i from x when i is in S, otherwise from b.
inline PatchRep Composite(const PatchRep& x, const PatchRep& b, const Coalition& s) {
  if (!x.geometry || !b.geometry || !(*x.geometry == *b.geometry) || x.values.size() != b.values.size()) {
    throw InconsistencyError("composite requires matching patch geometries");
  }
  if (s.dimension() != x.count()) throw InconsistencyError("coalition dimension does not match patch count");
  PatchRep out{x.geometry, std::vector<double>(x.values.size())};
  internal::CompositeInto(x, b, s.Membership(), out);
  return out;
}

// v(S) = mean_b M(composite(x, b, S)) - mean_b M(composite(x, b, empty)).
inline std::vector<double> ValueFunction(const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                                         const Coalition& s, const EngineOptions& opt = {}) {
  internal::RequireBackground(bg);
  internal::CheckCompatible(m, x, &bg);
  const auto member = s.Membership();
  const auto means = internal::CoalitionMeans(
      m, x, bg, 2,
      [&](std::size_t c, std::vector<unsigned char>& buf) {
        if (c == 0) {
          buf = member;
        } else {
          std::fill(buf.begin(), buf.end(), 0);
        }
      },
      opt.workers);
  const std::size_t k = m.num_classes();
  std::vector<double> v(k);
  for (std::size_t j = 0; j < k; ++j) v[j] = means[j] - means[k + j];
  return v;
}

// Exact enumeration together with the memoized expectation table, indexed by
// coalition bitmask: expectations[mask * K + k] = E[mask] for class k.
struct ExactResult {
  Attribution attribution;
  std::vector<double> expectations;

  std::span<const double> Expectation(std::uint64_t mask) const {
    const std::size_t k = attribution.num_classes;
    return {expectations.data() + mask * k, k};
  }
};

inline constexpr std::size_t kDefaultMaxExactPatches = 15;

inline ExactResult ShapExactDetailed(const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                                     std::size_t max_d = kDefaultMaxExactPatches,
                                     const EngineOptions& opt = {}) {
  internal::RequireBackground(bg);
  internal::CheckCompatible(m, x, &bg);
  const std::size_t d = x.count();
  const std::size_t n = bg.size();
  if (d > max_d || d >= 63) {
    const double calls = std::ldexp(static_cast<double>(n), static_cast<int>(std::min<std::size_t>(d, 1000)));
    std::ostringstream msg;
    msg << "exact SHAP over d=" << d << " patches needs 2^d*n = " << calls
        << " model evaluations, above the guard of d <= " << max_d;
    throw ComplexityGuardError(msg.str());
  }
  const auto start = internal::Clock::now();
  const std::uint64_t calls_before = m.call_count();
  ExactResult res;
  res.attribution = internal::NewAttribution(Method::kShapExact, m, n);
  if (d == 0) return res;

  const std::size_t k = m.num_classes();
  const std::uint64_t subsets = std::uint64_t{1} << d;
  res.expectations = internal::CoalitionMeans(
      m, x, bg, subsets,
      [d](std::size_t mask, std::vector<unsigned char>& buf) {
        for (std::size_t i = 0; i < d; ++i) buf[i] = (mask >> i) & 1u;
      },
      opt.workers);

  const auto weights = ShapleyWeights::For(d);
  auto& psi = res.attribution.values;
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    const double w = weights.w[std::min<std::size_t>(std::popcount(mask), d - 1)];
    for (std::size_t i = 0; i < d; ++i) {
      if ((mask >> i) & 1u) continue;
      const double* with = res.expectations.data() + (mask | (std::uint64_t{1} << i)) * k;
      const double* without = res.expectations.data() + mask * k;
      for (std::size_t c = 0; c < k; ++c) psi[i * k + c] += w * (with[c] - without[c]);
    }
  }
  res.attribution.model_calls = m.call_count() - calls_before;
  res.attribution.wall_time_s = std::chrono::duration<double>(internal::Clock::now() - start).count();
  return res;
}

inline Attribution ShapExact(const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                             std::size_t max_d = kDefaultMaxExactPatches, const EngineOptions& opt = {}) {
  return ShapExactDetailed(m, x, bg, max_d, opt).attribution;
}

// Antithetic permutation sampling: each of k_p random orders is traversed
// forward and reversed, each traversal costing (d + 1) coalition
// expectations. Permutations are drawn up front from Rng(seed).
inline Attribution ShapPermutation(const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                                   std::size_t k_p, std::uint64_t seed, const EngineOptions& opt = {}) {
  if (k_p < 1) throw ParameterError("permutation count k_p must be >= 1");
  internal::RequireBackground(bg);
  internal::CheckCompatible(m, x, &bg);
  const auto start = internal::Clock::now();
  const std::uint64_t calls_before = m.call_count();
  Attribution a = internal::NewAttribution(Method::kShapPerm, m, bg.size());
  a.k_p = k_p;
  a.seed = seed;
  const std::size_t d = x.count();
  if (d == 0) return a;

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> orders;  // 2 * k_p traversals
  for (std::size_t p = 0; p < k_p; ++p) {
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    Shuffle(order, rng);
    orders.push_back(order);
    std::reverse(order.begin(), order.end());
    orders.push_back(std::move(order));
  }
  const std::size_t per_traversal = d + 1;
  const auto means = internal::CoalitionMeans(
      m, x, bg, orders.size() * per_traversal,
      [&](std::size_t c, std::vector<unsigned char>& buf) {
        const auto& order = orders[c / per_traversal];
        const std::size_t prefix = c % per_traversal;
        std::fill(buf.begin(), buf.end(), 0);
        for (std::size_t j = 0; j < prefix; ++j) buf[order[j]] = 1;
      },
      opt.workers);

  const std::size_t k = m.num_classes();
  for (std::size_t t = 0; t < orders.size(); ++t) {
    for (std::size_t j = 0; j < d; ++j) {
      const double* before = means.data() + (t * per_traversal + j) * k;
      const double* after = before + k;
      for (std::size_t c = 0; c < k; ++c) a.values[orders[t][j] * k + c] += after[c] - before[c];
    }
  }
  const double inv = 1.0 / static_cast<double>(orders.size());
  for (double& v : a.values) v *= inv;
  a.model_calls = m.call_count() - calls_before;
  a.wall_time_s = std::chrono::duration<double>(internal::Clock::now() - start).count();
  return a;
}

// Per-background contributions before averaging, n x d x K.
struct Breakdown {
  std::size_t n = 0, d = 0, num_classes = 0;
  std::vector<double> values;
  std::vector<int> labels;

  double at(std::size_t b, std::size_t i, std::size_t c) const {
    return values[(b * d + i) * num_classes + c];
  }
  // Mean over the background axis ("M" row), d x K.
  std::vector<double> Mean() const {
    RunningMean mean(d * num_classes);
    for (std::size_t b = 0; b < n; ++b) {
      mean.Add(std::span<const double>(values.data() + b * d * num_classes, d * num_classes));
    }
    return mean.value();
  }
  // Means grouped by background label; map label -> d x K.
  std::map<int, std::vector<double>> ClassMeans() const {
    std::map<int, RunningMean> groups;
    for (std::size_t b = 0; b < n; ++b) {
      const int label = b < labels.size() ? labels[b] : -1;
      auto it = groups.try_emplace(label, d * num_classes).first;
      it->second.Add(std::span<const double>(values.data() + b * d * num_classes, d * num_classes));
    }
    std::map<int, std::vector<double>> out;
    for (auto& [label, mean] : groups) out[label] = mean.value();
    return out;
  }
};

namespace internal {

enum class ShepPart { kRemove, kAdd, kBoth };

inline Attribution RunShep(ShepPart part, const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                           const EngineOptions& opt, Breakdown* breakdown) {
  RequireBackground(bg);
  CheckCompatible(m, x, &bg);
  const auto start = Clock::now();
  const std::uint64_t calls_before = m.call_count();
  const Method method = part == ShepPart::kRemove ? Method::kShepRemove
                        : part == ShepPart::kAdd  ? Method::kShepAdd
                                                  : Method::kShep;
  Attribution a = NewAttribution(method, m, bg.size());
  const std::size_t d = x.count();
  const std::size_t n = bg.size();
  const std::size_t k = m.num_classes();
  if (breakdown != nullptr) {
    *breakdown = Breakdown{n, d, k, std::vector<double>(n * d * k, 0.0), bg.labels};
  }
  if (d == 0) return a;

  const bool remove = part != ShepPart::kAdd;
  const bool add = part != ShepPart::kRemove;

  std::vector<double> full;  // M(x), one evaluation
  if (remove) full = m.Evaluate(x);

  // Coalitions: remove uses U - {i} for i < d; add uses {} then {i}.
  std::vector<double> removed, added;
  if (remove) {
    removed = PerBackgroundOutputs(
        m, x, bg, d,
        [](std::size_t i, std::vector<unsigned char>& buf) {
          std::fill(buf.begin(), buf.end(), 1);
          buf[i] = 0;
        },
        opt.workers);
  }
  if (add) {
    added = PerBackgroundOutputs(
        m, x, bg, d + 1,
        [](std::size_t c, std::vector<unsigned char>& buf) {
          std::fill(buf.begin(), buf.end(), 0);
          if (c > 0) buf[c - 1] = 1;
        },
        opt.workers);
  }
  auto out_at = [&](const std::vector<double>& outs, std::size_t c, std::size_t j) {
    return outs.data() + (c * n + j) * k;
  };

  std::vector<double> psi_rm(d * k, 0.0), psi_add(d * k, 0.0);
  if (remove) {
    for (std::size_t i = 0; i < d; ++i) {
      RunningMean mean(k);
      for (std::size_t j = 0; j < n; ++j) mean.Add(std::span<const double>(out_at(removed, i, j), k));
      for (std::size_t c = 0; c < k; ++c) psi_rm[i * k + c] = full[c] - mean.value()[c];
    }
  }
  if (add) {
    RunningMean base(k);
    for (std::size_t j = 0; j < n; ++j) base.Add(std::span<const double>(out_at(added, 0, j), k));
    for (std::size_t i = 0; i < d; ++i) {
      RunningMean mean(k);
      for (std::size_t j = 0; j < n; ++j) mean.Add(std::span<const double>(out_at(added, i + 1, j), k));
      for (std::size_t c = 0; c < k; ++c) psi_add[i * k + c] = mean.value()[c] - base.value()[c];
    }
  }
  for (std::size_t e = 0; e < d * k; ++e) {
    a.values[e] = part == ShepPart::kRemove ? psi_rm[e]
                  : part == ShepPart::kAdd  ? psi_add[e]
                                            : 0.5 * (psi_rm[e] + psi_add[e]);
  }

  if (breakdown != nullptr) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t c = 0; c < k; ++c) {
          const double rm = remove ? full[c] - out_at(removed, i, j)[c] : 0.0;
          const double ad = add ? out_at(added, i + 1, j)[c] - out_at(added, 0, j)[c] : 0.0;
          breakdown->values[(j * d + i) * k + c] = part == ShepPart::kRemove ? rm
                                                   : part == ShepPart::kAdd  ? ad
                                                                             : 0.5 * (rm + ad);
        }
      }
    }
  }
  a.model_calls = m.call_count() - calls_before;
  a.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return a;
}

}  // namespace internal

// d*n + 1 evaluations.
inline Attribution ShepRemove(const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                              const EngineOptions& opt = {}, Breakdown* breakdown = nullptr) {
  return internal::RunShep(internal::ShepPart::kRemove, m, x, bg, opt, breakdown);
}

// d*n + n evaluations.
inline Attribution ShepAdd(const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                           const EngineOptions& opt = {}, Breakdown* breakdown = nullptr) {
  return internal::RunShep(internal::ShepPart::kAdd, m, x, bg, opt, breakdown);
}

// 2*d*n + n + 1 evaluations.
inline Attribution Shep(const PatchModel& m, const PatchRep& x, const BackgroundSet& bg,
                        const EngineOptions& opt = {}, Breakdown* breakdown = nullptr) {
  return internal::RunShep(internal::ShepPart::kBoth, m, x, bg, opt, breakdown);
}

namespace internal {

// psi_i = mean_s [M(x) - M(x with patch i multiplied by factor_s)].
inline Attribution PerturbationAttribution(Method method, const PatchModel& m, const PatchRep& x,
                                           std::span<const double> factors, const EngineOptions& opt) {
  CheckCompatible(m, x, nullptr);
  if (factors.empty()) throw ParameterError("scale factors must be non-empty");
  for (double f : factors) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw ParameterError("scale factors must be finite and >= 0");
  }
  const auto start = Clock::now();
  const std::uint64_t calls_before = m.call_count();
  Attribution a = NewAttribution(method, m, 0);
  const std::size_t d = x.count();
  if (d == 0) return a;
  const std::size_t k = m.num_classes();
  const std::size_t ks = factors.size();
  const auto full = m.Evaluate(x);
  std::vector<double> outs(d * ks * k);
  ParallelFor(d * ks, opt.workers, [&](std::size_t job) {
    const std::size_t i = job / ks, s = job % ks;
    PatchRep p = x;
    for (double& v : p.patch(i)) v *= factors[s];
    const auto y = m.Evaluate(p);
    std::copy(y.begin(), y.end(), outs.begin() + static_cast<std::ptrdiff_t>(job * k));
  });
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      double sum = 0.0;
      for (std::size_t s = 0; s < ks; ++s) sum += full[c] - outs[(i * ks + s) * k + c];
      a.values[i * k + c] = sum / static_cast<double>(ks);
    }
  }
  a.model_calls = m.call_count() - calls_before;
  a.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return a;
}

}  // namespace internal

// d + 1 evaluations; no background set.
inline Attribution MaskBaseline(const PatchModel& m, const PatchRep& x, const EngineOptions& opt = {}) {
  const double zero = 0.0;
  return internal::PerturbationAttribution(Method::kMask, m, x, std::span<const double>(&zero, 1), opt);
}

inline std::vector<double> DefaultScaleFactors() { return {0.0, 0.5, 2.0}; }

// k_s * d + 1 evaluations.
inline Attribution ScaleBaseline(const PatchModel& m, const PatchRep& x,
                                 std::span<const double> factors, const EngineOptions& opt = {}) {
  Attribution a = internal::PerturbationAttribution(Method::kScale, m, x, factors, opt);
  a.scale_factors.assign(factors.begin(), factors.end());
  return a;
}

// ---------------------------------------------------------------------------
// JSON form of an attribution.

inline nlohmann::json ToJson(const Attribution& a) {
  nlohmann::json j = {
      {"kind", "attribution"},
      {"method", MethodName(a.method)},
      {"domain", a.domain ? nlohmann::json(DomainName(*a.domain)) : nlohmann::json(nullptr)},
      {"patch", a.patch.ToString()},
      {"d", a.d},
      {"K", a.num_classes},
      {"n", a.n},
      {"model_calls", a.model_calls},
      {"wall_time_s", a.wall_time_s},
      {"values", a.values},
      {"geometry", {{"rows", a.rows}, {"cols", a.cols}, {"patch_height", a.patch.height},
                    {"patch_width", a.patch.width}, {"order", "row-major"}}},
  };
  j["seed"] = a.seed ? nlohmann::json(*a.seed) : nlohmann::json(nullptr);
  j["k_p"] = a.k_p ? nlohmann::json(*a.k_p) : nlohmann::json(nullptr);
  j["k_s"] = a.method == Method::kScale ? nlohmann::json(a.scale_factors.size()) : nlohmann::json(nullptr);
  if (!a.scale_factors.empty()) j["scale_factors"] = a.scale_factors;
  if (a.sample_index) j["sample_index"] = *a.sample_index;
  if (a.sample_label) j["sample_label"] = *a.sample_label;
  return j;
}

inline Attribution AttributionFromJson(const nlohmann::json& j) {
  try {
    if (j.value("kind", "") != "attribution") throw DataError("not an attribution document");
    Attribution a;
    a.method = ParseMethod(j.at("method").get<std::string>());
    if (!j.at("domain").is_null()) a.domain = ParseDomain(j.at("domain").get<std::string>());
    a.patch = PatchSpec::Parse(j.at("patch").get<std::string>());
    a.d = j.at("d").get<std::size_t>();
    a.num_classes = j.at("K").get<std::size_t>();
    a.n = j.at("n").get<std::size_t>();
    a.model_calls = j.at("model_calls").get<std::uint64_t>();
    a.wall_time_s = j.at("wall_time_s").get<double>();
    a.values = j.at("values").get<std::vector<double>>();
    a.rows = j.at("geometry").at("rows").get<std::size_t>();
    a.cols = j.at("geometry").at("cols").get<std::size_t>();
    if (!j.at("seed").is_null()) a.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("k_p").is_null()) a.k_p = j.at("k_p").get<std::size_t>();
    if (j.contains("scale_factors")) a.scale_factors = j.at("scale_factors").get<std::vector<double>>();
    if (j.contains("sample_index")) a.sample_index = j.at("sample_index").get<std::size_t>();
    if (j.contains("sample_label")) a.sample_label = j.at("sample_label").get<int>();
    if (a.values.size() != a.d * a.num_classes) throw DataError("attribution values do not match d x K");
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed attribution: ") + e.what());
  }
}

}  // namespace shep
