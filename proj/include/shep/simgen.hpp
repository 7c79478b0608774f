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

// Synthetic vibration fault signals: sums of damped periodic impulse trains
// plus white Gaussian noise, and the dataset builder used by the experiments.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "shep/common.hpp"

namespace shep {

using Rng = std::mt19937_64;

// One periodic-impulse component. When `randomize` is set, f_m and f_c are
// drawn per sample from the given ranges and the fixed values are ignored.
struct ComponentSpec {
  double f_m = 50.0;    // impulse repetition frequency, Hz
  double f_c = 1500.0;  // carrier (resonance) frequency, Hz
  double beta = 0.04;   // decay per sample
  double amp_lo = 0.8;
  double amp_hi = 1.0;
  bool randomize = false;
  double f_c_lo = 1000.0, f_c_hi = 4000.0;
  double f_m_lo = 20.0, f_m_hi = 200.0;
};

struct ClassSpec {
  std::string name;
  std::vector<ComponentSpec> components;
  double snr_db = 0.0;  // +inf disables noise
};

struct Dataset {
  std::vector<Signal> signals;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<bool> is_train;
  std::uint64_t seed = 0;
  double fs = 0.0;

  std::size_t num_classes() const { return class_names.size(); }
  std::vector<std::size_t> Indices(bool train) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < signals.size(); ++i) {
      if (is_train[i] == train) out.push_back(i);
    }
    return out;
  }
};

inline void ValidateComponent(const ComponentSpec& c, double fs) {
  if (!(fs > 0.0)) throw ParameterError("sample rate must be > 0");
  if (!(c.beta >= 0.0)) throw ParameterError("beta must be >= 0");
  if (!(c.amp_lo <= c.amp_hi)) throw ParameterError("amplitude range is empty");
  if (c.randomize) {
    if (!(c.f_m_lo > 0.0 && c.f_m_lo <= c.f_m_hi)) {
      throw ParameterError("randomized f_m range must be positive and ordered");
    }
    if (!(c.f_c_lo > 0.0 && c.f_c_lo <= c.f_c_hi && c.f_c_hi < fs / 2.0)) {
      throw ParameterError("randomized f_c range must lie in (0, fs/2)");
    }
    return;
  }
  if (!(c.f_m > 0.0)) throw ParameterError("f_m must be > 0");
  if (!(c.f_c > 0.0 && c.f_c < fs / 2.0)) throw ParameterError("f_c must lie in (0, fs/2)");
}

// Sum of causal damped sinusoids starting at every onset k/f_m inside the
// window. The decay exponent is measured in samples: exp(-beta * dt * fs).
inline Signal PeriodicImpulse(const ComponentSpec& spec, double phi, double fs, std::size_t n) {
  if (n == 0) throw ParameterError("signal length must be > 0");
  ComponentSpec fixed = spec;
  fixed.randomize = false;
  ValidateComponent(fixed, fs);

  Signal out{std::vector<double>(n, 0.0), fs};
  const double duration = static_cast<double>(n) / fs;
  const double two_pi_fc = 2.0 * std::numbers::pi * spec.f_c;
  for (std::size_t k = 0;; ++k) {
    const double onset = static_cast<double>(k) / spec.f_m;
    if (onset >= duration) break;
    auto first = static_cast<std::size_t>(std::ceil(onset * fs - 1e-9));
    for (std::size_t i = first; i < n; ++i) {
      const double dt = std::max(0.0, static_cast<double>(i) / fs - onset);
      const double decay = std::exp(-spec.beta * dt * fs);
      if (decay < 1e-300) break;
      out.samples[i] += decay * std::sin(two_pi_fc * dt + phi);
    }
  }
  return out;
}

inline double MeanPower(std::span<const double> x) {
  double p = 0.0;
  for (double v : x) p += v * v;
  return p / static_cast<double>(x.size());
}

// Adds zero-mean Gaussian noise so that 10 log10(P_signal / P_noise) equals
// snr_db. snr_db = +inf returns the input unchanged.
inline Signal AddWhiteNoise(const Signal& sig, double snr_db, Rng& rng) {
  if (std::isinf(snr_db) && snr_db > 0) return sig;
  if (std::isnan(snr_db)) throw ParameterError("snr_db is NaN");
  const double p_signal = MeanPower(sig.samples);
  if (!(p_signal > 0.0)) {
    throw DegenerateInputError("cannot set an SNR on a zero-power signal");
  }
  const double sigma = std::sqrt(p_signal / std::pow(10.0, snr_db / 10.0));
  std::normal_distribution<double> noise(0.0, sigma);
  Signal out = sig;
  for (double& v : out.samples) v += noise(rng);
  return out;
}

// Mean-std normalization with the population standard deviation.
inline Signal Standardize(const Signal& sig) {
  if (sig.samples.empty()) throw ParameterError("signal is empty");
  const double n = static_cast<double>(sig.size());
  double mean = 0.0;
  for (double v : sig.samples) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : sig.samples) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0.0) || sd < 1e-300) {
    throw DegenerateInputError("cannot standardize a constant signal");
  }
  Signal out = sig;
  for (double& v : out.samples) v = (v - mean) / sd;
  return out;
}

// Draw order per component: amplitude, phase, then (f_c, f_m) if randomized.
// Noise is drawn last.
inline Signal SynthSample(const ClassSpec& cls, double fs, std::size_t n, Rng& rng) {
  if (cls.components.empty()) throw ParameterError("class '" + cls.name + "' has no components");
  for (const auto& c : cls.components) ValidateComponent(c, fs);

  Signal clean{std::vector<double>(n, 0.0), fs};
  for (const auto& c : cls.components) {
    std::uniform_real_distribution<double> amp(c.amp_lo, c.amp_hi);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double a = amp(rng);
    const double phi = phase(rng);
    ComponentSpec drawn = c;
    if (c.randomize) {
      drawn.f_c = std::uniform_real_distribution<double>(c.f_c_lo, c.f_c_hi)(rng);
      drawn.f_m = std::uniform_real_distribution<double>(c.f_m_lo, c.f_m_hi)(rng);
      drawn.randomize = false;
    }
    const Signal part = PeriodicImpulse(drawn, phi, fs, n);
    for (std::size_t i = 0; i < n; ++i) clean.samples[i] += a * part.samples[i];
  }
  return AddWhiteNoise(clean, cls.snr_db, rng);
}

// Health / Fault #1 / Fault #2 classes built from the shared component C0
// (1.5 kHz, 50 Hz) and one exclusive component each: a random C_H, C1
// (2.5 kHz, 100 Hz) and C2 (3.5 kHz, 125 Hz). SNR 0 dB.
inline std::vector<ClassSpec> DefaultClassSpecs(double snr_db = 0.0) {
  ComponentSpec c0{.f_m = 50.0, .f_c = 1500.0};
  ComponentSpec ch{.randomize = true};
  ComponentSpec c1{.f_m = 100.0, .f_c = 2500.0};
  ComponentSpec c2{.f_m = 125.0, .f_c = 3500.0};
  return {
      ClassSpec{"H", {c0, ch}, snr_db},
      ClassSpec{"F1", {c0, c1}, snr_db},
      ClassSpec{"F2", {c0, c2}, snr_db},
  };
}

// Uniform integer in [0, bound) by rejection on the raw engine output, so the
// sequence depends only on the engine and not on library distributions.
inline std::uint64_t UniformIndex(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

template <typename T>
void Shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[UniformIndex(rng, i)]);
  }
}

// Per-class train count: round(train_frac * count), kept within [1, count-1]
// when count >= 2 so both splits see every class.
inline std::size_t TrainCount(std::size_t count, double train_frac) {
  auto t = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(count)));
  if (count >= 2) t = std::clamp<std::size_t>(t, 1, count - 1);
  return std::min(t, count);
}

// Stratified seeded split over an existing label vector.
inline std::vector<bool> StratifiedSplit(const std::vector<int>& labels, std::size_t num_classes,
                                         double train_frac, Rng& rng) {
  std::vector<bool> is_train(labels.size(), false);
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == static_cast<int>(c)) members.push_back(i);
    }
    Shuffle(members, rng);
    const std::size_t t = TrainCount(members.size(), train_frac);
    for (std::size_t j = 0; j < t; ++j) is_train[members[j]] = true;
  }
  return is_train;
}

inline Dataset BuildDataset(const std::vector<ClassSpec>& config, std::size_t per_class,
                            std::size_t n, double fs, double train_frac, std::uint64_t seed) {
  if (config.empty()) throw ParameterError("dataset needs at least one class");
  if (per_class < 2) throw ParameterError("per_class must be >= 2");
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ParameterError("train_frac must lie in (0, 1)");
  if (n == 0) throw ParameterError("signal length must be > 0");
  for (std::size_t a = 0; a < config.size(); ++a) {
    for (std::size_t b = a + 1; b < config.size(); ++b) {
      if (config[a].name == config[b].name) throw ParameterError("duplicate class name " + config[a].name);
    }
  }

  Rng rng(seed);
  Dataset ds;
  ds.seed = seed;
  ds.fs = fs;
  for (std::size_t c = 0; c < config.size(); ++c) {
    ds.class_names.push_back(config[c].name);
    for (std::size_t s = 0; s < per_class; ++s) {
      ds.signals.push_back(Standardize(SynthSample(config[c], fs, n, rng)));
      ds.labels.push_back(static_cast<int>(c));
    }
  }
  ds.is_train = StratifiedSplit(ds.labels, config.size(), train_frac, rng);
  return ds;
}

}  // namespace shep
