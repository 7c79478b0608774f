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

// Invertible domain transforms x -> (z, r). z is always a squared magnitude
// and is what attribution operates on; the remains r (phases, means, spectral
// tails) are carried along unchanged so that any non-negative z of the right
// shape can be mapped back to a time signal.
//
//   Freq  z = |rfft(x)|^2                         r = {phase}
//   Env   z = |rfft(|a| - mean|a|)|^2, in band    r = {analytic phase, mean,
//                                                      envelope phase, tail}
//   TF    z = |STFT|^2                            r = {STFT phase}
//   CS    z = |rfft_t(|STFT|^2)|^2                r = {STFT phase, alpha phase}

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shep/common.hpp"
#include "shep/fft.hpp"

namespace shep {

using fft::Complex;

enum class Domain { kFreq, kEnv, kTF, kCS };

inline std::string_view DomainName(Domain d) {
  switch (d) {
    case Domain::kFreq: return "freq";
    case Domain::kEnv: return "env";
    case Domain::kTF: return "tf";
    case Domain::kCS: return "cs";
  }
  return "?";
}

inline Domain ParseDomain(std::string_view s) {
  const std::string v = ToLower(s);
  if (v == "freq") return Domain::kFreq;
  if (v == "env") return Domain::kEnv;
  if (v == "tf") return Domain::kTF;
  if (v == "cs") return Domain::kCS;
  throw ParameterError("unknown domain '" + std::string(s) + "' (expected freq|env|tf|cs)");
}

enum class WindowKind { kHann, kHamming, kRectangular };

inline std::string_view WindowName(WindowKind w) {
  switch (w) {
    case WindowKind::kHann: return "hann";
    case WindowKind::kHamming: return "hamming";
    case WindowKind::kRectangular: return "rectangular";
  }
  return "?";
}

inline WindowKind ParseWindow(std::string_view s) {
  const std::string v = ToLower(s);
  if (v == "hann") return WindowKind::kHann;
  if (v == "hamming") return WindowKind::kHamming;
  if (v == "rectangular" || v == "rect") return WindowKind::kRectangular;
  throw ParameterError("unknown window '" + std::string(s) + "'");
}

struct StftConfig {
  std::size_t window_len = 50;
  std::size_t hop = 10;
  WindowKind window = WindowKind::kHann;
  bool center = true;  // zero-pad window_len/2 samples on both sides

  std::size_t pad() const { return center ? window_len / 2 : 0; }
  std::size_t bins() const { return window_len / 2 + 1; }
  bool operator==(const StftConfig&) const = default;
};

// Periodic windows, which are the COLA-compliant variants.
inline std::vector<double> MakeWindow(WindowKind kind, std::size_t len) {
  std::vector<double> w(len, 1.0);
  const double l = static_cast<double>(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double c = std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / l);
    if (kind == WindowKind::kHann) w[i] = 0.5 - 0.5 * c;
    if (kind == WindowKind::kHamming) w[i] = 0.54 - 0.46 * c;
  }
  return w;
}

// True when sum_k w[t - k*hop] is the same for every t.
inline bool SatisfiesCola(const StftConfig& cfg, double rel_tol = 1e-9) {
  if (cfg.hop == 0 || cfg.hop > cfg.window_len) return false;
  const auto w = MakeWindow(cfg.window, cfg.window_len);
  std::vector<double> sums(cfg.hop, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) sums[i % cfg.hop] += w[i];
  const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
  return *hi > 0.0 && (*hi - *lo) <= rel_tol * *hi;
}

inline void ValidateStftConfig(const StftConfig& cfg) {
  if (cfg.window_len < 2) throw ParameterError("STFT window_len must be >= 2");
  if (cfg.hop == 0 || cfg.hop > cfg.window_len) {
    throw ParameterError("STFT hop must satisfy 0 < hop <= window_len");
  }
  if (!SatisfiesCola(cfg)) {
    throw ConfigError("window '" + std::string(WindowName(cfg.window)) + "' with length " +
                      std::to_string(cfg.window_len) + " and hop " + std::to_string(cfg.hop) +
                      " violates the constant-overlap-add condition");
  }
}

inline std::size_t StftFrameCount(const StftConfig& cfg, std::size_t n) {
  const std::size_t padded = n + 2 * cfg.pad();
  if (padded < cfg.window_len) throw ParameterError("signal shorter than the STFT window");
  return 1 + (padded - cfg.window_len) / cfg.hop;
}

// Complex STFT matrix, frequency-major: rows = window_len/2+1 bins,
// cols = frames.
struct ComplexGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> values;

  Complex& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  const Complex& at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

inline ComplexGrid Stft(std::span<const double> x, const StftConfig& cfg) {
  ValidateStftConfig(cfg);
  const std::size_t frames = StftFrameCount(cfg, x.size());
  const std::size_t pad = cfg.pad();
  const auto w = MakeWindow(cfg.window, cfg.window_len);
  ComplexGrid out{cfg.bins(), frames, std::vector<Complex>(cfg.bins() * frames)};
  std::vector<double> frame(cfg.window_len);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * cfg.hop;
    for (std::size_t i = 0; i < cfg.window_len; ++i) {
      const std::size_t p = start + i;
      const double v = (p >= pad && p - pad < x.size()) ? x[p - pad] : 0.0;
      frame[i] = v * w[i];
    }
    const auto spec = fft::Rfft(frame);
    for (std::size_t k = 0; k < spec.size(); ++k) out.at(k, f) = spec[k];
  }
  return out;
}

// Least-squares overlap-add inverse (Griffin-Lim weighting): each frame is
// inverted, windowed again and normalized by sum of squared windows.
inline std::vector<double> Istft(const ComplexGrid& m, const StftConfig& cfg, std::size_t out_len) {
  ValidateStftConfig(cfg);
  if (m.rows != cfg.bins()) throw ParameterError("STFT matrix row count does not match window_len/2+1");
  if (out_len + 2 * cfg.pad() < cfg.window_len || m.cols != StftFrameCount(cfg, out_len)) {
    throw ParameterError("out_len " + std::to_string(out_len) + " is inconsistent with " +
                         std::to_string(m.cols) + " STFT frames");
  }
  const std::size_t pad = cfg.pad();
  const std::size_t padded = out_len + 2 * pad;
  const auto w = MakeWindow(cfg.window, cfg.window_len);
  std::vector<double> acc(padded, 0.0), norm(padded, 0.0);
  std::vector<Complex> spec(cfg.bins());
  for (std::size_t f = 0; f < m.cols; ++f) {
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] = m.at(k, f);
    const auto frame = fft::Irfft(spec, cfg.window_len);
    const std::size_t start = f * cfg.hop;
    for (std::size_t i = 0; i < cfg.window_len; ++i) {
      acc[start + i] += w[i] * frame[i];
      norm[start + i] += w[i] * w[i];
    }
  }
  std::vector<double> out(out_len, 0.0);
  for (std::size_t t = 0; t < out_len; ++t) {
    const double d = norm[t + pad];
    out[t] = d > 1e-12 ? acc[t + pad] / d : 0.0;
  }
  return out;
}

// Analytic signal via the frequency-domain construction: keep DC (and
// Nyquist for even n), double positive frequencies, zero negative ones.
inline std::vector<Complex> HilbertAnalytic(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw ParameterError("analytic signal needs at least 2 samples");
  const auto half = fft::Rfft(x);
  std::vector<Complex> full(n, Complex(0.0, 0.0));
  full[0] = half[0];
  const std::size_t positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (std::size_t k = 1; k < positive_end; ++k) full[k] = 2.0 * half[k];
  if (n % 2 == 0) full[n / 2] = half[n / 2];
  fft::Transform(full, /*inverse=*/true);
  return full;
}

struct NamedArray {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

struct RepMeta {
  std::size_t length = 0;  // original signal length
  double fs = 0.0;
  std::optional<StftConfig> stft;
  double env_max_hz = 600.0;
  std::size_t env_bins = 0;  // in-band envelope-spectrum bins kept in z
};

struct DomainRep {
  Domain domain = Domain::kFreq;
  Grid z;
  std::vector<NamedArray> remains;
  RepMeta meta;

  std::size_t remain_count() const { return remains.size(); }
  const NamedArray& remain(std::string_view name) const {
    for (const auto& r : remains) {
      if (r.name == name) return r;
    }
    throw InconsistencyError("domain representation lacks remain '" + std::string(name) + "'");
  }
};

struct TransformOptions {
  std::optional<StftConfig> stft;
  double env_max_hz = 600.0;
};

namespace internal {

inline NamedArray PhaseArray(std::string name, std::size_t rows, std::size_t cols,
                             std::span<const Complex> v) {
  NamedArray out{std::move(name), rows, cols, std::vector<double>(v.size())};
  for (std::size_t i = 0; i < v.size(); ++i) out.values[i] = std::arg(v[i]);
  return out;
}

inline Grid PowerGrid(std::size_t rows, std::size_t cols, std::span<const Complex> v) {
  Grid out(rows, cols);
  for (std::size_t i = 0; i < v.size(); ++i) out.values[i] = std::norm(v[i]);
  return out;
}

inline void Expect(bool ok, const std::string& what) {
  if (!ok) throw InconsistencyError(what);
}

inline std::size_t EnvelopeBins(double max_hz, double fs, std::size_t n) {
  const std::size_t one_sided = n / 2 + 1;
  if (!(max_hz > 0.0)) throw ParameterError("envelope band limit must be > 0");
  // Bins k with k * fs / n < max_hz.
  const double exact = max_hz * static_cast<double>(n) / fs;
  auto bins = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::clamp<std::size_t>(bins, 1, one_sided);
}

inline std::vector<double> Envelope(std::span<const Complex> analytic) {
  std::vector<double> e(analytic.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::abs(analytic[i]);
  return e;
}

}  // namespace internal

inline DomainRep Forward(Domain domain, const Signal& sig, const TransformOptions& opt = {}) {
  ValidateSignal(sig);
  const std::size_t n = sig.size();
  DomainRep rep;
  rep.domain = domain;
  rep.meta.length = n;
  rep.meta.fs = sig.fs;
  switch (domain) {
    case Domain::kFreq: {
      const auto spec = fft::Rfft(sig.samples);
      rep.z = internal::PowerGrid(1, spec.size(), spec);
      rep.remains.push_back(internal::PhaseArray("phase", 1, spec.size(), spec));
      break;
    }
    case Domain::kEnv: {
      const auto analytic = HilbertAnalytic(sig.samples);
      auto e = internal::Envelope(analytic);
      double mean = 0.0;
      for (double v : e) mean += v;
      mean /= static_cast<double>(n);
      for (double& v : e) v -= mean;
      const auto env_spec = fft::Rfft(e);
      const std::size_t bins = internal::EnvelopeBins(opt.env_max_hz, sig.fs, n);
      const std::span<const Complex> band(env_spec.data(), bins);
      rep.meta.env_max_hz = opt.env_max_hz;
      rep.meta.env_bins = bins;
      rep.z = internal::PowerGrid(1, bins, band);
      rep.remains.push_back(internal::PhaseArray("analytic_phase", 1, n, analytic));
      rep.remains.push_back(NamedArray{"envelope_mean", 1, 1, {mean}});
      rep.remains.push_back(internal::PhaseArray("envelope_phase", 1, bins, band));
      const std::size_t tail = env_spec.size() - bins;
      NamedArray t{"envelope_tail", 2, tail, std::vector<double>(2 * tail)};
      for (std::size_t k = 0; k < tail; ++k) {
        t.values[k] = env_spec[bins + k].real();
        t.values[tail + k] = env_spec[bins + k].imag();
      }
      rep.remains.push_back(std::move(t));
      break;
    }
    case Domain::kTF:
    case Domain::kCS: {
      if (!opt.stft) {
        throw ParameterError(std::string(DomainName(domain)) + " transform requires an STFT config");
      }
      const auto s = Stft(sig.samples, *opt.stft);
      rep.meta.stft = *opt.stft;
      if (domain == Domain::kTF) {
        rep.z = internal::PowerGrid(s.rows, s.cols, s.values);
        rep.remains.push_back(internal::PhaseArray("stft_phase", s.rows, s.cols, s.values));
        break;
      }
      const std::size_t alpha_bins = s.cols / 2 + 1;
      rep.z = Grid(s.rows, alpha_bins);
      NamedArray alpha_phase{"alpha_phase", s.rows, alpha_bins, std::vector<double>(s.rows * alpha_bins)};
      std::vector<double> power(s.cols);
      for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t c = 0; c < s.cols; ++c) power[c] = std::norm(s.at(r, c));
        const auto a = fft::Rfft(power);
        for (std::size_t k = 0; k < alpha_bins; ++k) {
          rep.z.at(r, k) = std::norm(a[k]);
          alpha_phase.values[r * alpha_bins + k] = std::arg(a[k]);
        }
      }
      rep.remains.push_back(internal::PhaseArray("stft_phase", s.rows, s.cols, s.values));
      rep.remains.push_back(std::move(alpha_phase));
      break;
    }
  }
  return rep;
}

// Maps a (possibly modified) z back to a time signal using ctx's remains.
// Negative entries are treated as zero; for CS the recovered |STFT|^2 is
// clamped at zero before the square root.
inline Signal Inverse(const DomainRep& ctx, std::span<const double> z) {
  using internal::Expect;
  const std::size_t n = ctx.meta.length;
  Expect(z.size() == ctx.z.size(), "z has " + std::to_string(z.size()) + " elements, expected " +
                                        std::to_string(ctx.z.size()));
  Signal out{{}, ctx.meta.fs};
  auto mag = [](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; };
  switch (ctx.domain) {
    case Domain::kFreq: {
      const auto& phase = ctx.remain("phase");
      Expect(phase.values.size() == z.size() && z.size() == n / 2 + 1, "freq remains do not match z");
      std::vector<Complex> spec(z.size());
      for (std::size_t k = 0; k < z.size(); ++k) spec[k] = std::polar(mag(z[k]), phase.values[k]);
      out.samples = fft::Irfft(spec, n);
      break;
    }
    case Domain::kEnv: {
      const auto& a_phase = ctx.remain("analytic_phase");
      const auto& mean = ctx.remain("envelope_mean");
      const auto& e_phase = ctx.remain("envelope_phase");
      const auto& tail = ctx.remain("envelope_tail");
      const std::size_t bins = z.size();
      Expect(a_phase.values.size() == n && mean.values.size() == 1 && e_phase.values.size() == bins &&
                 tail.cols + bins == n / 2 + 1 && tail.values.size() == 2 * tail.cols,
             "env remains do not match z");
      std::vector<Complex> spec(n / 2 + 1);
      for (std::size_t k = 0; k < bins; ++k) spec[k] = std::polar(mag(z[k]), e_phase.values[k]);
      for (std::size_t k = 0; k < tail.cols; ++k) {
        spec[bins + k] = Complex(tail.values[k], tail.values[tail.cols + k]);
      }
      auto e = fft::Irfft(spec, n);
      out.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        out.samples[i] = (e[i] + mean.values[0]) * std::cos(a_phase.values[i]);
      }
      break;
    }
    case Domain::kTF:
    case Domain::kCS: {
      Expect(ctx.meta.stft.has_value(), "STFT config missing from representation metadata");
      const StftConfig& cfg = *ctx.meta.stft;
      const auto& s_phase = ctx.remain("stft_phase");
      const std::size_t rows = cfg.bins();
      const std::size_t frames = StftFrameCount(cfg, n);
      Expect(s_phase.rows == rows && s_phase.cols == frames && s_phase.values.size() == rows * frames,
             "STFT phase does not match the configured geometry");
      ComplexGrid m{rows, frames, std::vector<Complex>(rows * frames)};
      if (ctx.domain == Domain::kTF) {
        Expect(z.size() == rows * frames, "tf z does not match STFT geometry");
        for (std::size_t i = 0; i < z.size(); ++i) m.values[i] = std::polar(mag(z[i]), s_phase.values[i]);
      } else {
        const auto& a_phase = ctx.remain("alpha_phase");
        const std::size_t alpha_bins = frames / 2 + 1;
        Expect(z.size() == rows * alpha_bins && a_phase.values.size() == z.size(),
               "cs z does not match STFT geometry");
        std::vector<Complex> a(alpha_bins);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t k = 0; k < alpha_bins; ++k) {
            a[k] = std::polar(mag(z[r * alpha_bins + k]), a_phase.values[r * alpha_bins + k]);
          }
          const auto power = fft::Irfft(a, frames);
          for (std::size_t c = 0; c < frames; ++c) {
            m.at(r, c) = std::polar(mag(power[c]), s_phase.values[r * frames + c]);
          }
        }
      }
      out.samples = Istft(m, cfg, n);
      break;
    }
  }
  return out;
}

inline Signal Inverse(const DomainRep& rep) { return Inverse(rep, rep.z.values); }

// Bin index -> frequency (Hz) along the first axis of z for 1-D domains, or
// along the row axis for TF/CS.
inline double BinFrequency(const DomainRep& rep, std::size_t bin) {
  if (rep.domain == Domain::kTF || rep.domain == Domain::kCS) {
    return static_cast<double>(bin) * rep.meta.fs / static_cast<double>(rep.meta.stft->window_len);
  }
  return static_cast<double>(bin) * rep.meta.fs / static_cast<double>(rep.meta.length);
}

}  // namespace shep
