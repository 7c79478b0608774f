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

// Thin FFTW wrapper. Plans are created once per (kind, size) under a mutex
// with FFTW_ESTIMATE so the chosen algorithm, and therefore the rounding, is
// the same on every run. Execution uses the new-array interface, which FFTW
// documents as thread-safe.

#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "shep/common.hpp"

namespace shep::fft {

using Complex = std::complex<double>;

namespace internal {

enum class PlanKind { kR2C, kC2R, kForward, kBackward };

inline fftw_plan GetPlan(PlanKind kind, std::size_t n) {
  static std::mutex mu;
  static std::map<std::pair<int, std::size_t>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(static_cast<int>(kind), n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::vector<double> real(n);
  std::vector<Complex> cplx(n);
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
  fftw_plan plan = nullptr;
  switch (kind) {
    case PlanKind::kR2C:
      plan = fftw_plan_dft_r2c_1d(len, real.data(), c, flags);
      break;
    case PlanKind::kC2R:
      plan = fftw_plan_dft_c2r_1d(len, c, real.data(), flags);
      break;
    case PlanKind::kForward:
      plan = fftw_plan_dft_1d(len, c, c, FFTW_FORWARD, flags);
      break;
    case PlanKind::kBackward:
      plan = fftw_plan_dft_1d(len, c, c, FFTW_BACKWARD, flags);
      break;
  }
  if (plan == nullptr) throw Error("FFTW failed to create a plan");
  cache.emplace(key, plan);
  return plan;
}

}  // namespace internal

// One-sided DFT of a real sequence, X[k] = sum_t x[t] e^{-j 2 pi k t / n},
// k = 0..n/2.
inline std::vector<Complex> Rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::vector<double> in(x.begin(), x.end());
  std::vector<Complex> out(n / 2 + 1);
  fftw_execute_dft_r2c(internal::GetPlan(internal::PlanKind::kR2C, n), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

// Inverse of Rfft for an output of length n. Normalized so Irfft(Rfft(x)) == x.
inline std::vector<double> Irfft(std::span<const Complex> spectrum, std::size_t n) {
  if (n == 0) return {};
  if (spectrum.size() != n / 2 + 1) {
    throw InconsistencyError("one-sided spectrum length does not match n/2+1");
  }
  std::vector<Complex> in(spectrum.begin(), spectrum.end());
  std::vector<double> out(n);
  fftw_execute_dft_c2r(internal::GetPlan(internal::PlanKind::kC2R, n),
                       reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

// Complex DFT in place. The inverse is normalized by 1/n.
inline void Transform(std::vector<Complex>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0) return;
  auto kind = inverse ? internal::PlanKind::kBackward : internal::PlanKind::kForward;
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(internal::GetPlan(kind, n), p, p);
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : data) v *= scale;
  }
}

}  // namespace shep::fft
