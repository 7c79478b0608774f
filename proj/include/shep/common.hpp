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

// Shared value types, error hierarchy and small numeric helpers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace shep {

// Error hierarchy. Every error raised by the library derives from Error so
// callers (the CLI in particular) can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or configuration value supplied by the caller.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Configuration that is well-formed but unusable (e.g. non-COLA window/hop).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input that is mathematically degenerate (zero power, zero variance).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Internally inconsistent values (shape mismatch between z and remains,
// overlapping tiles, mismatched geometry).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

// Dataset content errors (missing class, mismatched pairing).
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed model weight files.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Malformed external signal files.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration refused because 2^d * n evaluations exceed the guard.
class ComplexityGuardError : public Error {
 public:
  using Error::Error;
};

// Cosine similarity requested for a zero vector.
class UndefinedSimilarityError : public Error {
 public:
  using Error::Error;
};

// Uniformly sampled real-valued time series.
struct Signal {
  std::vector<double> samples;
  double fs = 0.0;

  std::size_t size() const { return samples.size(); }
};

inline void ValidateSignal(const Signal& sig) {
  if (sig.samples.empty()) throw ParameterError("signal is empty");
  if (!(sig.fs > 0.0)) throw ParameterError("signal sample rate must be > 0");
  for (double v : sig.samples) {
    if (!std::isfinite(v)) throw ParameterError("signal has non-finite values");
  }
}

// Dense row-major 2-D array. One-dimensional representations use rows == 1.
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Grid() = default;
  Grid(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}
  Grid(std::size_t r, std::size_t c, std::vector<double> v)
      : rows(r), cols(c), values(std::move(v)) {
    if (values.size() != rows * cols) {
      throw InconsistencyError("grid value count does not match its shape");
    }
  }

  std::size_t size() const { return values.size(); }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  bool operator==(const Grid&) const = default;
};

// Mean of values in the order given, accumulated as a running mean. A
// sequence of identical values returns that value bit-exactly, which keeps
// expectations over a constant coalition equal to the single evaluation.
class RunningMean {
 public:
  explicit RunningMean(std::size_t width) : mean_(width, 0.0) {}

  void Add(std::span<const double> v) {
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    if (count_ == 1) {
      std::copy(v.begin(), v.end(), mean_.begin());
      return;
    }
    for (std::size_t k = 0; k < mean_.size(); ++k) {
      mean_[k] += (v[k] - mean_[k]) * inv;
    }
  }

  const std::vector<double>& value() const { return mean_; }
  std::size_t count() const { return count_; }

 private:
  std::vector<double> mean_;
  std::size_t count_ = 0;
};

// Runs fn(i) for i in [0, count) across `workers` threads using a static
// contiguous partition. fn must only write to state owned by index i.
template <typename Fn>
void ParallelFor(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    threads.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace shep
