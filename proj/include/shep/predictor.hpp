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

// Classifiers that map a time signal to class probabilities, and the
// integrated model that evaluates a classifier on patched domain
// representations.

#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "shep/common.hpp"
#include "shep/fft.hpp"
#include "shep/patching.hpp"
#include "shep/simgen.hpp"
#include "shep/transforms.hpp"

namespace shep {

// Numerically stable softmax.
inline std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  if (out.empty()) return out;
  const double mx = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

// Time signal -> probability vector over K classes. Implementations must be
// immutable after construction so concurrent Predict calls are safe.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<double> Predict(const Signal& sig) const = 0;
  virtual std::size_t num_classes() const = 0;
  // 0 means any length is accepted.
  virtual std::size_t input_length() const = 0;
  virtual double sample_rate() const = 0;

 protected:
  void CheckLength(const Signal& sig) const {
    if (input_length() != 0 && sig.size() != input_length()) {
      throw ParameterError("predictor expects " + std::to_string(input_length()) +
                           " samples, got " + std::to_string(sig.size()));
    }
  }
};

// ---------------------------------------------------------------------------
// Band-energy nearest-centroid reference classifier.

struct Band {
  Domain domain = Domain::kFreq;  // kFreq or kEnv
  double center_hz = 0.0;
  double half_width_hz = 0.0;
};

// Carrier bands at 1.5/2.5/3.5 kHz +- 150 Hz, modulation bands at
// 50/100/125 Hz +- 10 Hz, then the second and third modulation harmonics of
// the two fault components.
inline std::vector<Band> DefaultBands() {
  return {
      {Domain::kFreq, 1500.0, 150.0}, {Domain::kFreq, 2500.0, 150.0}, {Domain::kFreq, 3500.0, 150.0},
      {Domain::kEnv, 50.0, 10.0},     {Domain::kEnv, 100.0, 10.0},    {Domain::kEnv, 125.0, 10.0},
      {Domain::kEnv, 200.0, 10.0},    {Domain::kEnv, 300.0, 10.0},    {Domain::kEnv, 250.0, 10.0},
      {Domain::kEnv, 375.0, 10.0},
  };
}

// Added to every per-class feature variance, in standardized units.
inline constexpr double kClassVarianceFloor = 1e-3;

inline constexpr double kBandEnergyEpsilon = 1e-12;

namespace internal {

inline std::pair<std::size_t, std::size_t> BandBins(const Band& band, double fs, std::size_t n) {
  if (band.domain != Domain::kFreq && band.domain != Domain::kEnv) {
    throw ConfigError("bands must be defined in the freq or env domain");
  }
  if (band.center_hz + band.half_width_hz > fs / 2.0 + 1e-9 || band.half_width_hz < 0.0) {
    throw ConfigError("band " + std::to_string(band.center_hz) + " Hz exceeds Nyquist");
  }
  const double res = fs / static_cast<double>(n);
  const double lo = (band.center_hz - band.half_width_hz) / res;
  const double hi = (band.center_hz + band.half_width_hz) / res;
  const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(lo - 1e-9)));
  const auto last = static_cast<std::size_t>(std::floor(hi + 1e-9));
  if (last < first || first > n / 2) {
    throw ConfigError("band at " + std::to_string(band.center_hz) + " Hz contains no bins");
  }
  return {first, std::min(last, n / 2)};
}

}  // namespace internal

// log(eps + sum of squared spectral magnitude over each band). Freq bands
// read |rfft(x)|^2, Env bands read |rfft(|analytic(x)| - mean)|^2.
inline std::vector<double> BandEnergyFeatures(const Signal& sig, std::span<const Band> bands) {
  const std::size_t n = sig.size();
  if (n < 2) throw ParameterError("band features need at least 2 samples");
  bool need_freq = false, need_env = false;
  for (const auto& b : bands) {
    internal::BandBins(b, sig.fs, n);
    (b.domain == Domain::kFreq ? need_freq : need_env) = true;
  }
  std::vector<double> freq_power, env_power;
  if (need_freq) {
    for (const auto& c : fft::Rfft(sig.samples)) freq_power.push_back(std::norm(c));
  }
  if (need_env) {
    auto e = internal::Envelope(HilbertAnalytic(sig.samples));
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : e) v -= mean;
    for (const auto& c : fft::Rfft(e)) env_power.push_back(std::norm(c));
  }
  std::vector<double> feats;
  feats.reserve(bands.size());
  for (const auto& b : bands) {
    const auto [first, last] = internal::BandBins(b, sig.fs, n);
    const auto& power = b.domain == Domain::kFreq ? freq_power : env_power;
    double sum = 0.0;
    for (std::size_t k = first; k <= last; ++k) sum += power[k];
    feats.push_back(std::log(kBandEnergyEpsilon + sum));
  }
  return feats;
}

class ReferencePredictor final : public Predictor {
 public:
  ReferencePredictor(std::vector<Band> bands, std::vector<double> feature_mean,
                     std::vector<double> feature_std, std::vector<std::vector<double>> centroids,
                     std::vector<std::vector<double>> class_variance, double gamma, std::size_t input_length,
                     double fs)
      : bands_(std::move(bands)),
        mean_(std::move(feature_mean)),
        std_(std::move(feature_std)),
        centroids_(std::move(centroids)),
        var_(std::move(class_variance)),
        gamma_(gamma),
        length_(input_length),
        fs_(fs) {
    const std::size_t dim = bands_.size();
    if (dim == 0 || mean_.size() != dim || std_.size() != dim) {
      throw ParameterError("feature statistics must match the band count");
    }
    if (centroids_.empty()) throw ParameterError("reference predictor needs at least one centroid");
    for (const auto& c : centroids_) {
      if (c.size() != dim) throw ParameterError("centroid dimension must match the band count");
    }
    if (var_.size() != centroids_.size()) throw ParameterError("one variance vector per class is required");
    for (const auto& v : var_) {
      if (v.size() != dim) throw ParameterError("class variance dimension must match the band count");
      for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ParameterError("class variances must be finite and > 0");
      }
    }
    for (double s : std_) {
      if (!(s > 0.0)) throw ParameterError("feature scale must be > 0");
    }
  }

  std::vector<double> Predict(const Signal& sig) const override {
    CheckLength(sig);
    return PredictFeatures(BandEnergyFeatures(sig, bands_));
  }

  // Softmax of -gamma * D_k, where D_k is the diagonal Gaussian distance of
  // the standardized features to class k:
  //   D_k = sum_j (z_j - c_kj)^2 / v_kj + log v_kj.
  std::vector<double> PredictFeatures(std::span<const double> raw) const {
    std::vector<double> logits(centroids_.size());
    for (std::size_t k = 0; k < centroids_.size(); ++k) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < raw.size(); ++j) {
        const double diff = (raw[j] - mean_[j]) / std_[j] - centroids_[k][j];
        d2 += diff * diff / var_[k][j] + std::log(var_[k][j]);
      }
      logits[k] = -gamma_ * d2;
    }
    return Softmax(logits);
  }

  std::vector<double> StandardizedFeatures(const Signal& sig) const {
    auto f = BandEnergyFeatures(sig, bands_);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = (f[j] - mean_[j]) / std_[j];
    return f;
  }

  std::size_t num_classes() const override { return centroids_.size(); }
  std::size_t input_length() const override { return length_; }
  double sample_rate() const override { return fs_; }

  const std::vector<Band>& bands() const { return bands_; }
  const std::vector<double>& feature_mean() const { return mean_; }
  const std::vector<double>& feature_std() const { return std_; }
  const std::vector<std::vector<double>>& centroids() const { return centroids_; }
  const std::vector<std::vector<double>>& class_variance() const { return var_; }
  double gamma() const { return gamma_; }

 private:
  std::vector<Band> bands_;
  std::vector<double> mean_, std_;
  std::vector<std::vector<double>> centroids_;
  std::vector<std::vector<double>> var_;
  double gamma_;
  std::size_t length_;
  double fs_;
};

// Fits feature standardization on the training split, then per-class means
// and variances (plus kClassVarianceFloor) of the standardized features.
inline ReferencePredictor FitReference(const Dataset& ds, std::vector<Band> bands = DefaultBands(),
                                       double gamma = 5.0) {
  const auto train = ds.Indices(/*train=*/true);
  if (train.empty()) throw DataError("training split is empty");
  const std::size_t dim = bands.size();
  std::vector<std::vector<double>> feats;
  for (std::size_t i : train) feats.push_back(BandEnergyFeatures(ds.signals[i], bands));

  std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
  for (const auto& f : feats) {
    for (std::size_t j = 0; j < dim; ++j) mean[j] += f[j];
  }
  for (double& m : mean) m /= static_cast<double>(feats.size());
  for (const auto& f : feats) {
    for (std::size_t j = 0; j < dim; ++j) sd[j] += (f[j] - mean[j]) * (f[j] - mean[j]);
  }
  for (double& s : sd) {
    s = std::sqrt(s / static_cast<double>(feats.size()));
    if (!(s > 0.0)) s = 1.0;
  }

  const std::size_t k_classes = ds.num_classes();
  std::vector<std::vector<double>> centroids(k_classes, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(k_classes, 0);
  for (std::size_t t = 0; t < train.size(); ++t) {
    const auto c = static_cast<std::size_t>(ds.labels[train[t]]);
    ++counts[c];
    for (std::size_t j = 0; j < dim; ++j) centroids[c][j] += (feats[t][j] - mean[j]) / sd[j];
  }
  for (std::size_t c = 0; c < k_classes; ++c) {
    if (counts[c] == 0) throw DataError("class '" + ds.class_names[c] + "' has no training samples");
    for (double& v : centroids[c]) v /= static_cast<double>(counts[c]);
  }
  std::vector<std::vector<double>> var(k_classes, std::vector<double>(dim, 0.0));
  for (std::size_t t = 0; t < train.size(); ++t) {
    const auto c = static_cast<std::size_t>(ds.labels[train[t]]);
    for (std::size_t j = 0; j < dim; ++j) {
      const double e = (feats[t][j] - mean[j]) / sd[j] - centroids[c][j];
      var[c][j] += e * e;
    }
  }
  for (std::size_t c = 0; c < k_classes; ++c) {
    for (double& v : var[c]) v = v / static_cast<double>(counts[c]) + kClassVarianceFloor;
  }
  const std::size_t length = ds.signals.empty() ? 0 : ds.signals.front().size();
  return ReferencePredictor(std::move(bands), std::move(mean), std::move(sd), std::move(centroids),
                            std::move(var), gamma, length, ds.fs);
}

inline nlohmann::json ToJson(const ReferencePredictor& p) {
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : p.bands()) {
    bands.push_back({{"domain", DomainName(b.domain)}, {"center_hz", b.center_hz},
                     {"half_width_hz", b.half_width_hz}});
  }
  return {{"kind", "reference_predictor"}, {"bands", bands},
          {"feature_mean", p.feature_mean()}, {"feature_std", p.feature_std()},
          {"centroids", p.centroids()},       {"class_variance", p.class_variance()},
          {"gamma", p.gamma()},
          {"input_length", p.input_length()}, {"fs", p.sample_rate()}};
}

inline ReferencePredictor ReferenceFromJson(const nlohmann::json& j) {
  try {
    std::vector<Band> bands;
    for (const auto& b : j.at("bands")) {
      bands.push_back({ParseDomain(b.at("domain").get<std::string>()), b.at("center_hz").get<double>(),
                       b.at("half_width_hz").get<double>()});
    }
    return ReferencePredictor(std::move(bands), j.at("feature_mean").get<std::vector<double>>(),
                              j.at("feature_std").get<std::vector<double>>(),
                              j.at("centroids").get<std::vector<std::vector<double>>>(),
                              j.at("class_variance").get<std::vector<std::vector<double>>>(),
                              j.at("gamma").get<double>(), j.at("input_length").get<std::size_t>(),
                              j.at("fs").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed reference predictor: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Feed-forward network loaded from a weight file.

enum class Activation { kIdentity, kRelu };

struct DenseLayer {
  std::size_t in = 0, out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out
  Activation activation = Activation::kIdentity;
};

class MlpPredictor final : public Predictor {
 public:
  explicit MlpPredictor(std::vector<DenseLayer> layers, double fs = 0.0)
      : layers_(std::move(layers)), fs_(fs) {
    if (layers_.empty()) throw LoadError("network has no layers");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& l = layers_[i];
      const std::string where = "layer " + std::to_string(i) + ": ";
      if (l.in == 0 || l.out == 0) throw LoadError(where + "dimensions must be positive");
      if (i > 0 && l.in != layers_[i - 1].out) {
        throw LoadError(where + "input dimension " + std::to_string(l.in) +
                        " does not match previous output " + std::to_string(layers_[i - 1].out));
      }
      if (l.weights.size() != l.in * l.out || l.bias.size() != l.out) {
        throw LoadError(where + "parameter count does not match dimensions");
      }
      for (double v : l.weights) {
        if (!std::isfinite(v)) throw LoadError(where + "non-finite weight");
      }
      for (double v : l.bias) {
        if (!std::isfinite(v)) throw LoadError(where + "non-finite bias");
      }
    }
  }

  std::vector<double> Predict(const Signal& sig) const override {
    CheckLength(sig);
    return PredictVector(sig.samples);
  }

  std::vector<double> PredictVector(std::span<const double> input) const {
    std::vector<double> x(input.begin(), input.end());
    for (const auto& l : layers_) {
      std::vector<double> y(l.bias);
      for (std::size_t o = 0; o < l.out; ++o) {
        const double* w = l.weights.data() + o * l.in;
        double acc = 0.0;
        for (std::size_t i = 0; i < l.in; ++i) acc += w[i] * x[i];
        y[o] += acc;
        if (l.activation == Activation::kRelu && y[o] < 0.0) y[o] = 0.0;
      }
      x = std::move(y);
    }
    return Softmax(x);
  }

  std::size_t num_classes() const override { return layers_.back().out; }
  std::size_t input_length() const override { return layers_.front().in; }
  double sample_rate() const override { return fs_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

 private:
  std::vector<DenseLayer> layers_;
  double fs_;
};

// Weight file: one line of JSON header
//   {"format":"shep-mlp","version":1,"fs":F,
//    "layers":[{"in":I,"out":O,"activation":"relu"|"identity"},...]}
// terminated by '\n', followed by little-endian IEEE-754 float64 values:
// for each layer, the out x in weight matrix (row-major) then the bias.
namespace internal {

inline void AppendF64(std::string& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

inline double ReadF64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

}  // namespace internal

inline std::string SerializeMlp(const MlpPredictor& mlp) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : mlp.layers()) {
    layers.push_back({{"in", l.in}, {"out", l.out},
                      {"activation", l.activation == Activation::kRelu ? "relu" : "identity"}});
  }
  nlohmann::json header = {{"format", "shep-mlp"}, {"version", 1}, {"fs", mlp.sample_rate()},
                           {"layers", layers}};
  std::string out = header.dump() + "\n";
  for (const auto& l : mlp.layers()) {
    for (double v : l.weights) internal::AppendF64(out, v);
    for (double v : l.bias) internal::AppendF64(out, v);
  }
  return out;
}

inline MlpPredictor ParseMlp(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw LoadError("weight file has no header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, nl));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed weight-file header: ") + e.what());
  }
  if (header.value("format", "") != "shep-mlp") throw LoadError("unrecognized weight-file format");
  if (!header.contains("layers") || !header["layers"].is_array()) {
    throw LoadError("weight-file header has no layer list");
  }
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data()) + nl + 1;
  std::size_t remaining = bytes.size() - nl - 1;
  std::vector<DenseLayer> layers;
  const auto& hl = header["layers"];
  for (std::size_t i = 0; i < hl.size(); ++i) {
    const std::string where = "layer " + std::to_string(i) + ": ";
    DenseLayer l;
    try {
      l.in = hl[i].at("in").get<std::size_t>();
      l.out = hl[i].at("out").get<std::size_t>();
      const auto act = hl[i].value("activation", std::string("identity"));
      if (act == "relu") {
        l.activation = Activation::kRelu;
      } else if (act != "identity") {
        throw LoadError(where + "unknown activation '" + act + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(where + e.what());
    }
    if (i > 0 && l.in != layers.back().out) {
      throw LoadError(where + "input dimension " + std::to_string(l.in) +
                      " does not match previous output " + std::to_string(layers.back().out));
    }
    const std::size_t count = l.in * l.out + l.out;
    if (remaining < 8 * count) throw LoadError(where + "weight data truncated");
    for (std::size_t k = 0; k < l.in * l.out; ++k, data += 8) l.weights.push_back(internal::ReadF64(data));
    for (std::size_t k = 0; k < l.out; ++k, data += 8) l.bias.push_back(internal::ReadF64(data));
    remaining -= 8 * count;
    layers.push_back(std::move(l));
  }
  if (remaining != 0) throw LoadError("weight file has trailing data");
  return MlpPredictor(std::move(layers), header.value("fs", 0.0));
}

inline MlpPredictor LoadMlp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open weight file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseMlp(ss.str());
}

inline void SaveMlp(const MlpPredictor& mlp, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write weight file " + path);
  const auto bytes = SerializeMlp(mlp);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// ---------------------------------------------------------------------------
// Models over patched representations.

// A classifier whose input is a patched representation. Every evaluation is
// counted; the counter is atomic so concurrent evaluation keeps it exact.
class PatchModel {
 public:
  virtual ~PatchModel() = default;

  std::vector<double> Evaluate(const PatchRep& p) const {
    CheckGeometry(p);
    calls_.fetch_add(1, std::memory_order_relaxed);
    return DoEvaluate(p);
  }

  virtual std::size_t num_classes() const = 0;
  virtual const std::shared_ptr<const PatchGeometry>& geometry() const = 0;

  std::uint64_t call_count() const { return calls_.load(std::memory_order_relaxed); }
  void ResetCallCount() { calls_.store(0); }

  void CheckGeometry(const PatchRep& p) const {
    const auto& g = geometry();
    if (p.geometry != g && !(p.geometry && *p.geometry == *g)) {
      throw InconsistencyError("patch geometry does not match the model");
    }
    if (p.values.size() != g->total()) throw InconsistencyError("patch value count does not match the model");
  }

 protected:
  virtual std::vector<double> DoEvaluate(const PatchRep& p) const = 0;

 private:
  mutable std::atomic<std::uint64_t> calls_{0};
};

// Predictor composed with the inverse patch and inverse domain transforms.
// The remains of the analyzed sample stay fixed for every evaluation.
class IntegratedModel final : public PatchModel {
 public:
  IntegratedModel(std::shared_ptr<const Predictor> predictor, DomainRep context, PatchSpec spec)
      : predictor_(std::move(predictor)),
        context_(std::move(context)),
        geometry_(MakeGeometry(context_.z.rows, context_.z.cols, spec)) {}

  std::size_t num_classes() const override { return predictor_->num_classes(); }
  const std::shared_ptr<const PatchGeometry>& geometry() const override { return geometry_; }
  const DomainRep& context() const { return context_; }
  Domain domain() const { return context_.domain; }
  const Predictor& predictor() const { return *predictor_; }

  // Patches of the analyzed sample itself.
  PatchRep SamplePatches() const { return Patchify(context_.z, geometry_); }
  PatchRep PatchesOf(const DomainRep& rep) const {
    if (rep.domain != context_.domain) throw InconsistencyError("background domain differs from the model");
    return Patchify(rep.z, geometry_);
  }

  Signal Reconstruct(const PatchRep& p) const {
    std::vector<double> z(geometry_->total());
    UnpatchifyInto(p, z);
    return Inverse(context_, z);
  }

 protected:
  std::vector<double> DoEvaluate(const PatchRep& p) const override {
    return predictor_->Predict(Reconstruct(p));
  }

 private:
  std::shared_ptr<const Predictor> predictor_;
  DomainRep context_;
  std::shared_ptr<const PatchGeometry> geometry_;
};

}  // namespace shep
