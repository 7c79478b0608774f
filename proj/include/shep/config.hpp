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

// Run configuration: an INI file with sections, e.g.
//
//   [run]
//   seed = 7
//   out = runs/freq48
//   [dataset]
//   source = synthetic
//   per_class = 50
//   [transform]
//   domain = freq
//   [attribution]
//   patch = 48
//   methods = shep, mask, scale
//
// Every key is optional; unknown sections and keys are rejected.

#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "shep/attribution.hpp"
#include "shep/common.hpp"
#include "shep/patching.hpp"
#include "shep/transforms.hpp"

namespace shep {

struct RunConfig {
  // [run]
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out = "shep_out";

  // [dataset]
  std::string dataset_source = "synthetic";  // synthetic | dataset | files
  std::string dataset_path;                  // dataset directory when source = dataset
  std::vector<std::string> files;            // inputs when source = files
  std::string manifest;
  std::string label;
  std::size_t per_class = 50;
  std::size_t length = 2000;
  double fs = 10000.0;
  double train_frac = 0.7;
  double snr_db = 0.0;

  // [transform]
  Domain domain = Domain::kFreq;
  StftConfig stft;
  double env_max_hz = 600.0;

  // [attribution]
  std::optional<PatchSpec> patch;
  std::vector<Method> methods = {Method::kShep};
  std::string samples = "test";  // test | per_class:N | comma-separated dataset indices
  std::size_t background_per_class = 5;
  std::size_t kp = 5;
  std::vector<double> scale_factors = DefaultScaleFactors();
  std::size_t max_d = kDefaultMaxExactPatches;
  bool save_reps = false;

  // [predictor]
  std::string predictor_source = "fit-reference";  // fit-reference | mlp
  std::string predictor_path;
  double gamma = 5.0;

  // [compare]
  std::string reference = "";
  std::string candidate = "";
  std::string reference_method = "shap_exact";

  // [bench]
  std::vector<Domain> bench_domains = {Domain::kFreq};
  std::map<Domain, std::vector<PatchSpec>> bench_levels;
  std::size_t reps = 5;
  std::size_t bench_sample = 0;

  TransformOptions transform_options() const {
    TransformOptions t;
    t.env_max_hz = env_max_hz;
    if (domain == Domain::kTF || domain == Domain::kCS) t.stft = stft;
    for (Domain d : bench_domains) {
      if (d == Domain::kTF || d == Domain::kCS) t.stft = stft;
    }
    return t;
  }
};

namespace internal {

inline std::string Trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(text);
  while (std::getline(ss, cur, ',')) {
    cur = Trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline std::uint64_t ToUnsigned(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long x = 0;
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    x = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

inline double ToDouble(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || std::isnan(x)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

inline bool ToBool(const std::string& key, const std::string& v) {
  const auto l = ToLower(v);
  if (l == "true" || l == "yes" || l == "1" || l == "on") return true;
  if (l == "false" || l == "no" || l == "0" || l == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

// Rethrows parse errors of the value types as ConfigError naming the key.
template <typename F>
auto Field(const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

inline std::vector<PatchSpec> ParsePatchList(const std::string& key, const std::string& v) {
  std::vector<PatchSpec> out;
  for (const auto& item : SplitList(v)) out.push_back(Field(key, [&] { return PatchSpec::Parse(item); }));
  return out;
}

}  // namespace internal

// Applies one key. Shared by the file parser and command-line overrides.
inline void SetConfigValue(RunConfig& c, const std::string& section, const std::string& key,
                           const std::string& raw) {
  using namespace internal;
  const std::string v = Trim(raw);
  const std::string name = section + "." + key;
  auto unknown = [&] { throw ConfigError("unknown configuration key '" + name + "'"); };
  if (section == "run") {
    if (key == "seed") c.seed = ToUnsigned(name, v);
    else if (key == "workers") c.workers = ToUnsigned(name, v);
    else if (key == "out") c.out = v;
    else unknown();
  } else if (section == "dataset") {
    if (key == "source") c.dataset_source = ToLower(v);
    else if (key == "path") c.dataset_path = v;
    else if (key == "files") c.files = SplitList(v);
    else if (key == "manifest") c.manifest = v;
    else if (key == "label") c.label = v;
    else if (key == "per_class") c.per_class = ToUnsigned(name, v);
    else if (key == "length") c.length = ToUnsigned(name, v);
    else if (key == "fs") c.fs = ToDouble(name, v);
    else if (key == "train_frac") c.train_frac = ToDouble(name, v);
    else if (key == "snr_db") c.snr_db = ToLower(v) == "inf" ? std::numeric_limits<double>::infinity() : ToDouble(name, v);
    else unknown();
  } else if (section == "transform") {
    if (key == "domain") c.domain = Field(name, [&] { return ParseDomain(v); });
    else if (key == "window_len") c.stft.window_len = ToUnsigned(name, v);
    else if (key == "hop") c.stft.hop = ToUnsigned(name, v);
    else if (key == "window") c.stft.window = Field(name, [&] { return ParseWindow(v); });
    else if (key == "center") c.stft.center = ToBool(name, v);
    else if (key == "env_max_hz") c.env_max_hz = ToDouble(name, v);
    else unknown();
  } else if (section == "attribution") {
    if (key == "patch") c.patch = Field(name, [&] { return PatchSpec::Parse(v); });
    else if (key == "methods") {
      c.methods.clear();
      for (const auto& m : SplitList(v)) c.methods.push_back(Field(name, [&] { return ParseMethod(m); }));
    } else if (key == "samples") c.samples = v;
    else if (key == "background_per_class") c.background_per_class = ToUnsigned(name, v);
    else if (key == "kp") c.kp = ToUnsigned(name, v);
    else if (key == "scale_factors") {
      c.scale_factors.clear();
      for (const auto& f : SplitList(v)) c.scale_factors.push_back(ToDouble(name, f));
    } else if (key == "max_d") c.max_d = ToUnsigned(name, v);
    else if (key == "save_reps") c.save_reps = ToBool(name, v);
    else unknown();
  } else if (section == "predictor") {
    if (key == "source") c.predictor_source = ToLower(v);
    else if (key == "path") c.predictor_path = v;
    else if (key == "gamma") c.gamma = ToDouble(name, v);
    else unknown();
  } else if (section == "compare") {
    if (key == "reference") c.reference = v;
    else if (key == "candidate") c.candidate = v;
    else if (key == "reference_method") c.reference_method = v;
    else unknown();
  } else if (section == "bench") {
    if (key == "domains") {
      c.bench_domains.clear();
      for (const auto& d : SplitList(v)) c.bench_domains.push_back(Field(name, [&] { return ParseDomain(d); }));
    } else if (key == "freq_patches") c.bench_levels[Domain::kFreq] = ParsePatchList(name, v);
    else if (key == "env_patches") c.bench_levels[Domain::kEnv] = ParsePatchList(name, v);
    else if (key == "tf_patches") c.bench_levels[Domain::kTF] = ParsePatchList(name, v);
    else if (key == "cs_patches") c.bench_levels[Domain::kCS] = ParsePatchList(name, v);
    else if (key == "reps") c.reps = ToUnsigned(name, v);
    else if (key == "sample") c.bench_sample = ToUnsigned(name, v);
    else unknown();
  } else {
    throw ConfigError("unknown configuration section '[" + section + "]'");
  }
}

inline void ParseConfigText(RunConfig& c, const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' must appear inside a [section]");
    for (const auto& [key, value] : body) SetConfigValue(c, section, key, value.data());
  }
}

// Checks cross-field constraints. Called before any computation.
inline void ValidateConfig(const RunConfig& c) {
  if (c.workers < 1) throw ConfigError("run.workers must be >= 1");
  if (c.out.empty()) throw ConfigError("run.out must not be empty");
  static const std::set<std::string> sources = {"synthetic", "dataset", "files"};
  if (!sources.count(c.dataset_source)) {
    throw ConfigError("dataset.source must be synthetic, dataset or files, got '" + c.dataset_source + "'");
  }
  if (c.dataset_source == "dataset" && c.dataset_path.empty()) throw ConfigError("dataset.path is required");
  if (c.per_class < 2) throw ConfigError("dataset.per_class must be >= 2");
  if (c.length < 2) throw ConfigError("dataset.length must be >= 2");
  if (!(c.fs > 0.0) || !std::isfinite(c.fs)) throw ConfigError("dataset.fs must be > 0");
  if (!(c.train_frac > 0.0 && c.train_frac < 1.0)) throw ConfigError("dataset.train_frac must lie in (0, 1)");
  if (!(c.env_max_hz > 0.0)) throw ConfigError("transform.env_max_hz must be > 0");
  bool needs_stft = c.domain == Domain::kTF || c.domain == Domain::kCS;
  for (Domain d : c.bench_domains) needs_stft = needs_stft || d == Domain::kTF || d == Domain::kCS;
  if (needs_stft) {
    try {
      ValidateStftConfig(c.stft);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  if (c.methods.empty()) throw ConfigError("attribution.methods must list at least one method");
  if (c.background_per_class < 1) throw ConfigError("attribution.background_per_class must be >= 1");
  if (c.kp < 1) throw ConfigError("attribution.kp must be >= 1");
  if (c.scale_factors.empty()) throw ConfigError("attribution.scale_factors must not be empty");
  for (double f : c.scale_factors) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("attribution.scale_factors must be finite and >= 0");
  }
  if (c.predictor_source != "fit-reference" && c.predictor_source != "mlp") {
    throw ConfigError("predictor.source must be fit-reference or mlp");
  }
  if (c.predictor_source == "mlp" && c.predictor_path.empty()) throw ConfigError("predictor.path is required for mlp");
  if (!(c.gamma > 0.0)) throw ConfigError("predictor.gamma must be > 0");
  if (c.reps < 1) throw ConfigError("bench.reps must be >= 1");
  if (c.bench_domains.empty()) throw ConfigError("bench.domains must not be empty");
  if (c.samples != "test" && c.samples.rfind("per_class:", 0) != 0) {
    for (const auto& s : internal::SplitList(c.samples)) internal::ToUnsigned("attribution.samples", s);
  }
}

inline nlohmann::json ToJson(const RunConfig& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : c.methods) methods.push_back(std::string(MethodName(m)));
  nlohmann::json domains = nlohmann::json::array();
  for (Domain d : c.bench_domains) domains.push_back(std::string(DomainName(d)));
  nlohmann::json levels = nlohmann::json::object();
  for (const auto& [d, specs] : c.bench_levels) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& s : specs) list.push_back(s.ToString());
    levels[std::string(DomainName(d))] = list;
  }
  return {
      {"run", {{"seed", c.seed}, {"workers", c.workers}, {"out", c.out}}},
      {"dataset",
       {{"source", c.dataset_source}, {"path", c.dataset_path}, {"files", c.files}, {"manifest", c.manifest},
        {"label", c.label}, {"per_class", c.per_class}, {"length", c.length}, {"fs", c.fs},
        {"train_frac", c.train_frac},
        {"snr_db", std::isinf(c.snr_db) ? nlohmann::json("inf") : nlohmann::json(c.snr_db)}}},
      {"transform",
       {{"domain", std::string(DomainName(c.domain))}, {"window_len", c.stft.window_len}, {"hop", c.stft.hop},
        {"window", std::string(WindowName(c.stft.window))}, {"center", c.stft.center},
        {"env_max_hz", c.env_max_hz}}},
      {"attribution",
       {{"patch", c.patch ? nlohmann::json(c.patch->ToString()) : nlohmann::json(nullptr)},
        {"methods", methods},
        {"samples", c.samples},
        {"background_per_class", c.background_per_class},
        {"kp", c.kp},
        {"scale_factors", c.scale_factors},
        {"max_d", c.max_d},
        {"save_reps", c.save_reps}}},
      {"predictor", {{"source", c.predictor_source}, {"path", c.predictor_path}, {"gamma", c.gamma}}},
      {"compare",
       {{"reference", c.reference}, {"candidate", c.candidate}, {"reference_method", c.reference_method}}},
      {"bench", {{"domains", domains}, {"levels", levels}, {"reps", c.reps}, {"sample", c.bench_sample}}},
  };
}

}  // namespace shep
