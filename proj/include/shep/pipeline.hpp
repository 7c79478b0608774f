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

// Commands behind the shep command-line tool. Each takes a validated
// RunConfig, writes its outputs (never overwriting) and prints a summary.

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "shep/attribution.hpp"
#include "shep/config.hpp"
#include "shep/evaluation.hpp"
#include "shep/io.hpp"
#include "shep/predictor.hpp"
#include "shep/simgen.hpp"
#include "shep/transforms.hpp"

namespace shep {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

// Validation failures are problems with the request or its inputs; anything
// else raised while computing is a runtime failure.
inline int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ParameterError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const IngestionError*>(&e) || dynamic_cast<const ComplexityGuardError*>(&e) ||
      dynamic_cast<const OutputCollisionError*>(&e) || dynamic_cast<const LoadError*>(&e) ||
      dynamic_cast<const DataError*>(&e)) {
    return kExitValidation;
  }
  return kExitRuntime;
}

struct CommandContext {
  RunConfig config;
  std::string config_text;  // raw config file, echoed into manifests
  std::ostream* log = nullptr;

  std::ostream& out() const { return *log; }
};

namespace internal {

inline std::string FormatSeconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", s);
  return buf;
}

inline nlohmann::json Manifest(const CommandContext& ctx, const std::string& command,
                               const std::vector<std::string>& outputs) {
  return {{"kind", "manifest"},
          {"command", command},
          {"config", ToJson(ctx.config)},
          {"config_text", ctx.config_text},
          {"outputs", outputs}};
}

inline std::string CsvField(double v) { return std::isnan(v) ? std::string("nan") : FormatDouble(v); }

}  // namespace internal

// Dataset named by the config: synthesized, loaded from a dataset directory,
// or ingested from signal files.
inline Dataset ResolveDataset(const RunConfig& c) {
  if (c.dataset_source == "synthetic") {
    return BuildDataset(DefaultClassSpecs(c.snr_db), c.per_class, c.length, c.fs, c.train_frac, c.seed);
  }
  if (c.dataset_source == "dataset") return LoadDataset(c.dataset_path);
  IngestOptions opt;
  opt.fs = c.fs;
  if (!c.label.empty()) opt.label = c.label;
  if (!c.manifest.empty()) opt.manifest = c.manifest;
  opt.train_frac = c.train_frac;
  opt.seed = c.seed;
  std::vector<fs::path> paths(c.files.begin(), c.files.end());
  return Ingest(paths, opt);
}

inline std::shared_ptr<const Predictor> ResolvePredictor(const RunConfig& c, const Dataset& ds) {
  std::shared_ptr<const Predictor> p;
  if (c.predictor_source == "mlp") {
    p = std::make_shared<MlpPredictor>(LoadMlp(c.predictor_path));
  } else {
    p = std::make_shared<ReferencePredictor>(FitReference(ds, DefaultBands(), c.gamma));
  }
  if (!ds.signals.empty() && p->input_length() != ds.signals.front().size()) {
    throw LoadError("predictor expects length " + std::to_string(p->input_length()) + ", dataset has " +
                    std::to_string(ds.signals.front().size()));
  }
  if (p->num_classes() != ds.num_classes()) {
    throw LoadError("predictor has " + std::to_string(p->num_classes()) + " classes, dataset has " +
                    std::to_string(ds.num_classes()));
  }
  return p;
}

// `per_class` train samples of every class, drawn without replacement by a
// generator seeded with `seed`. Returned in class order.
inline std::vector<std::size_t> SelectBackgrounds(const Dataset& ds, std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < ds.num_classes(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
      if (ds.is_train[i] && ds.labels[i] == static_cast<int>(c)) members.push_back(i);
    }
    if (members.size() < per_class) {
      throw ParameterError("class " + ds.class_names[c] + " has " + std::to_string(members.size()) +
                           " training samples, background needs " + std::to_string(per_class));
    }
    Shuffle(members, rng);
    out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(per_class));
  }
  return out;
}

// Dataset indices named by attribution.samples, ascending.
inline std::vector<std::size_t> SelectSamples(const Dataset& ds, const std::string& spec) {
  std::vector<std::size_t> out;
  if (spec == "test") {
    out = ds.Indices(false);
  } else if (spec.rfind("per_class:", 0) == 0) {
    const auto n = internal::ToUnsigned("attribution.samples", spec.substr(10));
    std::vector<std::size_t> taken(ds.num_classes(), 0);
    for (auto i : ds.Indices(false)) {
      auto& t = taken[static_cast<std::size_t>(ds.labels[i])];
      if (t < n) {
        out.push_back(i);
        ++t;
      }
    }
  } else {
    for (const auto& s : internal::SplitList(spec)) {
      const auto i = internal::ToUnsigned("attribution.samples", s);
      if (i >= ds.signals.size()) {
        throw ParameterError("sample index " + std::to_string(i) + " is out of range (dataset has " +
                             std::to_string(ds.signals.size()) + ")");
      }
      out.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw ParameterError("no samples selected for attribution");
  return out;
}

inline EngineSettings SettingsFrom(const RunConfig& c) {
  EngineSettings s;
  s.k_p = c.kp;
  s.scale_factors = c.scale_factors;
  s.max_exact_d = c.max_d;
  s.seed = c.seed;
  s.workers = c.workers;
  return s;
}

// ---------------------------------------------------------------------------

inline int CmdSimulate(const CommandContext& ctx) {
  const auto& c = ctx.config;
  ValidateConfig(c);
  const fs::path out(c.out);
  CheckWritable(out / "manifest.json");
  const auto ds = BuildDataset(DefaultClassSpecs(c.snr_db), c.per_class, c.length, c.fs, c.train_frac, c.seed);
  SaveDataset(ds, out, ToJson(c));
  WriteNewFile(out / "manifest.json",
               internal::Manifest(ctx, "simulate", {"train.csv", "test.csv", "dataset.json"}).dump(2) + "\n");
  ctx.out() << "simulated " << ds.signals.size() << " samples (length " << c.length << ", fs " << c.fs
            << " Hz) into " << out.string() << "\n";
  for (std::size_t k = 0; k < ds.num_classes(); ++k) {
    std::size_t train = 0, test = 0;
    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
      if (ds.labels[i] != static_cast<int>(k)) continue;
      (ds.is_train[i] ? train : test)++;
    }
    ctx.out() << "  class " << ds.class_names[k] << ": " << train << " train, " << test << " test\n";
  }
  return kExitOk;
}

inline int CmdIngest(const CommandContext& ctx) {
  auto c = ctx.config;
  c.dataset_source = "files";
  ValidateConfig(c);
  const fs::path out(c.out);
  CheckWritable(out / "manifest.json");
  const auto ds = ResolveDataset(c);
  SaveDataset(ds, out, ToJson(c));
  WriteNewFile(out / "manifest.json",
               internal::Manifest(ctx, "ingest", {"train.csv", "test.csv", "dataset.json"}).dump(2) + "\n");
  ctx.out() << "ingested " << ds.signals.size() << " samples from " << c.files.size() << " file(s), "
            << ds.num_classes() << " class(es), length " << ds.signals.front().size() << "\n";
  return kExitOk;
}

inline std::string AttributionFileName(std::size_t sample, Method m) {
  return "attr_" + std::to_string(sample) + "_" + std::string(MethodName(m)) + ".json";
}

inline int CmdAttribute(const CommandContext& ctx) {
  const auto& c = ctx.config;
  ValidateConfig(c);
  if (!c.patch) throw ConfigError("attribution.patch is required");
  const auto ds = ResolveDataset(c);
  const auto predictor = ResolvePredictor(c, ds);
  const auto samples = SelectSamples(ds, c.samples);
  const auto bg_idx = SelectBackgrounds(ds, c.background_per_class, c.seed);
  const auto topt = c.transform_options();

  // Output order is canonical: ascending sample index, then method name.
  auto methods = c.methods;
  std::sort(methods.begin(), methods.end(),
            [](Method a, Method b) { return MethodName(a) < MethodName(b); });
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  // Preflight: geometry and the exact-SHAP guard before anything is written.
  const auto probe = Forward(c.domain, ds.signals[samples.front()], topt);
  const auto geometry = MakeGeometry(probe.z.rows, probe.z.cols, *c.patch);
  const std::size_t d = geometry->count();
  const std::size_t n = bg_idx.size();
  if (std::find(methods.begin(), methods.end(), Method::kShapExact) != methods.end() && d > c.max_d) {
    throw ComplexityGuardError("shap_exact refused: d = " + std::to_string(d) + " exceeds max_d = " +
                               std::to_string(c.max_d) + "; it would need 2^" + std::to_string(d) + " * " +
                               std::to_string(n) + " = " +
                               (d < 64 ? std::to_string((std::uint64_t{1} << d) * n) : std::string("overflow")) +
                               " model calls");
  }
  const fs::path out(c.out);
  std::vector<std::string> outputs;
  for (auto s : samples) {
    for (Method m : methods) outputs.push_back(AttributionFileName(s, m));
    if (c.save_reps) {
      outputs.push_back("rep_" + std::to_string(s) + ".json");
      outputs.push_back("rep_" + std::to_string(s) + ".bin");
    }
  }
  outputs.push_back("predictor.json");
  for (const auto& f : outputs) CheckWritable(out / f);
  CheckWritable(out / "manifest.json");

  std::vector<DomainRep> bg_reps;
  std::vector<int> bg_labels;
  for (auto i : bg_idx) {
    bg_reps.push_back(Forward(c.domain, ds.signals[i], topt));
    bg_labels.push_back(ds.labels[i]);
  }
  const auto settings = SettingsFrom(c);
  ctx.out() << "domain " << DomainName(c.domain) << ", patch " << c.patch->ToString() << ", d = " << d
            << ", n = " << n << ", " << samples.size() << " sample(s)\n";
  for (auto s : samples) {
    auto rep = Forward(c.domain, ds.signals[s], topt);
    if (c.save_reps) SaveDomainRep(rep, out / ("rep_" + std::to_string(s)));
    IntegratedModel model(predictor, std::move(rep), *c.patch);
    const PatchRep x = model.SamplePatches();
    BackgroundSet bg;
    for (const auto& r : bg_reps) bg.samples.push_back(model.PatchesOf(r));
    bg.labels = bg_labels;
    for (Method m : methods) {
      auto a = RunMethod(m, model, x, bg, settings);
      a.domain = c.domain;
      a.sample_index = s;
      a.sample_label = ds.labels[s];
      WriteNewFile(out / AttributionFileName(s, m), ToJson(a).dump(2) + "\n");
      ctx.out() << "  sample " << s << " (" << ds.class_names[static_cast<std::size_t>(ds.labels[s])] << ") "
                << MethodName(m) << ": calls " << a.model_calls << ", " << internal::FormatSeconds(a.wall_time_s)
                << " s\n";
    }
  }
  nlohmann::json pj = nullptr;
  if (const auto* ref = dynamic_cast<const ReferencePredictor*>(predictor.get())) pj = ToJson(*ref);
  else pj = {{"kind", "mlp_predictor"}, {"path", c.predictor_path}};
  WriteNewFile(out / "predictor.json", pj.dump(2) + "\n");
  auto manifest = internal::Manifest(ctx, "attribute", outputs);
  manifest["backgrounds"] = bg_idx;
  manifest["samples"] = samples;
  WriteNewFile(out / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

// Attribution JSON files (attr_*.json) in a directory, in name order.
inline std::vector<Attribution> LoadAttributions(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("attribution directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("attr_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Attribution> out;
  for (const auto& f : files) {
    try {
      out.push_back(AttributionFromJson(ReadJson(f)));
    } catch (const Error& e) {
      throw DataError(f.string() + ": " + e.what());
    }
  }
  if (out.empty()) throw DataError("no attribution files in " + dir.string());
  return out;
}

inline int CmdCompare(const CommandContext& ctx) {
  const auto& c = ctx.config;
  ValidateConfig(c);
  if (c.reference.empty() || c.candidate.empty()) throw ConfigError("compare.reference and compare.candidate are required");
  const Method ref_method = internal::Field("compare.reference_method", [&] { return ParseMethod(c.reference_method); });
  const auto refs_all = LoadAttributions(c.reference);
  const auto cands = LoadAttributions(c.candidate);

  using GeoKey = std::tuple<std::string, std::string>;  // domain, patch
  std::map<std::tuple<std::string, std::string, std::size_t>, const Attribution*> refs;
  for (const auto& a : refs_all) {
    if (a.method != ref_method) continue;
    if (!a.sample_index) throw DataError("reference attribution lacks a sample index");
    refs[{a.domain ? std::string(DomainName(*a.domain)) : "", a.patch.ToString(), *a.sample_index}] = &a;
  }
  if (refs.empty()) throw DataError("no " + c.reference_method + " attributions in " + c.reference);

  // Group candidates by (method, domain, patch).
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const Attribution*>> groups;
  std::map<GeoKey, std::size_t> geometry_d;
  for (const auto& a : cands) {
    const std::string dom = a.domain ? std::string(DomainName(*a.domain)) : "";
    groups[{std::string(MethodName(a.method)), dom, a.patch.ToString()}].push_back(&a);
    geometry_d[{dom, a.patch.ToString()}] = a.d;
  }
  // Patch levels per domain: 1 = finest (largest d).
  std::map<GeoKey, std::size_t> level;
  std::map<std::string, std::vector<std::pair<std::size_t, std::string>>> by_domain;
  for (const auto& [key, d] : geometry_d) by_domain[std::get<0>(key)].push_back({d, std::get<1>(key)});
  for (auto& [dom, list] : by_domain) {
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < list.size(); ++i) level[{dom, list[i].second}] = i + 1;
  }

  const fs::path out(c.out);
  std::vector<std::string> outputs;
  for (const auto& [key, members] : groups) {
    outputs.push_back("similarity_" + std::get<0>(key) + "_" + std::get<1>(key) + "_" + std::get<2>(key) + ".csv");
  }
  outputs.push_back("stats.csv");
  for (const auto& f : outputs) CheckWritable(out / f);
  CheckWritable(out / "manifest.json");

  std::vector<SweepRun> runs;
  std::vector<std::pair<std::string, SimilarityReport>> reports;
  std::size_t idx = 0;
  for (const auto& [key, members] : groups) {
    const auto& [method, dom, patch] = key;
    std::vector<Attribution> r, k;
    std::size_t classes = 0;
    for (const auto* a : members) {
      const auto it = refs.find({dom, patch, a->sample_index.value_or(SIZE_MAX)});
      if (it == refs.end()) {
        throw DataError("no " + c.reference_method + " reference for sample " +
                        (a->sample_index ? std::to_string(*a->sample_index) : std::string("?")) + " (" + method +
                        ", " + dom + ", patch " + patch + ")");
      }
      r.push_back(*it->second);
      k.push_back(*a);
      classes = std::max(classes, a->num_classes);
    }
    auto rep = SimilarityMatrix(r, k, classes);
    std::string csv = "sample_class";
    for (std::size_t b = 0; b < rep.num_pred_classes; ++b) csv += ",pred_" + std::to_string(b);
    csv += "\n";
    for (std::size_t a = 0; a < rep.num_sample_classes; ++a) {
      csv += std::to_string(a);
      for (std::size_t b = 0; b < rep.num_pred_classes; ++b) csv += "," + internal::CsvField(rep.matrix[a][b]);
      csv += "\n";
    }
    WriteNewFile(out / outputs[idx++], csv);
    for (double s : rep.similarities) runs.push_back({method, dom, level[{dom, patch}], s});
    reports.push_back({method + " " + dom + " " + patch, std::move(rep)});
  }
  const auto stats = PatchSweepStats(runs);
  std::string csv = "method,domain,level,count,mean,variance,missing\n";
  for (const auto& cell : stats.cells) {
    csv += cell.method + "," + cell.domain + "," + std::to_string(cell.level) + "," + std::to_string(cell.count) +
           "," + internal::CsvField(cell.mean) + "," + internal::CsvField(cell.variance) + "," +
           (cell.missing ? "1" : "0") + "\n";
  }
  WriteNewFile(out / "stats.csv", csv);
  WriteNewFile(out / "manifest.json", internal::Manifest(ctx, "compare", outputs).dump(2) + "\n");
  for (const auto& [name, rep] : reports) {
    ctx.out() << name << ": mean " << internal::CsvField(rep.mean) << ", " << rep.similarities.size()
              << " pairs, " << rep.excluded << " excluded\n";
  }
  return kExitOk;
}

inline int CmdBench(const CommandContext& ctx) {
  const auto& c = ctx.config;
  ValidateConfig(c);
  for (Domain d : c.bench_domains) {
    if (!c.bench_levels.count(d) || c.bench_levels.at(d).empty()) {
      throw ConfigError("bench." + std::string(DomainName(d)) + "_patches is required");
    }
  }
  const fs::path out(c.out);
  for (const char* f : {"bench.csv", "calls.csv", "manifest.json"}) CheckWritable(out / f);
  const auto ds = ResolveDataset(c);
  if (c.bench_sample >= ds.signals.size()) throw ParameterError("bench.sample is out of range");
  BenchInput in;
  in.predictor = ResolvePredictor(c, ds);
  in.sample = ds.signals[c.bench_sample];
  for (auto i : SelectBackgrounds(ds, c.background_per_class, c.seed)) {
    in.backgrounds.push_back(ds.signals[i]);
    in.background_labels.push_back(ds.labels[i]);
  }
  in.transform = c.transform_options();
  // Refuse exact SHAP cells above the guard before timing anything.
  for (Domain dom : c.bench_domains) {
    const auto rep = Forward(dom, in.sample, in.transform);
    for (const auto& spec : c.bench_levels.at(dom)) {
      const auto g = MakeGeometry(rep.z.rows, rep.z.cols, spec);
      if (std::find(c.methods.begin(), c.methods.end(), Method::kShapExact) != c.methods.end() &&
          g->count() > c.max_d) {
        throw ComplexityGuardError("shap_exact refused for " + std::string(DomainName(dom)) + " patch " +
                                   spec.ToString() + ": d = " + std::to_string(g->count()) + " exceeds max_d");
      }
    }
  }
  const auto cells = Bench(in, c.methods, c.bench_domains, c.bench_levels, c.reps, SettingsFrom(c));
  std::string times = "domain,level,patch,method,d,n,reps,median_s\n";
  std::string calls = "domain,level,patch,method,d,n,predicted_calls,measured_calls,match,stable\n";
  for (const auto& cell : cells) {
    const std::string head = std::string(DomainName(cell.domain)) + "," + std::to_string(cell.level) + "," +
                             cell.patch.ToString() + "," + std::string(MethodName(cell.method)) + "," +
                             std::to_string(cell.d) + "," + std::to_string(cell.n);
    times += head + "," + std::to_string(cell.times_s.size()) + "," + FormatDouble(cell.median_s) + "\n";
    calls += head + "," + std::to_string(cell.predicted_calls) + "," + std::to_string(cell.measured_calls) + "," +
             (cell.predicted_calls == cell.measured_calls ? "1" : "0") + "," + (cell.calls_stable ? "1" : "0") + "\n";
    ctx.out() << head << ": calls " << cell.measured_calls << " (predicted " << cell.predicted_calls << "), median "
              << internal::FormatSeconds(cell.median_s) << " s\n";
  }
  WriteNewFile(out / "bench.csv", times);
  WriteNewFile(out / "calls.csv", calls);
  WriteNewFile(out / "manifest.json", internal::Manifest(ctx, "bench", {"bench.csv", "calls.csv"}).dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline void InspectAttribution(const Attribution& a, std::ostream& os, std::size_t top_k = 5) {
  os << "attribution\n"
     << "  method: " << MethodName(a.method) << "\n"
     << "  domain: " << (a.domain ? std::string(DomainName(*a.domain)) : std::string("-")) << "\n"
     << "  patch: " << a.patch.ToString() << " on a " << a.rows << "x" << a.cols << " grid\n"
     << "  d: " << a.d << "\n"
     << "  K: " << a.num_classes << "\n"
     << "  n: " << a.n << "\n"
     << "  model_calls: " << a.model_calls << "\n"
     << "  wall_time_s: " << FormatDouble(a.wall_time_s) << "\n";
  if (a.sample_index) os << "  sample: " << *a.sample_index << " (label " << a.sample_label.value_or(-1) << ")\n";
  for (std::size_t k = 0; k < a.num_classes; ++k) {
    std::vector<std::size_t> order(a.d);
    for (std::size_t i = 0; i < a.d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a.at(x, k) > a.at(y, k); });
    os << "  class " << k << " top patches:";
    for (std::size_t i = 0; i < std::min(top_k, a.d); ++i) {
      os << " " << order[i] << " (" << internal::CsvField(a.at(order[i], k)) << ")";
    }
    os << "\n";
  }
}

inline int CmdInspect(const fs::path& path, std::ostream& os) {
  if (fs::is_directory(path)) {
    if (fs::exists(path / "dataset.json")) return CmdInspect(path / "dataset.json", os);
    if (fs::exists(path / "manifest.json")) return CmdInspect(path / "manifest.json", os);
    throw DataError(path.string() + " holds no dataset.json or manifest.json");
  }
  if (!fs::exists(path)) throw DataError(path.string() + " does not exist");
  const auto j = ReadJson(path);
  const std::string kind = j.is_object() ? j.value("kind", "") : "";
  if (kind == "attribution") {
    InspectAttribution(AttributionFromJson(j), os);
  } else if (kind == "dataset") {
    const auto ds = LoadDataset(path);
    os << "dataset\n  samples: " << ds.signals.size() << "\n  length: "
       << (ds.signals.empty() ? 0 : ds.signals.front().size()) << "\n  fs: " << FormatDouble(ds.fs)
       << "\n  seed: " << ds.seed << "\n";
    for (std::size_t k = 0; k < ds.num_classes(); ++k) {
      std::size_t train = 0, test = 0;
      for (std::size_t i = 0; i < ds.signals.size(); ++i) {
        if (ds.labels[i] == static_cast<int>(k)) (ds.is_train[i] ? train : test)++;
      }
      os << "  class " << k << " " << ds.class_names[k] << ": " << train << " train, " << test << " test\n";
    }
  } else if (kind == "domain_rep") {
    const auto rep = LoadDomainRep(path);
    os << "domain_rep\n  domain: " << DomainName(rep.domain) << "\n  z: " << rep.z.rows << "x" << rep.z.cols
       << "\n  length: " << rep.meta.length << "\n  fs: " << FormatDouble(rep.meta.fs) << "\n  remains:";
    for (const auto& r : rep.remains) os << " " << r.name << "[" << r.rows << "x" << r.cols << "]";
    os << "\n";
  } else if (kind == "manifest") {
    os << "manifest\n  command: " << j.value("command", "") << "\n  outputs: " << j.at("outputs").size() << "\n";
    for (const auto& o : j.at("outputs")) os << "    " << o.get<std::string>() << "\n";
  } else if (kind == "reference_predictor") {
    const auto p = ReferenceFromJson(j);
    os << "reference_predictor\n  classes: " << p.num_classes() << "\n  input_length: " << p.input_length()
       << "\n  fs: " << FormatDouble(p.sample_rate()) << "\n  bands: " << p.bands().size() << "\n";
  } else {
    throw DataError(path.string() + ": unrecognized artifact kind '" + kind + "'");
  }
  return kExitOk;
}

}  // namespace shep
