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

// shep: command-line front end.
//
//   shep simulate  --config run.ini --out data/
//   shep ingest    --fs 12000 --out data/ a.csv b.csv
//   shep attribute --config run.ini --method shep,mask --patch 48
//   shep compare   --config run.ini
//   shep bench     --config run.ini
//   shep inspect   runs/attr_3_shep.json

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shep/shep.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> seed, workers, out, domain, patch, method, fs, background_per_class, kp,
      scale_factors;
};

shep::CommandContext BuildContext(const Overrides& o, const std::vector<std::string>& files) {
  shep::CommandContext ctx;
  ctx.log = &std::cout;
  if (o.config) {
    ctx.config_text = shep::ReadFile(*o.config);
    shep::ParseConfigText(ctx.config, ctx.config_text);
  }
  auto& c = ctx.config;
  const std::pair<const std::optional<std::string>*, std::pair<const char*, const char*>> flags[] = {
      {&o.seed, {"run", "seed"}},
      {&o.workers, {"run", "workers"}},
      {&o.out, {"run", "out"}},
      {&o.domain, {"transform", "domain"}},
      {&o.patch, {"attribution", "patch"}},
      {&o.method, {"attribution", "methods"}},
      {&o.fs, {"dataset", "fs"}},
      {&o.background_per_class, {"attribution", "background_per_class"}},
      {&o.kp, {"attribution", "kp"}},
      {&o.scale_factors, {"attribution", "scale_factors"}},
  };
  for (const auto& [value, key] : flags) {
    if (*value) shep::SetConfigValue(c, key.first, key.second, **value);
  }
  if (!files.empty()) c.files = files;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley attributions for 1-D signal classifiers in transform domains"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config, "INI run configuration");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--workers", o.workers, "Worker threads");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--domain", o.domain, "freq | env | tf | cs");
  app.add_option("--patch", o.patch, "Patch size, L or HxW");
  app.add_option("--method", o.method, "Comma-separated methods");
  app.add_option("--fs", o.fs, "Sample rate in Hz");
  app.add_option("--background-per-class", o.background_per_class, "Background samples per class");
  app.add_option("--kp", o.kp, "Antithetic permutation pairs for shap_perm");
  app.add_option("--scale-factors", o.scale_factors, "Comma-separated scale factors");

  std::vector<std::string> files;
  std::string inspect_path;
  auto* simulate = app.add_subcommand("simulate", "Synthesize the fault-signal dataset");
  auto* ingest = app.add_subcommand("ingest", "Import CSV/JSON signals as a dataset");
  ingest->add_option("files", files, "Signal files")->required();
  auto* attribute = app.add_subcommand("attribute", "Run attribution engines");
  auto* compare = app.add_subcommand("compare", "Cosine similarity against a reference method");
  auto* bench = app.add_subcommand("bench", "Time engines over patch levels");
  auto* inspect = app.add_subcommand("inspect", "Summarize an artifact");
  inspect->add_option("path", inspect_path, "Attribution, dataset, domain rep or manifest")->required();
  for (auto* sub : {simulate, ingest, attribute, compare, bench, inspect}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : shep::kExitValidation;
  }

  try {
    if (inspect->parsed()) return shep::CmdInspect(inspect_path, std::cout);
    const auto ctx = BuildContext(o, files);
    if (simulate->parsed()) return shep::CmdSimulate(ctx);
    if (ingest->parsed()) return shep::CmdIngest(ctx);
    if (attribute->parsed()) return shep::CmdAttribute(ctx);
    if (compare->parsed()) return shep::CmdCompare(ctx);
    if (bench->parsed()) return shep::CmdBench(ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return shep::ExitCodeFor(e);
  }
  return shep::kExitValidation;
}
