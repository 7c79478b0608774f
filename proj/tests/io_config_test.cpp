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

#include <cmath>
#include <filesystem>
#include <limits>

#include "gtest/gtest.h"
#include "shep/config.hpp"
#include "shep/io.hpp"

namespace shep {
namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("shep_io_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void Put(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

template <typename E>
std::string MessageOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  return "<no exception>";
}

TEST(FormatTest, ShortestRoundTrip) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(*ParseDouble(FormatDouble(v)), v);
  }
  EXPECT_EQ(FormatDouble(0.5), "0.5");
  EXPECT_FALSE(ParseDouble("abc").has_value());
  EXPECT_FALSE(ParseDouble("1.5x").has_value());
  EXPECT_FALSE(ParseDouble("  ").has_value());
  EXPECT_DOUBLE_EQ(*ParseDouble(" +2.5 "), 2.5);
}

TEST(CsvTest, ErrorsNameFileRowAndColumn) {
  const auto bad = MessageOf<IngestionError>([] { ParseNumericCsv("1,2,3\n4,x,6\n", "sig.csv"); });
  EXPECT_NE(bad.find("sig.csv"), std::string::npos) << bad;
  EXPECT_NE(bad.find("row 2"), std::string::npos) << bad;
  EXPECT_NE(bad.find("column 2"), std::string::npos) << bad;
  const auto ragged = MessageOf<IngestionError>([] { ParseNumericCsv("1,2,3\n4,5\n", "r.csv"); });
  EXPECT_NE(ragged.find("row 2 has 2 cells, expected 3"), std::string::npos) << ragged;
  EXPECT_THROW(ParseNumericCsv("1,nan\n", "n.csv"), IngestionError);
  const auto rows = ParseNumericCsv("1,2\r\n\n3,4\n", "ok.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (std::vector<double>{3, 4}));
}

TEST(DatasetFilesTest, SaveLoadIsExact) {
  TempDir tmp;
  const auto ds = BuildDataset(DefaultClassSpecs(), 4, 300, 10000.0, 0.5, 21);
  SaveDataset(ds, tmp.path(), nlohmann::json{{"note", "x"}});
  const auto back = LoadDataset(tmp.path() / "dataset.json");
  ASSERT_EQ(back.signals.size(), ds.signals.size());
  for (std::size_t i = 0; i < ds.signals.size(); ++i) {
    EXPECT_EQ(back.signals[i].samples, ds.signals[i].samples);
    EXPECT_EQ(back.labels[i], ds.labels[i]);
    EXPECT_EQ(back.is_train[i], ds.is_train[i]);
  }
  EXPECT_EQ(back.class_names, ds.class_names);
  EXPECT_DOUBLE_EQ(back.fs, 10000.0);
  EXPECT_EQ(ReadJson(tmp.path() / "dataset.json").at("config").at("note"), "x");
  EXPECT_THROW(SaveDataset(ds, tmp.path()), OutputCollisionError);
}

TEST(IngestTest, SingleRowAtCustomRate) {
  TempDir tmp;
  std::string row;
  for (int i = 0; i < 2000; ++i) row += (i ? "," : "") + FormatDouble(std::sin(0.01 * i) + 0.001 * i);
  Put(tmp.path() / "cls" / "one.csv", row + "\n");
  IngestOptions opt;
  opt.fs = 12000.0;
  const auto ds = Ingest({tmp.path() / "cls" / "one.csv"}, opt);
  ASSERT_EQ(ds.signals.size(), 1u);
  EXPECT_EQ(ds.signals[0].size(), 2000u);
  EXPECT_DOUBLE_EQ(ds.fs, 12000.0);
  EXPECT_EQ(ds.class_names, std::vector<std::string>{"cls"});
  EXPECT_TRUE(ds.is_train[0]);
}

TEST(IngestTest, ExportThenIngestReproducesSamples) {
  TempDir tmp;
  const auto ds = BuildDataset(DefaultClassSpecs(), 4, 400, 10000.0, 0.5, 5);
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    std::vector<const std::vector<double>*> rows;
    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
      if (ds.labels[i] == static_cast<int>(c)) rows.push_back(&ds.signals[i].samples);
    }
    Put(tmp.path() / ds.class_names[c] / "samples.csv", RowsToCsv(rows));
  }
  IngestOptions opt;
  opt.fs = 10000.0;
  opt.train_frac = 0.5;
  std::vector<fs::path> paths;
  for (const auto& name : ds.class_names) paths.push_back(tmp.path() / name / "samples.csv");
  const auto back = Ingest(paths, opt);
  ASSERT_EQ(back.signals.size(), ds.signals.size());
  EXPECT_EQ(back.class_names, ds.class_names);
  std::size_t k = 0;
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
      if (ds.labels[i] != static_cast<int>(c)) continue;
      EXPECT_EQ(back.labels[k], static_cast<int>(c));
      for (std::size_t t = 0; t < 400; ++t) {
        ASSERT_NEAR(back.signals[k].samples[t], ds.signals[i].samples[t], 1e-12);
      }
      ++k;
    }
  }
}

TEST(IngestTest, ColumnFilesJsonAndManifestLabels) {
  TempDir tmp;
  Put(tmp.path() / "a.csv", "1\n2\n4\n8\n");
  Put(tmp.path() / "b.json", "[[1,2,3,5],[2,2,3,1]]");
  Put(tmp.path() / "m.json",
      R"({"class_names":["good","bad"],"files":[{"path":"a.csv","label":0},{"path":"b.json","labels":["bad",0]}]})");
  IngestOptions opt;
  opt.fs = 100.0;
  opt.manifest = tmp.path() / "m.json";
  opt.train_frac = 0.5;
  const auto ds = Ingest({tmp.path() / "a.csv", tmp.path() / "b.json"}, opt);
  ASSERT_EQ(ds.signals.size(), 3u);
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"good", "bad"}));
  EXPECT_EQ(ds.labels, (std::vector<int>{0, 1, 0}));
}

TEST(IngestTest, Errors) {
  TempDir tmp;
  Put(tmp.path() / "x.csv", "1,2,3\n1,oops,3\n");
  Put(tmp.path() / "short.csv", "1,2\n");
  Put(tmp.path() / "long.csv", "1,2,3\n");
  Put(tmp.path() / "flat.csv", "1,1,1\n");
  IngestOptions opt;
  EXPECT_THROW(Ingest({tmp.path() / "long.csv"}, opt), IngestionError);  // fs missing
  opt.fs = 10.0;
  const auto msg = MessageOf<IngestionError>([&] { Ingest({tmp.path() / "x.csv"}, opt); });
  EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("x.csv"), std::string::npos) << msg;
  EXPECT_THROW(Ingest({tmp.path() / "long.csv", tmp.path() / "short.csv"}, opt), IngestionError);
  EXPECT_THROW(Ingest({tmp.path() / "flat.csv"}, opt), IngestionError);
  EXPECT_THROW(Ingest({tmp.path() / "missing.csv"}, opt), IngestionError);
}

TEST(DomainRepFilesTest, RoundTripAllDomains) {
  TempDir tmp;
  const auto ds = BuildDataset(DefaultClassSpecs(), 2, 2000, 10000.0, 0.5, 8);
  TransformOptions opt;
  opt.stft = StftConfig{};
  for (Domain d : {Domain::kFreq, Domain::kEnv, Domain::kTF, Domain::kCS}) {
    const auto rep = Forward(d, ds.signals[0], opt);
    const auto stem = tmp.path() / std::string(DomainName(d));
    SaveDomainRep(rep, stem);
    const auto back = LoadDomainRep(fs::path(stem.string() + ".json"));
    EXPECT_EQ(back.z, rep.z);
    ASSERT_EQ(back.remains.size(), rep.remains.size());
    for (std::size_t r = 0; r < rep.remains.size(); ++r) {
      EXPECT_EQ(back.remains[r].name, rep.remains[r].name);
      EXPECT_EQ(back.remains[r].values, rep.remains[r].values);
    }
    EXPECT_EQ(Inverse(back).samples, Inverse(rep).samples);
    EXPECT_THROW(SaveDomainRep(rep, stem), OutputCollisionError);
  }
  // Truncated data file.
  const auto bin = tmp.path() / "freq.bin";
  auto bytes = ReadFile(bin);
  bytes.resize(bytes.size() - 8);
  fs::remove(bin);
  WriteNewFile(bin, bytes);
  EXPECT_THROW(LoadDomainRep(tmp.path() / "freq.json"), InconsistencyError);
}

TEST(ConfigTest, ParsesSectionsAndOverrides) {
  RunConfig c;
  ParseConfigText(c, R"(
[run]
seed = 42
workers = 3
[dataset]
per_class = 12
snr_db = inf
[transform]
domain = tf
window_len = 50
hop = 10
[attribution]
patch = 2x10
methods = shep, mask, scale
scale_factors = 0, 0.25
[bench]
domains = freq, env
freq_patches = 48, 96
)");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.workers, 3u);
  EXPECT_EQ(c.per_class, 12u);
  EXPECT_TRUE(std::isinf(c.snr_db));
  EXPECT_EQ(c.domain, Domain::kTF);
  EXPECT_EQ(*c.patch, (PatchSpec{2, 10}));
  EXPECT_EQ(c.methods, (std::vector<Method>{Method::kShep, Method::kMask, Method::kScale}));
  EXPECT_EQ(c.scale_factors, (std::vector<double>{0.0, 0.25}));
  EXPECT_EQ(c.bench_levels.at(Domain::kFreq), (std::vector<PatchSpec>{{1, 48}, {1, 96}}));
  EXPECT_NO_THROW(ValidateConfig(c));
  SetConfigValue(c, "run", "seed", "7");
  EXPECT_EQ(c.seed, 7u);
  const auto j = ToJson(c);
  EXPECT_EQ(j.at("run").at("seed"), 7);
  EXPECT_EQ(j.at("dataset").at("snr_db"), "inf");
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  RunConfig c;
  const auto msg = MessageOf<ConfigError>([&] { ParseConfigText(c, "[run]\nseeed = 1\n"); });
  EXPECT_NE(msg.find("run.seeed"), std::string::npos) << msg;
  EXPECT_THROW(ParseConfigText(c, "[nosuch]\nx = 1\n"), ConfigError);
  EXPECT_THROW(ParseConfigText(c, "seed = 1\n"), ConfigError);
  EXPECT_THROW(ParseConfigText(c, "[run]\nseed = -1\n"), ConfigError);
  EXPECT_THROW(ParseConfigText(c, "[run]\nworkers = two\n"), ConfigError);
  EXPECT_THROW(ParseConfigText(c, "[attribution]\nmethods = shep, lime\n"), ConfigError);
  EXPECT_THROW(ParseConfigText(c, "[attribution]\npatch = 0\n"), ConfigError);
  EXPECT_THROW(ParseConfigText(c, "[run\nseed=1\n"), ConfigError);
}

TEST(ConfigTest, ValidationCatchesCrossFieldProblems) {
  RunConfig c;
  EXPECT_NO_THROW(ValidateConfig(c));
  auto zero = c;
  zero.per_class = 0;
  EXPECT_THROW(ValidateConfig(zero), ConfigError);
  auto frac = c;
  frac.train_frac = 1.0;
  EXPECT_THROW(ValidateConfig(frac), ConfigError);
  auto mlp = c;
  mlp.predictor_source = "mlp";
  EXPECT_THROW(ValidateConfig(mlp), ConfigError);
  auto workers = c;
  workers.workers = 0;
  EXPECT_THROW(ValidateConfig(workers), ConfigError);
}

}  // namespace
}  // namespace shep
