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

// File formats.
//
// Dataset directory:
//   train.csv, test.csv   one sample per row, shortest round-trip decimals
//   dataset.json          {"kind":"dataset","fs","length","class_names",
//                          "labels":{"train":[..],"test":[..]},
//                          "train_indices","test_indices","seed"}
// Domain representation:
//   <stem>.json           metadata and array layout
//   <stem>.bin            little-endian float64: z row-major, then each
//                         remain array in the listed order

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "shep/common.hpp"
#include "shep/predictor.hpp"
#include "shep/simgen.hpp"
#include "shep/transforms.hpp"

namespace shep {

namespace fs = std::filesystem;

// Output file already exists; outputs are write-once.
class OutputCollisionError : public Error {
 public:
  using Error::Error;
};

inline std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void CheckWritable(const fs::path& path) {
  if (fs::exists(path)) throw OutputCollisionError("refusing to overwrite existing output " + path.string());
}

inline void WriteNewFile(const fs::path& path, const std::string& content) {
  CheckWritable(path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing " + path.string());
}

inline nlohmann::json ReadJson(const fs::path& path) {
  try {
    return nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

// Shortest decimal text that parses back to the same double.
inline std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> ParseDouble(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string RowsToCsv(const std::vector<const std::vector<double>*>& rows) {
  std::string out;
  for (const auto* row : rows) {
    for (std::size_t i = 0; i < row->size(); ++i) {
      if (i) out.push_back(',');
      out += FormatDouble((*row)[i]);
    }
    out.push_back('\n');
  }
  return out;
}

// Parses a numeric CSV. Errors name the file and the 1-based row/column.
inline std::vector<std::vector<double>> ParseNumericCsv(const std::string& text, const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> values;
    std::size_t col = 0, start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      ++col;
      const auto v = ParseDouble(cell);
      if (!v || !std::isfinite(*v)) {
        throw IngestionError(name + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
                             ": non-numeric cell '" + cell + "'");
      }
      values.push_back(*v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw IngestionError(name + ": row " + std::to_string(row) + " has " + std::to_string(values.size()) +
                           " cells, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Dataset directory.

inline void SaveDataset(const Dataset& ds, const fs::path& dir, const nlohmann::json& config = nullptr) {
  const auto train = ds.Indices(true);
  const auto test = ds.Indices(false);
  for (const char* f : {"train.csv", "test.csv", "dataset.json"}) CheckWritable(dir / f);
  std::vector<const std::vector<double>*> train_rows, test_rows;
  std::vector<int> train_labels, test_labels;
  for (auto i : train) {
    train_rows.push_back(&ds.signals[i].samples);
    train_labels.push_back(ds.labels[i]);
  }
  for (auto i : test) {
    test_rows.push_back(&ds.signals[i].samples);
    test_labels.push_back(ds.labels[i]);
  }
  nlohmann::json side = {
      {"kind", "dataset"},
      {"fs", ds.fs},
      {"length", ds.signals.empty() ? 0 : ds.signals.front().size()},
      {"class_names", ds.class_names},
      {"labels", {{"train", train_labels}, {"test", test_labels}}},
      {"train_indices", train},
      {"test_indices", test},
      {"seed", ds.seed},
  };
  if (!config.is_null()) side["config"] = config;
  WriteNewFile(dir / "train.csv", RowsToCsv(train_rows));
  WriteNewFile(dir / "test.csv", RowsToCsv(test_rows));
  WriteNewFile(dir / "dataset.json", side.dump(2) + "\n");
}

// Accepts the dataset directory or its dataset.json.
inline Dataset LoadDataset(const fs::path& where) {
  const fs::path dir = fs::is_directory(where) ? where : where.parent_path();
  const auto side = ReadJson(dir / "dataset.json");
  try {
    if (side.value("kind", "") != "dataset") throw DataError("dataset.json is not a dataset sidecar");
    Dataset ds;
    ds.fs = side.at("fs").get<double>();
    ds.seed = side.at("seed").get<std::uint64_t>();
    ds.class_names = side.at("class_names").get<std::vector<std::string>>();
    const auto train_idx = side.at("train_indices").get<std::vector<std::size_t>>();
    const auto test_idx = side.at("test_indices").get<std::vector<std::size_t>>();
    const auto train_labels = side.at("labels").at("train").get<std::vector<int>>();
    const auto test_labels = side.at("labels").at("test").get<std::vector<int>>();
    const auto train_rows = ParseNumericCsv(ReadFile(dir / "train.csv"), (dir / "train.csv").string());
    const auto test_rows = ParseNumericCsv(ReadFile(dir / "test.csv"), (dir / "test.csv").string());
    if (train_rows.size() != train_idx.size() || test_rows.size() != test_idx.size() ||
        train_labels.size() != train_idx.size() || test_labels.size() != test_idx.size()) {
      throw DataError("dataset sidecar does not match the CSV row counts");
    }
    const std::size_t total = train_idx.size() + test_idx.size();
    ds.signals.resize(total);
    ds.labels.assign(total, -1);
    ds.is_train.assign(total, false);
    auto place = [&](const std::vector<std::size_t>& idx, const std::vector<std::vector<double>>& rows,
                     const std::vector<int>& labels, bool train) {
      for (std::size_t r = 0; r < idx.size(); ++r) {
        if (idx[r] >= total || ds.labels[idx[r]] != -1) throw DataError("dataset indices are not a permutation");
        if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= ds.class_names.size()) {
          throw DataError("dataset label out of range");
        }
        ds.signals[idx[r]] = Signal{rows[r], ds.fs};
        ds.labels[idx[r]] = labels[r];
        ds.is_train[idx[r]] = train;
      }
    };
    place(train_idx, train_rows, train_labels, true);
    place(test_idx, test_rows, test_labels, false);
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed dataset sidecar: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// External signal ingestion.

struct IngestOptions {
  double fs = 0.0;
  std::optional<std::string> label;     // forces one label for every sample
  std::optional<fs::path> manifest;     // {"class_names":[..], "files":[{"path","label"|"labels"}]}
  double train_frac = 0.7;
  std::uint64_t seed = 0;
};

namespace internal {

struct ManifestEntry {
  std::optional<std::string> label;
  std::vector<std::string> labels;
};

inline std::string LabelText(const nlohmann::json& v, const std::vector<std::string>& names) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) {
    const auto i = v.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= names.size()) throw IngestionError("manifest label index out of range");
    return names[static_cast<std::size_t>(i)];
  }
  throw IngestionError("manifest labels must be strings or class indices");
}

// Samples in one file: a CSV with one sample per row, a single-column CSV
// holding one sample, or a JSON array (of numbers or of arrays).
inline std::vector<std::vector<double>> ReadSignalFile(const fs::path& path) {
  const std::string name = path.string();
  if (!fs::exists(path)) throw IngestionError(name + ": file not found");
  const std::string text = ReadFile(path);
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw IngestionError(name + ": malformed JSON: " + e.what());
    }
    if (!j.is_array() || j.empty()) throw IngestionError(name + ": expected a non-empty JSON array");
    std::vector<std::vector<double>> rows;
    auto row_of = [&](const nlohmann::json& arr, std::size_t row) {
      std::vector<double> out;
      for (std::size_t c = 0; c < arr.size(); ++c) {
        if (!arr[c].is_number() || !std::isfinite(arr[c].get<double>())) {
          throw IngestionError(name + ": row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                               ": non-numeric value");
        }
        out.push_back(arr[c].get<double>());
      }
      return out;
    };
    if (j.front().is_array()) {
      for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array()) throw IngestionError(name + ": row " + std::to_string(r + 1) + " is not an array");
        rows.push_back(row_of(j[r], r + 1));
        if (rows.back().size() != rows.front().size()) {
          throw IngestionError(name + ": row " + std::to_string(r + 1) + " has " +
                               std::to_string(rows.back().size()) + " values, expected " +
                               std::to_string(rows.front().size()));
        }
      }
    } else {
      rows.push_back(row_of(j, 1));
    }
    return rows;
  }
  auto rows = ParseNumericCsv(text, name);
  if (rows.empty()) throw IngestionError(name + ": no samples");
  if (rows.size() > 1 && rows.front().size() == 1) {
    std::vector<double> column;
    for (const auto& r : rows) column.push_back(r[0]);
    return {column};
  }
  return rows;
}

}  // namespace internal

inline Dataset Ingest(const std::vector<fs::path>& paths, const IngestOptions& opt) {
  if (!(opt.fs > 0.0)) throw IngestionError("missing or invalid sample rate (--fs)");
  if (paths.empty()) throw IngestionError("no input files");
  if (!(opt.train_frac > 0.0 && opt.train_frac < 1.0)) throw ParameterError("train_frac must lie in (0, 1)");

  std::vector<std::string> class_names;
  std::map<std::string, internal::ManifestEntry> manifest;
  if (opt.manifest) {
    const auto m = ReadJson(*opt.manifest);
    try {
      if (m.contains("class_names")) class_names = m.at("class_names").get<std::vector<std::string>>();
      for (const auto& f : m.at("files")) {
        internal::ManifestEntry e;
        if (f.contains("label")) e.label = internal::LabelText(f.at("label"), class_names);
        if (f.contains("labels")) {
          for (const auto& l : f.at("labels")) e.labels.push_back(internal::LabelText(l, class_names));
        }
        manifest[f.at("path").get<std::string>()] = std::move(e);
      }
    } catch (const nlohmann::json::exception& e) {
      throw IngestionError("malformed manifest: " + std::string(e.what()));
    }
  }
  auto class_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < class_names.size(); ++i) {
      if (class_names[i] == name) return static_cast<int>(i);
    }
    class_names.push_back(name);
    return static_cast<int>(class_names.size() - 1);
  };

  Dataset ds;
  ds.fs = opt.fs;
  ds.seed = opt.seed;
  for (const auto& path : paths) {
    const auto rows = internal::ReadSignalFile(path);
    const internal::ManifestEntry* entry = nullptr;
    if (auto it = manifest.find(path.string()); it != manifest.end()) {
      entry = &it->second;
    } else if (auto it2 = manifest.find(path.filename().string()); it2 != manifest.end()) {
      entry = &it2->second;
    }
    if (entry && !entry->labels.empty() && entry->labels.size() != rows.size()) {
      throw IngestionError(path.string() + ": manifest lists " + std::to_string(entry->labels.size()) +
                           " labels for " + std::to_string(rows.size()) + " rows");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::string label;
      if (opt.label) {
        label = *opt.label;
      } else if (entry && !entry->labels.empty()) {
        label = entry->labels[r];
      } else if (entry && entry->label) {
        label = *entry->label;
      } else {
        label = path.parent_path().filename().string();
        if (label.empty()) label = "unlabeled";
      }
      if (!ds.signals.empty() && rows[r].size() != ds.signals.front().size()) {
        throw IngestionError(path.string() + ": row " + std::to_string(r + 1) + " has length " +
                             std::to_string(rows[r].size()) + ", expected " +
                             std::to_string(ds.signals.front().size()));
      }
      try {
        ds.signals.push_back(Standardize(Signal{rows[r], opt.fs}));
      } catch (const DegenerateInputError&) {
        throw IngestionError(path.string() + ": row " + std::to_string(r + 1) + " is constant");
      }
      ds.labels.push_back(class_index(label));
    }
  }
  ds.class_names = class_names;
  Rng rng(opt.seed);
  ds.is_train = StratifiedSplit(ds.labels, ds.class_names.size(), opt.train_frac, rng);
  return ds;
}

// ---------------------------------------------------------------------------
// Domain representation files.

inline nlohmann::json DomainRepMeta(const DomainRep& rep, const std::string& data_file) {
  nlohmann::json remains = nlohmann::json::array();
  for (const auto& r : rep.remains) remains.push_back({{"name", r.name}, {"rows", r.rows}, {"cols", r.cols}});
  nlohmann::json meta = {{"length", rep.meta.length}, {"fs", rep.meta.fs}};
  if (rep.domain == Domain::kEnv) {
    meta["env_max_hz"] = rep.meta.env_max_hz;
    meta["env_bins"] = rep.meta.env_bins;
  }
  if (rep.meta.stft) {
    meta["stft"] = {{"window_len", rep.meta.stft->window_len}, {"hop", rep.meta.stft->hop},
                    {"window", WindowName(rep.meta.stft->window)}, {"center", rep.meta.stft->center}};
  }
  return {{"kind", "domain_rep"},
          {"domain", DomainName(rep.domain)},
          {"z", {{"rows", rep.z.rows}, {"cols", rep.z.cols}}},
          {"remain_count", rep.remain_count()},
          {"remains", remains},
          {"meta", meta},
          {"data_file", data_file},
          {"layout", "float64 little-endian; z row-major, then remains in listed order"}};
}

inline void SaveDomainRep(const DomainRep& rep, const fs::path& stem) {
  const fs::path json_path = fs::path(stem.string() + ".json");
  const fs::path bin_path = fs::path(stem.string() + ".bin");
  CheckWritable(json_path);
  CheckWritable(bin_path);
  std::string bytes;
  for (double v : rep.z.values) internal::AppendF64(bytes, v);
  for (const auto& r : rep.remains) {
    for (double v : r.values) internal::AppendF64(bytes, v);
  }
  WriteNewFile(bin_path, bytes);
  WriteNewFile(json_path, DomainRepMeta(rep, bin_path.filename().string()).dump(2) + "\n");
}

inline DomainRep LoadDomainRep(const fs::path& json_path) {
  const auto j = ReadJson(json_path);
  try {
    if (j.value("kind", "") != "domain_rep") throw DataError(json_path.string() + " is not a domain representation");
    DomainRep rep;
    rep.domain = ParseDomain(j.at("domain").get<std::string>());
    const auto& meta = j.at("meta");
    rep.meta.length = meta.at("length").get<std::size_t>();
    rep.meta.fs = meta.at("fs").get<double>();
    rep.meta.env_max_hz = meta.value("env_max_hz", 600.0);
    rep.meta.env_bins = meta.value("env_bins", std::size_t{0});
    if (meta.contains("stft")) {
      const auto& s = meta.at("stft");
      rep.meta.stft = StftConfig{s.at("window_len").get<std::size_t>(), s.at("hop").get<std::size_t>(),
                                 ParseWindow(s.at("window").get<std::string>()), s.at("center").get<bool>()};
    }
    const std::string bytes = ReadFile(json_path.parent_path() / j.at("data_file").get<std::string>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    std::size_t avail = bytes.size() / 8;
    auto take = [&](std::size_t count) {
      if (count > avail) throw InconsistencyError("domain representation data file is truncated");
      std::vector<double> v(count);
      for (auto& x : v) {
        x = internal::ReadF64(p);
        p += 8;
      }
      avail -= count;
      return v;
    };
    const auto rows = j.at("z").at("rows").get<std::size_t>();
    const auto cols = j.at("z").at("cols").get<std::size_t>();
    rep.z = Grid(rows, cols, take(rows * cols));
    for (const auto& r : j.at("remains")) {
      NamedArray a{r.at("name").get<std::string>(), r.at("rows").get<std::size_t>(), r.at("cols").get<std::size_t>(), {}};
      a.values = take(a.rows * a.cols);
      rep.remains.push_back(std::move(a));
    }
    if (avail != 0 || bytes.size() % 8 != 0) throw InconsistencyError("domain representation data file has trailing data");
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed domain representation: ") + e.what());
  }
}

}  // namespace shep
