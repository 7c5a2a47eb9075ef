// src/data-io.cc

// Copyright 2026  zslkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#include "zslkit/data-io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zslkit/portable-rng.h"

namespace zsl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void StoreLe64(double v, char *out) {
  uint64_t bits = std::bit_cast<uint64_t>(v);
  for (int b = 0; b < 8; ++b) out[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
}

double LoadLe64(const char *in) {
  uint64_t bits = 0;
  for (int b = 0; b < 8; ++b)
    bits |= static_cast<uint64_t>(static_cast<unsigned char>(in[b])) << (8 * b);
  return std::bit_cast<double>(bits);
}

std::vector<ClassId> SortedIds(const json &arr, const std::string &what) {
  std::vector<ClassId> ids = arr.get<std::vector<ClassId>>();
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw DataError("duplicate class id in " + what);
  return ids;
}

}  // namespace

std::string ReadFile(const fs::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void WriteFileAtomic(const fs::path &path, const std::string &contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write " + tmp.string());
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw DataError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename " + tmp.string() + ": " + ec.message());
}

Matrix LoadMatrix(const fs::path &path) {
  const std::string buf = ReadFile(path);
  size_t eol = buf.find('\n');
  if (eol == std::string::npos)
    throw DataError(path.string() + ": missing ZMAT header");
  std::istringstream header(buf.substr(0, eol));
  std::string magic;
  long long rows = -1, cols = -1;
  header >> magic >> rows >> cols;
  std::string extra;
  if (magic != "ZMAT" || header.fail() || (header >> extra))
    throw DataError(path.string() + ": malformed header '" +
                    buf.substr(0, eol) + "'");
  if (rows <= 0 || cols <= 0)
    throw DataError(path.string() + ": empty matrix " + std::to_string(rows) +
                    "x" + std::to_string(cols));
  const size_t expected = static_cast<size_t>(rows) * cols * 8;
  const size_t payload = buf.size() - eol - 1;
  if (payload != expected)
    throw DataError(path.string() + ": header says " + std::to_string(rows) +
                    "x" + std::to_string(cols) + " (" +
                    std::to_string(expected) + " bytes) but payload has " +
                    std::to_string(payload) + " bytes");
  Matrix m(rows, cols);
  const char *p = buf.data() + eol + 1;
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < cols; ++c, p += 8) {
      double v = LoadLe64(p);
      if (!std::isfinite(v))
        throw DataError(path.string() + ": non-finite value at row " +
                        std::to_string(r) + ", col " + std::to_string(c));
      m(r, c) = v;
    }
  }
  return m;
}

void SaveMatrix(const Matrix &m, const fs::path &path) {
  if (m.rows() == 0 || m.cols() == 0)
    throw DataError("refusing to save empty matrix to " + path.string());
  std::string out = "ZMAT " + std::to_string(m.rows()) + " " +
                    std::to_string(m.cols()) + "\n";
  const size_t header = out.size();
  out.resize(header + static_cast<size_t>(m.size()) * 8);
  char *p = out.data() + header;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c, p += 8) {
      if (!std::isfinite(m(r, c)))
        throw DataError("non-finite value at row " + std::to_string(r) +
                        ", col " + std::to_string(c) + " for " + path.string());
      StoreLe64(m(r, c), p);
    }
  }
  WriteFileAtomic(path, out);
}

std::vector<ClassId> LoadLabels(const fs::path &path) {
  std::istringstream is(ReadFile(path));
  std::vector<ClassId> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long v;
    std::string rest;
    if (!(ls >> v) || (ls >> rest))
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": not an integer label: '" + line + "'");
    labels.push_back(static_cast<ClassId>(v));
  }
  return labels;
}

void SaveLabels(const std::vector<ClassId> &labels, const fs::path &path) {
  std::string out;
  for (ClassId l : labels) out += std::to_string(l) + "\n";
  WriteFileAtomic(path, out);
}

std::vector<int> Dataset::ExamplesOf(ClassId c) const {
  std::vector<int> idx;
  for (size_t i = 0; i < video_labels.size(); ++i)
    if (video_labels[i] == c) idx.push_back(static_cast<int>(i));
  return idx;
}

Dataset LoadDataset(const fs::path &manifest) {
  json j;
  try {
    j = json::parse(ReadFile(manifest));
  } catch (const json::exception &e) {
    throw DataError(manifest.string() + ": " + e.what());
  }
  const fs::path base = manifest.parent_path();
  auto resolve = [&](const std::string &p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
  };
  Dataset ds;
  try {
    ds.name = j.value("name", manifest.stem().string());
    for (const auto &c : j.at("classes")) {
      ClassInfo info;
      info.id = c.at("id").get<ClassId>();
      info.name = c.value("name", std::to_string(info.id));
      if (c.contains("doc")) info.doc = resolve(c["doc"].get<std::string>());
      if (c.contains("image_bag"))
        info.image_bag = resolve(c["image_bag"].get<std::string>());
      ds.classes.push_back(std::move(info));
    }
    if (j.contains("word_table"))
      ds.word_table = resolve(j["word_table"].get<std::string>());
    ds.video_features = LoadMatrix(resolve(j.at("video_features")));
    ds.video_labels = LoadLabels(resolve(j.at("video_labels")));
  } catch (const json::exception &e) {
    throw DataError(manifest.string() + ": " + e.what());
  }
  std::sort(ds.classes.begin(), ds.classes.end(),
            [](const ClassInfo &a, const ClassInfo &b) { return a.id < b.id; });
  for (int i = 0; i < ds.num_classes(); ++i)
    if (ds.classes[i].id != i)
      throw DataError(manifest.string() + ": class ids must be 0..C-1");
  if (static_cast<Eigen::Index>(ds.video_labels.size()) !=
      ds.video_features.rows())
    throw DataError(manifest.string() + ": " +
                    std::to_string(ds.video_labels.size()) + " labels for " +
                    std::to_string(ds.video_features.rows()) + " videos");
  std::vector<int> per_class(ds.num_classes(), 0);
  for (ClassId l : ds.video_labels) {
    if (l < 0 || l >= ds.num_classes())
      throw DataError(manifest.string() + ": label " + std::to_string(l) +
                      " out of range");
    ++per_class[l];
  }
  for (int c = 0; c < ds.num_classes(); ++c)
    if (per_class[c] == 0)
      throw DataError(manifest.string() + ": class " + std::to_string(c) +
                      " has no videos");
  return ds;
}

std::vector<ClassSplit> GenerateClassSplits(int num_classes, int n_seen,
                                            int n_splits, uint64_t seed) {
  if (n_seen <= 0 || n_seen >= num_classes)
    throw ConfigError("n_seen must lie in (0, " + std::to_string(num_classes) +
                      "), got " + std::to_string(n_seen));
  if (n_splits <= 0) throw ConfigError("n_splits must be positive");
  // C choose n_seen, saturated at n_splits.
  double distinct = 1.0;
  for (int i = 0; i < n_seen && distinct < n_splits; ++i)
    distinct = distinct * (num_classes - i) / (i + 1);
  const bool can_be_distinct = distinct >= n_splits - 0.5;

  PortableRng rng(seed);
  std::set<std::vector<ClassId>> used;
  std::vector<ClassSplit> splits;
  for (int s = 0; s < n_splits; ++s) {
    std::vector<ClassId> seen;
    for (int attempt = 0;; ++attempt) {
      std::vector<ClassId> order(num_classes);
      for (int c = 0; c < num_classes; ++c) order[c] = c;
      rng.Shuffle(&order);
      seen.assign(order.begin(), order.begin() + n_seen);
      std::sort(seen.begin(), seen.end());
      if (!can_be_distinct || !used.count(seen) || attempt > 10000) break;
    }
    used.insert(seen);
    ClassSplit split;
    split.seen = seen;
    for (int c = 0; c < num_classes; ++c)
      if (!std::binary_search(seen.begin(), seen.end(), c))
        split.unseen.push_back(c);
    split.split_index = s;
    split.seed = DeriveSeed(seed, static_cast<uint64_t>(s));
    splits.push_back(std::move(split));
  }
  return splits;
}

void SaveSplits(const std::vector<ClassSplit> &splits, int num_classes,
                const fs::path &path) {
  json j;
  j["num_classes"] = num_classes;
  j["splits"] = json::array();
  for (const auto &s : splits)
    j["splits"].push_back({{"index", s.split_index},
                           {"seed", s.seed},
                           {"seen", s.seen},
                           {"unseen", s.unseen}});
  WriteFileAtomic(path, j.dump(2) + "\n");
}

std::vector<ClassSplit> LoadSplits(const fs::path &path) {
  std::vector<ClassSplit> splits;
  try {
    json j = json::parse(ReadFile(path));
    const int c = j.at("num_classes").get<int>();
    for (const auto &js : j.at("splits")) {
      ClassSplit s;
      s.split_index = js.at("index").get<int>();
      s.seed = js.value("seed", uint64_t{0});
      s.seen = SortedIds(js.at("seen"), path.string());
      s.unseen = SortedIds(js.at("unseen"), path.string());
      std::vector<ClassId> all = s.seen;
      all.insert(all.end(), s.unseen.begin(), s.unseen.end());
      std::sort(all.begin(), all.end());
      bool exhaustive = static_cast<int>(all.size()) == c;
      for (int i = 0; exhaustive && i < c; ++i) exhaustive = all[i] == i;
      if (!exhaustive || s.seen.empty() || s.unseen.empty())
        throw DataError(path.string() + ": split " +
                        std::to_string(s.split_index) +
                        " is not a seen/unseen partition of 0.." +
                        std::to_string(c - 1));
      splits.push_back(std::move(s));
    }
  } catch (const json::exception &e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return splits;
}

int HoldoutCount(int count, double fraction) {
  int n = static_cast<int>(std::floor(fraction * count + 0.5));
  return std::max(1, n);
}

GzslPartition GzslHoldout(const std::vector<ClassId> &labels,
                          const ClassSplit &split, double fraction,
                          uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("holdout fraction must lie in (0, 1)");
  GzslPartition part;
  for (ClassId c : split.seen) {
    std::vector<int> members;
    for (size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) members.push_back(static_cast<int>(i));
    const int count = static_cast<int>(members.size());
    if (count < 2)
      throw DataError("seen class " + std::to_string(c) + " has " +
                      std::to_string(count) +
                      " examples; cannot hold out a test example");
    const int n_test = std::min(HoldoutCount(count, fraction), count - 1);
    PortableRng rng(DeriveSeed(seed, static_cast<uint64_t>(c)));
    rng.Shuffle(&members);
    part.seen_test.insert(part.seen_test.end(), members.begin(),
                          members.begin() + n_test);
    part.train.insert(part.train.end(), members.begin() + n_test,
                      members.end());
  }
  for (size_t i = 0; i < labels.size(); ++i)
    if (std::binary_search(split.unseen.begin(), split.unseen.end(), labels[i]))
      part.unseen_test.push_back(static_cast<int>(i));
  std::sort(part.train.begin(), part.train.end());
  std::sort(part.seen_test.begin(), part.seen_test.end());
  return part;
}

std::vector<ClassFold> CvFolds(const std::vector<ClassId> &seen_classes,
                               int n_folds, uint64_t seed) {
  const int n = static_cast<int>(seen_classes.size());
  if (n_folds < 2 || n_folds > n)
    throw ConfigError("cannot make " + std::to_string(n_folds) +
                      " class-wise folds from " + std::to_string(n) +
                      " classes");
  std::vector<ClassId> order = seen_classes;
  std::sort(order.begin(), order.end());
  PortableRng rng(seed);
  rng.Shuffle(&order);
  std::vector<ClassFold> folds(n_folds);
  int start = 0;
  for (int f = 0; f < n_folds; ++f) {
    int size = n / n_folds + (f < n % n_folds ? 1 : 0);
    for (int i = 0; i < n; ++i) {
      bool held = i >= start && i < start + size;
      (held ? folds[f].pseudo_unseen : folds[f].pseudo_seen).push_back(order[i]);
    }
    std::sort(folds[f].pseudo_unseen.begin(), folds[f].pseudo_unseen.end());
    std::sort(folds[f].pseudo_seen.begin(), folds[f].pseudo_seen.end());
    start += size;
  }
  return folds;
}

Vector AverageSegments(const Matrix &segment_features) {
  if (segment_features.rows() == 0)
    throw DataError("cannot average zero segments");
  return segment_features.colwise().mean().transpose();
}

VectorBag SubsampleBag(const VectorBag &bag, int n, uint64_t seed) {
  if (n < 1) throw ConfigError("subsample size must be at least 1");
  if (n >= bag.size()) return bag;
  std::vector<int> idx(bag.size());
  for (int i = 0; i < bag.size(); ++i) idx[i] = i;
  PortableRng rng(seed);
  rng.Shuffle(&idx);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  VectorBag out;
  out.class_id = bag.class_id;
  out.vectors.resize(n, bag.dim());
  for (int i = 0; i < n; ++i) out.vectors.row(i) = bag.vectors.row(idx[i]);
  return out;
}

}  // namespace zsl
