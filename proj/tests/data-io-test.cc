// tests/data-io-test.cc

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


#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "zslkit/data-io.h"
#include "zslkit/portable-rng.h"

using namespace zsl;
namespace fs = std::filesystem;

namespace {

fs::path TempDir(const std::string &name) {
  fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void CheckPartition(const ClassSplit &s, int c) {
  std::vector<ClassId> all = s.seen;
  all.insert(all.end(), s.unseen.begin(), s.unseen.end());
  std::sort(all.begin(), all.end());
  REQUIRE(static_cast<int>(all.size()) == c);
  for (int i = 0; i < c; ++i) CHECK(all[i] == i);
  CHECK(std::is_sorted(s.seen.begin(), s.seen.end()));
  CHECK(std::is_sorted(s.unseen.begin(), s.unseen.end()));
}

}  // namespace

TEST_CASE("portable rng is reproducible") {
  PortableRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.NextU64() == b.NextU64());
  PortableRng r(1);
  for (int i = 0; i < 1000; ++i) {
    double u = r.Uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.Below(7) < 7u);
  }
  CHECK(DeriveSeed(5, 0) != DeriveSeed(5, 1));
  CHECK(DeriveSeed(5, 1) == DeriveSeed(5, 1));
}

TEST_CASE("matrix round trip") {
  fs::path dir = TempDir("zslkit_matrix");
  Matrix m(3, 2);
  m << 1.0, -0.0, 1e-300, std::numeric_limits<double>::max(), 0.1, -7.25;
  SaveMatrix(m, dir / "m.zmat");
  Matrix back = LoadMatrix(dir / "m.zmat");
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 2);
  CHECK(std::memcmp(back.data(), m.data(), sizeof(double) * 6) == 0);
  CHECK(!fs::exists(dir / "m.zmat.tmp"));

  PortableRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix r(1 + rng.Below(6), 1 + rng.Below(6));
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = rng.Normal() * 1e3;
    SaveMatrix(r, dir / "r.zmat");
    CHECK(LoadMatrix(dir / "r.zmat") == r);
  }
}

TEST_CASE("matrix file errors") {
  fs::path dir = TempDir("zslkit_matrix_err");
  CHECK_THROWS_AS(SaveMatrix(Matrix(0, 0), dir / "e.zmat"), DataError);
  std::ofstream(dir / "empty.zmat", std::ios::binary) << "ZMAT 0 0\n";
  CHECK_THROWS_AS(LoadMatrix(dir / "empty.zmat"), DataError);
  std::ofstream(dir / "bad.zmat", std::ios::binary) << "ZMTX 1 1\n01234567";
  CHECK_THROWS_AS(LoadMatrix(dir / "bad.zmat"), DataError);
  std::ofstream(dir / "short.zmat", std::ios::binary) << "ZMAT 2 1\n01234567";
  CHECK_THROWS_AS(LoadMatrix(dir / "short.zmat"), DataError);
  std::ofstream(dir / "long.zmat", std::ios::binary) << "ZMAT 1 1\n0123456789";
  CHECK_THROWS_AS(LoadMatrix(dir / "long.zmat"), DataError);
  CHECK_THROWS_AS(LoadMatrix(dir / "missing.zmat"), DataError);

  SaveMatrix(Matrix::Zero(2, 2), dir / "nan.zmat");
  {
    // Overwrite element (1, 0) with a NaN bit pattern.
    std::fstream f(dir / "nan.zmat", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(std::string("ZMAT 2 2\n").size() + 2 * 8);
    const unsigned char nan[8] = {0, 0, 0, 0, 0, 0, 0xf8, 0x7f};
    f.write(reinterpret_cast<const char *>(nan), 8);
  }
  try {
    LoadMatrix(dir / "nan.zmat");
    FAIL("expected an error");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("row 1, col 0") != std::string::npos);
  }
  Matrix inf = Matrix::Zero(1, 1);
  inf(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SaveMatrix(inf, dir / "inf.zmat"), DataError);
}

TEST_CASE("labels files") {
  fs::path dir = TempDir("zslkit_labels");
  SaveLabels({3, 0, 2}, dir / "l.txt");
  CHECK(LoadLabels(dir / "l.txt") == std::vector<ClassId>{3, 0, 2});
  std::ofstream(dir / "bad.txt") << "1\nx\n";
  CHECK_THROWS_AS(LoadLabels(dir / "bad.txt"), DataError);
}

TEST_CASE("class splits") {
  for (auto [c, n_seen] : {std::pair{101, 51}, std::pair{51, 26}}) {
    auto splits = GenerateClassSplits(c, n_seen, 5, 2024);
    REQUIRE(splits.size() == 5);
    std::set<std::vector<ClassId>> distinct;
    for (const auto &s : splits) {
      CHECK(static_cast<int>(s.seen.size()) == n_seen);
      CHECK(static_cast<int>(s.unseen.size()) == c - n_seen);
      CheckPartition(s, c);
      distinct.insert(s.seen);
    }
    CHECK(distinct.size() == 5);
    auto again = GenerateClassSplits(c, n_seen, 5, 2024);
    for (int i = 0; i < 5; ++i) CHECK(again[i].seen == splits[i].seen);
  }
  // 4 choose 2 = 6 distinct splits available.
  auto small = GenerateClassSplits(4, 2, 6, 1);
  std::set<std::vector<ClassId>> distinct;
  for (const auto &s : small) distinct.insert(s.seen);
  CHECK(distinct.size() == 6);
  CHECK(GenerateClassSplits(3, 1, 10, 1).size() == 10);

  CHECK_THROWS_AS(GenerateClassSplits(5, 0, 1, 0), ConfigError);
  CHECK_THROWS_AS(GenerateClassSplits(5, 5, 1, 0), ConfigError);
  CHECK_THROWS_AS(GenerateClassSplits(5, 2, 0, 0), ConfigError);

  PortableRng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    int c = 2 + static_cast<int>(rng.Below(30));
    int n_seen = 1 + static_cast<int>(rng.Below(c - 1));
    for (const auto &s : GenerateClassSplits(c, n_seen, 3, rng.NextU64())) CheckPartition(s, c);
  }
}

TEST_CASE("split files") {
  fs::path dir = TempDir("zslkit_splits");
  auto splits = GenerateClassSplits(10, 5, 3, 7);
  SaveSplits(splits, 10, dir / "s.json");
  auto back = LoadSplits(dir / "s.json");
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back[i].seen == splits[i].seen);
    CHECK(back[i].unseen == splits[i].unseen);
    CHECK(back[i].seed == splits[i].seed);
    CHECK(back[i].split_index == i);
  }
  std::ofstream(dir / "overlap.json")
      << R"({"num_classes": 3, "splits": [{"index": 0, "seen": [0, 1], "unseen": [1, 2]}]})";
  CHECK_THROWS_AS(LoadSplits(dir / "overlap.json"), DataError);
}

TEST_CASE("gzsl holdout") {
  CHECK(HoldoutCount(10, 0.2) == 2);
  CHECK(HoldoutCount(5, 0.2) == 1);
  CHECK(HoldoutCount(2, 0.2) == 1);
  CHECK(HoldoutCount(13, 0.2) == 3);  // 2.6 rounds up
  CHECK(HoldoutCount(12, 0.2) == 2);  // 2.4 rounds down

  // Classes 0 and 1 seen with 10 and 5 examples, class 2 unseen.
  std::vector<ClassId> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(0);
  for (int i = 0; i < 5; ++i) labels.push_back(1);
  for (int i = 0; i < 4; ++i) labels.push_back(2);
  ClassSplit split{{0, 1}, {2}, 0, 0};
  GzslPartition p = GzslHoldout(labels, split, 0.2, 99);
  auto count = [&](const std::vector<int> &idx, ClassId c) {
    return std::count_if(idx.begin(), idx.end(), [&](int i) { return labels[i] == c; });
  };
  CHECK(count(p.seen_test, 0) == 2);
  CHECK(count(p.train, 0) == 8);
  CHECK(count(p.seen_test, 1) == 1);
  CHECK(count(p.train, 1) == 4);
  CHECK(p.unseen_test == std::vector<int>{15, 16, 17, 18});
  std::vector<int> all = p.train;
  all.insert(all.end(), p.seen_test.begin(), p.seen_test.end());
  std::sort(all.begin(), all.end());
  std::vector<int> expected(15);
  for (int i = 0; i < 15; ++i) expected[i] = i;
  CHECK(all == expected);

  GzslPartition q = GzslHoldout(labels, split, 0.2, 99);
  CHECK(q.seen_test == p.seen_test);

  // The draw of a class does not depend on which other classes are seen.
  GzslPartition only0 = GzslHoldout(labels, ClassSplit{{0}, {1, 2}, 0, 0}, 0.2, 99);
  CHECK(only0.seen_test == std::vector<int>(p.seen_test.begin(), p.seen_test.begin() + 2));

  std::vector<ClassId> tiny = {0, 1, 1};
  CHECK_THROWS_AS(GzslHoldout(tiny, ClassSplit{{0}, {1}, 0, 0}, 0.2, 1), DataError);
  CHECK_THROWS_AS(GzslHoldout(labels, split, 1.0, 1), ConfigError);
}

TEST_CASE("class-wise folds") {
  std::vector<ClassId> seen(51);
  for (int i = 0; i < 51; ++i) seen[i] = 2 * i;
  auto folds = CvFolds(seen, 5, 4);
  REQUIRE(folds.size() == 5);
  std::vector<size_t> sizes;
  std::multiset<ClassId> held;
  for (const auto &f : folds) {
    sizes.push_back(f.pseudo_unseen.size());
    CHECK(f.pseudo_unseen.size() + f.pseudo_seen.size() == 51);
    held.insert(f.pseudo_unseen.begin(), f.pseudo_unseen.end());
  }
  CHECK(sizes == std::vector<size_t>{11, 10, 10, 10, 10});
  CHECK(held == std::multiset<ClassId>(seen.begin(), seen.end()));
  auto again = CvFolds(seen, 5, 4);
  for (int f = 0; f < 5; ++f) CHECK(again[f].pseudo_unseen == folds[f].pseudo_unseen);
  // Input order does not matter.
  std::reverse(seen.begin(), seen.end());
  auto rev = CvFolds(seen, 5, 4);
  for (int f = 0; f < 5; ++f) CHECK(rev[f].pseudo_unseen == folds[f].pseudo_unseen);
  CHECK_THROWS_AS(CvFolds({1, 2, 3}, 4, 0), ConfigError);
  CHECK_THROWS_AS(CvFolds({1, 2, 3}, 1, 0), ConfigError);
}

TEST_CASE("average segments") {
  Matrix one(1, 3);
  one << 1, 2, 3;
  CHECK(AverageSegments(one) == Vector(one.row(0).transpose()));
  Matrix two(2, 2);
  two << 0, 2, 2, 0;
  CHECK(AverageSegments(two) == Vector::Ones(2));
  CHECK(AverageSegments(two.colwise().reverse()) == AverageSegments(two));
  CHECK_THROWS_AS(AverageSegments(Matrix(0, 2)), DataError);
}

TEST_CASE("subsample bag") {
  PortableRng rng(5);
  VectorBag bag{3, Matrix(200, 2)};
  for (int i = 0; i < 200; ++i) bag.vectors.row(i) << i, -i;
  VectorBag s = SubsampleBag(bag, 5, 11);
  CHECK(s.size() == 5);
  CHECK(s.class_id == 3);
  std::set<int> rows;
  for (int i = 0; i < 5; ++i) {
    int r = static_cast<int>(s.vectors(i, 0));
    CHECK(s.vectors(i, 1) == -r);
    rows.insert(r);
  }
  CHECK(rows.size() == 5);
  CHECK(SubsampleBag(bag, 5, 11).vectors == s.vectors);
  CHECK(SubsampleBag(bag, 200, 11).vectors == bag.vectors);
  CHECK(SubsampleBag(bag, 500, 11).vectors == bag.vectors);
  CHECK_THROWS_AS(SubsampleBag(bag, 0, 11), ConfigError);
}

TEST_CASE("dataset manifest") {
  fs::path dir = TempDir("zslkit_dataset");
  Matrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  SaveMatrix(x, dir / "x.zmat");
  SaveLabels({0, 1, 1}, dir / "y.txt");
  std::ofstream(dir / "m.json") << R"({"name": "toy", "classes": [
      {"id": 1, "name": "b", "doc": "b.txt"}, {"id": 0, "name": "a", "image_bag": "a.zmat"}],
      "video_features": "x.zmat", "video_labels": "y.txt"})";
  Dataset ds = LoadDataset(dir / "m.json");
  CHECK(ds.name == "toy");
  REQUIRE(ds.num_classes() == 2);
  CHECK(ds.classes[0].name == "a");
  CHECK(*ds.classes[0].image_bag == dir / "a.zmat");
  CHECK(*ds.classes[1].doc == dir / "b.txt");
  CHECK(ds.ExamplesOf(1) == std::vector<int>{1, 2});

  SaveLabels({0, 0, 0}, dir / "y2.txt");
  std::ofstream(dir / "noex.json") << R"({"classes": [{"id": 0}, {"id": 1}],
      "video_features": "x.zmat", "video_labels": "y2.txt"})";
  CHECK_THROWS_AS(LoadDataset(dir / "noex.json"), DataError);
  SaveLabels({0, 1, 5}, dir / "y3.txt");
  std::ofstream(dir / "range.json") << R"({"classes": [{"id": 0}, {"id": 1}],
      "video_features": "x.zmat", "video_labels": "y3.txt"})";
  CHECK_THROWS_AS(LoadDataset(dir / "range.json"), DataError);
  std::ofstream(dir / "gap.json") << R"({"classes": [{"id": 0}, {"id": 2}],
      "video_features": "x.zmat", "video_labels": "y.txt"})";
  CHECK_THROWS_AS(LoadDataset(dir / "gap.json"), DataError);
}
