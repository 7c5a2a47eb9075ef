// zslkit/data-io.h

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


#ifndef ZSLKIT_DATA_IO_H_
#define ZSLKIT_DATA_IO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zslkit/vector-bag.h"
#include "zslkit/zsl-common.h"

namespace zsl {

// Matrix file: ASCII header "ZMAT rows cols\n" followed by rows*cols
// little-endian float64 values in row-major order. Both dimensions must be
// positive and every value finite.
Matrix LoadMatrix(const std::filesystem::path &path);
void SaveMatrix(const Matrix &m, const std::filesystem::path &path);

// Labels file: one integer per line; blank lines are ignored.
std::vector<ClassId> LoadLabels(const std::filesystem::path &path);
void SaveLabels(const std::vector<ClassId> &labels,
                const std::filesystem::path &path);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path &path,
                     const std::string &contents);
std::string ReadFile(const std::filesystem::path &path);

struct ClassInfo {
  ClassId id = 0;
  std::string name;
  std::optional<std::filesystem::path> doc;
  std::optional<std::filesystem::path> image_bag;
};

struct Dataset {
  std::string name;
  std::vector<ClassInfo> classes;  // classes[i].id == i
  Matrix video_features;           // n x d_visual
  std::vector<ClassId> video_labels;
  std::optional<std::filesystem::path> word_table;

  int num_classes() const { return static_cast<int>(classes.size()); }
  /// Example indices of every video with label `c`, ascending.
  std::vector<int> ExamplesOf(ClassId c) const;
};

/// Reads a dataset manifest:
///   {name, classes: [{id, name, doc?, image_bag?}], video_features,
///    video_labels, word_table?}
/// Relative paths resolve against the manifest's directory. Validates that
/// ids are 0..C-1, labels lie in range, and every class has a video.
Dataset LoadDataset(const std::filesystem::path &manifest);

struct ClassSplit {
  std::vector<ClassId> seen;    // ascending
  std::vector<ClassId> unseen;  // ascending
  int split_index = 0;
  uint64_t seed = 0;
};

/// Draws `n_splits` seen/unseen partitions of 0..C-1 by seeded shuffling.
/// Splits are mutually distinct whenever C choose n_seen >= n_splits.
std::vector<ClassSplit> GenerateClassSplits(int num_classes, int n_seen,
                                            int n_splits, uint64_t seed);

void SaveSplits(const std::vector<ClassSplit> &splits, int num_classes,
                const std::filesystem::path &path);
std::vector<ClassSplit> LoadSplits(const std::filesystem::path &path);

struct GzslPartition {
  std::vector<int> train;        // example indices, ascending
  std::vector<int> seen_test;    // ascending
  std::vector<int> unseen_test;  // ascending
};

/// Holds out round-half-up(fraction * count), at least one, examples of each
/// seen class. The per-class draw depends only on (seed, class id).
GzslPartition GzslHoldout(const std::vector<ClassId> &labels,
                          const ClassSplit &split, double fraction,
                          uint64_t seed);

/// Number of held-out examples for a class of `count` examples.
int HoldoutCount(int count, double fraction);

struct ClassFold {
  std::vector<ClassId> pseudo_seen;
  std::vector<ClassId> pseudo_unseen;
};

/// Class-wise cross-validation. Shuffled classes are dealt into `n_folds`
/// contiguous groups whose sizes differ by at most one (larger ones first).
std::vector<ClassFold> CvFolds(const std::vector<ClassId> &seen_classes,
                               int n_folds, uint64_t seed);

/// Column-wise mean of per-segment features.
Vector AverageSegments(const Matrix &segment_features);

/// Seeded sample without replacement of min(n, bag.size()) vectors. The
/// sampled rows keep their original relative order.
VectorBag SubsampleBag(const VectorBag &bag, int n, uint64_t seed);

}  // namespace zsl

#endif  // ZSLKIT_DATA_IO_H_
