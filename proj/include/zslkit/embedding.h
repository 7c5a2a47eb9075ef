// zslkit/embedding.h

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


#ifndef ZSLKIT_EMBEDDING_H_
#define ZSLKIT_EMBEDDING_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "zslkit/encoders.h"
#include "zslkit/zsl-common.h"

namespace zsl {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Supervised neighbourhood graph over training examples. Symmetric,
/// non-negative, zero diagonal, every row with a positive entry.
struct AffinityGraph {
  SparseMatrix weights;
  int num_neighbors = 0;
  double width = 0.0;
};

// W_ij = exp(-|x_i - x_j|^2 / (2 width^2)) when x_j is one of the k nearest
// neighbours of x_i (rows of X) and has the same label, else 0; then
// symmetrized with max(W, W^T). A row left empty is connected to every other
// example of its class. Throws DataError when that class has one example.
AffinityGraph KnnAffinity(const Matrix &points, const std::vector<ClassId> &labels,
                          int num_neighbors, double width);

/// Median pairwise Euclidean distance, over at most `max_points` rows taken
/// at an even stride.
double MedianPairwiseDistance(const Matrix &points, int max_points = 2000);

struct SlppConfig {
  int num_neighbors = 10;
  /// Kernel width as a multiple of the median pairwise distance.
  double width_multiple = 1.0;
  int latent_dim = 20;
};

struct SlppResult {
  Matrix projection;     // d_visual x d_latent
  Vector eigenvalues;    // one per retained column, ascending
  double regularization = 0.0;
  double width = 0.0;
};

// Solves X^T L X p = lambda (X^T D X + eps I) p for the rows-as-examples data
// matrix X, with L = D - W and D the degree matrix of `graph`. The columns of
// the projection are the generalized eigenvectors with the smallest
// eigenvalues, normalized so P^T (X^T D X + eps I) P = I. Eigenvectors whose
// projection is constant over the training set, or with p^T X^T D X p < 1/2
// (outside the data span), are skipped.
// eps = 1e-8 * trace(X^T D X) / d_visual.
SlppResult SlppFitGraph(const Matrix &points, const AffinityGraph &graph,
                        int latent_dim);
/// Builds the kNN graph (width = width_multiple * median distance) and fits.
SlppResult SlppFit(const Matrix &points, const std::vector<ClassId> &labels,
                   const SlppConfig &cfg);

/// Row-wise y = P^T x.
Matrix Project(const Matrix &projection, const Matrix &points);

/// Class ids with one row per class.
struct ClassEmbeddings {
  std::vector<ClassId> class_ids;
  Matrix points;

  int size() const { return static_cast<int>(class_ids.size()); }
};

/// Mean latent point of every label, ordered by ascending class id.
ClassEmbeddings ClassLandmarks(const Matrix &latent,
                               const std::vector<ClassId> &labels);

/// Pairwise distances between the space's representations under its metric.
Matrix SemanticDistanceMatrix(const SemanticSpace &space);

struct LsmConfig {
  double learning_rate = 0.1;
  int max_iter = 2000;
  double tol = 1e-9;
  int restarts = 5;
  double jitter = 1e-3;
  uint64_t seed = 0;
  /// Optional start for every unseen class (rows follow `unseen_ids`).
  /// When set, a single run starts exactly there.
  std::optional<Matrix> init;
};

struct StressTrace {
  std::vector<double> values;  // initial stress, then one per accepted step
  double final_stress = 0.0;
};

struct LsmResult {
  ClassEmbeddings unseen;
  StressTrace trace;
  double scale = 1.0;  // semantic-to-latent distance factor
  int clamped_pairs = 0;
  int best_restart = 0;
};

// Places unseen classes among fixed landmarks by minimizing
//   E = (1 / sum delta) sum (delta_pq - d_pq)^2 / delta_pq
// over seen-unseen and unseen-unseen pairs, where delta is the semantic
// distance times `scale` = mean landmark distance / mean seen-seen semantic
// distance and d is the latent Euclidean distance. `semantic` is indexed by
// `semantic_ids`. Zero targets between distinct classes are clamped to
// 1e-6 * mean delta. Gradient descent: a step that raises stress is rejected
// and the rate halved; an accepted step grows it by 1.2.
LsmResult LsmEmbed(const ClassEmbeddings &landmarks, const Matrix &semantic,
                   const std::vector<ClassId> &semantic_ids,
                   const std::vector<ClassId> &unseen_ids, const LsmConfig &cfg);

/// Sammon stress of a full configuration; used by LsmEmbed and its tests.
double LsmStress(const Matrix &landmarks, const Matrix &unseen,
                 const Matrix &target_su, const Matrix &target_uu);

struct LatentModel {
  Matrix projection;
  ClassEmbeddings seen_landmarks;
  ClassEmbeddings unseen_embeddings;
  int latent_dim() const { return static_cast<int>(projection.cols()); }
};

/// Writes `<dir>/<stem>.projection.zmat`, `.landmarks.zmat`, `.unseen.zmat`
/// and a `<stem>.json` sidecar {d_latent, class_ids, config, seed}.
void SaveLatentModel(const LatentModel &model, const std::filesystem::path &dir,
                     const std::string &stem, const std::string &config_json,
                     uint64_t seed);
LatentModel LoadLatentModel(const std::filesystem::path &sidecar);

}  // namespace zsl

#endif  // ZSLKIT_EMBEDDING_H_
