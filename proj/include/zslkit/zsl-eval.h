// zslkit/zsl-eval.h

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


#ifndef ZSLKIT_ZSL_EVAL_H_
#define ZSLKIT_ZSL_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zslkit/embedding.h"
#include "zslkit/zsl-common.h"

namespace zsl {

/// Label of the closest class embedding for every row of `points`. Exact
/// ties go to the smallest class id.
std::vector<ClassId> ClassifyNearest(const Matrix &points,
                                     const ClassEmbeddings &space,
                                     Metric metric = Metric::kEuclidean);

/// Mean over `class_set` of the fraction of that class's examples predicted
/// correctly. Every class in `class_set` needs at least one example.
double PerClassAccuracy(const std::vector<ClassId> &pred,
                        const std::vector<ClassId> &truth,
                        const std::vector<ClassId> &class_set);

/// 2 a_u a_s / (a_u + a_s); 0 when either is 0, and exactly x for (x, x).
double HarmonicMean(double a_u, double a_s);

/// A_U->U: search space restricted to the unseen classes.
double EvaluateCzsl(const Matrix &unseen_points,
                    const std::vector<ClassId> &truth,
                    const ClassEmbeddings &unseen, Metric metric = Metric::kEuclidean);

struct GzslScores {
  double a_u_t = 0.0;
  double a_s_t = 0.0;
  double h = 0.0;
};

/// A_U->T, A_S->T and H with the search space `all` (seen plus unseen).
/// With no unseen test example A_U->T is 0.
GzslScores EvaluateGzsl(const Matrix &unseen_points,
                        const std::vector<ClassId> &unseen_truth,
                        const Matrix &seen_points,
                        const std::vector<ClassId> &seen_truth,
                        const ClassEmbeddings &all,
                        Metric metric = Metric::kEuclidean);

struct KmeansResult {
  Matrix centroids;          // k x dim
  std::vector<int> assignment;
  double inertia = 0.0;      // within-cluster sum of squares
  int iterations = 0;
  bool converged = false;
};

// Lloyd iterations from k-means++ seeding. Points are visited in
// lexicographic order, so the result does not depend on input order. An
// empty cluster is re-seeded at the point farthest from its centroid. With
// restarts > 1 the lowest inertia wins (earliest restart on ties).
KmeansResult Kmeans(const Matrix &points, int k, uint64_t seed,
                    int max_iter = 300, int restarts = 1);

struct Assignment {
  std::vector<int> col_for_row;
  double cost = 0.0;
};

/// Minimum-cost perfect matching of a square cost matrix (Hungarian method
/// with potentials, O(k^3)).
Assignment OptimalAssignment(const Matrix &cost);

/// Clusters `points` into as many groups as `space` has classes, matches
/// clusters to classes one-to-one by centroid distance and labels every
/// member with its cluster's class.
std::vector<ClassId> TransductivePredict(const Matrix &points,
                                         const ClassEmbeddings &space,
                                         Metric metric, uint64_t seed,
                                         int kmeans_restarts = 1);

/// Metric values of one split; absent entries were not requested.
struct SplitScores {
  std::optional<double> a_u_u, a_u_t, a_s_t, h;
};

struct MetricSummary {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample stddev / sqrt(#splits); 0 for one split
  int count = 0;
};

/// Mean and standard error per metric name ("A_U->U", "A_U->T", "A_S->T",
/// "H"), each over the splits that report it. H is averaged per split.
std::map<std::string, MetricSummary> Summarize(const std::vector<SplitScores> &splits);

}  // namespace zsl

#endif  // ZSLKIT_ZSL_EVAL_H_
