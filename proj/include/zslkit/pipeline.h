// zslkit/pipeline.h

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


#ifndef ZSLKIT_PIPELINE_H_
#define ZSLKIT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zslkit/data-io.h"
#include "zslkit/embedding.h"
#include "zslkit/encoders.h"
#include "zslkit/zsl-eval.h"

namespace zsl {

// ---------------------------------------------------------------------------
// Encoding

enum class RepMethod { kTd, kAwv, kFwv, kAfv, kFfv };

RepMethod ParseRepMethod(const std::string &name);
std::string RepMethodName(RepMethod method, int k);
bool IsFisher(RepMethod method);

struct EncodeRequest {
  RepMethod method = RepMethod::kAfv;
  int num_components = 1;  // K for FWV / FFV, 1..5
  /// Overrides the manifest's word_table.
  std::optional<std::filesystem::path> word_table;
  /// Stop-word file; the built-in list when unset.
  std::optional<std::filesystem::path> stopwords;
  /// Images per class for AFV / FFV; 0 uses every image.
  int images_per_class = 0;
  int max_pool = 0;
  GmmConfig gmm;
  FisherOptions fisher;
  uint64_t seed = 0;
};

struct EncodeOutcome {
  SemanticSpace space;
  /// Per-class notes: skipped tokens, classes whose bag was smaller than
  /// images_per_class, GMM fit statistics.
  std::string details_json;
};

EncodeOutcome EncodeDataset(const Dataset &ds, const EncodeRequest &req);
std::string EncodeRequestJson(const EncodeRequest &req);

// ---------------------------------------------------------------------------
// Evaluation

struct ModelParams {
  int latent_dim = 10;
  int num_neighbors = 10;
  double width_multiple = 1.0;
};

struct CvGrid {
  std::vector<int> latent_dims = {20, 50, 100};
  std::vector<int> num_neighbors = {5, 10, 20};
  std::vector<double> width_multiples = {0.5, 1.0, 2.0};
  int folds = 5;
};

struct EvaluateOptions {
  ModelParams params;
  bool cross_validate = false;
  CvGrid grid;
  bool czsl = true;
  bool gzsl = true;
  bool transductive = false;
  double holdout_fraction = 0.2;
  LsmConfig lsm;
  int kmeans_restarts = 5;
  uint64_t seed = 0;
  /// Worker threads; 0 reads ZSLKIT_THREADS, falling back to the hardware.
  int threads = 0;
  /// When set, every fitted model is written here.
  std::optional<std::filesystem::path> model_dir;
};

struct SplitOutcome {
  int split_index = 0;
  uint64_t seed = 0;
  ModelParams params;
  SplitScores inductive;
  SplitScores transductive;
};

struct EvalReport {
  std::string dataset;
  std::string method;
  EvaluateOptions options;
  std::vector<SplitOutcome> splits;
};

/// Fits SLPP on `train` examples, computes landmarks and places `unseen`
/// classes with LSM.
LatentModel FitLatentModel(const Dataset &ds, const std::vector<int> &train,
                           const Matrix &semantic_dist,
                           const std::vector<ClassId> &semantic_ids,
                           const std::vector<ClassId> &unseen,
                           const ModelParams &params, const LsmConfig &lsm);

/// Grid search by class-wise cross-validation over the seen classes of
/// `split`, scored by mean pseudo-cZSL accuracy. Infeasible grid points are
/// skipped; ties keep the earliest point in grid order.
ModelParams SelectParams(const Dataset &ds, const SemanticSpace &space,
                         const Matrix &semantic_dist, const ClassSplit &split,
                         const EvaluateOptions &opts, uint64_t seed);

EvalReport Evaluate(const Dataset &ds, const SemanticSpace &space,
                    const std::vector<ClassSplit> &splits,
                    const EvaluateOptions &opts);

std::string EvaluateOptionsJson(const EvaluateOptions &opts);
std::string ReportJson(const EvalReport &report);
/// Rows: method,setting,metric,mean,stderr.
std::string ReportCsv(const EvalReport &report);
/// Human-readable mean +- stderr table (percent).
std::string ReportTable(const std::string &report_json);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { kComponents, kImagesPerClass };

struct SweepPoint {
  int value = 0;
  EvalReport report;
  /// Classes whose bag had fewer images than requested (full bag used).
  std::vector<ClassId> full_bag_classes;
};

std::vector<SweepPoint> Sweep(const Dataset &ds, const std::vector<ClassSplit> &splits,
                              const EncodeRequest &base, SweepAxis axis,
                              const std::vector<int> &values,
                              const EvaluateOptions &opts);
/// Rows: axis_value,setting,metric,mean,stderr.
std::string SweepCsv(const std::vector<SweepPoint> &points);

/// Runs fn(0..n-1) on up to `threads` workers. The first failure by index is
/// rethrown after all workers finish.
void ParallelFor(int n, int threads, const std::function<void(int)> &fn);
int ResolveThreads(int requested);

}  // namespace zsl

#endif  // ZSLKIT_PIPELINE_H_
