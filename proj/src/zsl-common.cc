// src/zsl-common.cc

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


#include "zslkit/zsl-common.h"

namespace zsl {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kData: return "data";
    case ErrorKind::kNumerical: return "numerical";
  }
  return "unknown";
}

const char *MetricName(Metric metric) {
  return metric == Metric::kCosine ? "cosine" : "euclidean";
}

Metric ParseMetric(const std::string &name) {
  if (name == "cosine") return Metric::kCosine;
  if (name == "euclidean") return Metric::kEuclidean;
  throw ConfigError("unknown metric '" + name + "'");
}

double Distance(const Eigen::Ref<const Vector> &a,
                const Eigen::Ref<const Vector> &b, Metric metric) {
  if (a.size() != b.size())
    throw DataError("distance between vectors of dimension " +
                    std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  if (metric == Metric::kEuclidean) return (a - b).norm();
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw DataError("cosine distance undefined for a zero vector");
  return 1.0 - a.dot(b) / (na * nb);
}

}  // namespace zsl
