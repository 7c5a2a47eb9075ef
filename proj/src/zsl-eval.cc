// src/zsl-eval.cc

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


#include "zslkit/zsl-eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "zslkit/portable-rng.h"

namespace zsl {

std::vector<ClassId> ClassifyNearest(const Matrix &points,
                                     const ClassEmbeddings &space, Metric metric) {
  if (space.size() == 0) throw DataError("empty label search space");
  if (points.cols() != space.points.cols())
    throw DataError("test points of dimension " + std::to_string(points.cols()) +
                    " against class embeddings of dimension " +
                    std::to_string(space.points.cols()));
  std::vector<int> by_id(space.size());
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(), [&](int a, int b) {
    return space.class_ids[a] < space.class_ids[b];
  });
  std::vector<ClassId> pred(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vector p = points.row(i).transpose();
    double best = std::numeric_limits<double>::infinity();
    int arg = by_id.front();
    for (int c : by_id) {
      double d = Distance(p, space.points.row(c).transpose(), metric);
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    pred[i] = space.class_ids[arg];
  }
  return pred;
}

double PerClassAccuracy(const std::vector<ClassId> &pred,
                        const std::vector<ClassId> &truth,
                        const std::vector<ClassId> &class_set) {
  if (pred.size() != truth.size())
    throw DataError("prediction and truth lengths differ");
  if (class_set.empty()) throw DataError("per-class accuracy over no classes");
  std::map<ClassId, std::pair<int, int>> tally;  // correct, total
  for (ClassId c : class_set) tally[c] = {0, 0};
  for (size_t i = 0; i < truth.size(); ++i) {
    auto it = tally.find(truth[i]);
    if (it == tally.end())
      throw DataError("truth label " + std::to_string(truth[i]) +
                      " is outside the evaluated class set");
    ++it->second.second;
    if (pred[i] == truth[i]) ++it->second.first;
  }
  double sum = 0.0;
  for (const auto &[c, ct] : tally) {
    if (ct.second == 0)
      throw DataError("class " + std::to_string(c) + " has no test examples");
    sum += static_cast<double>(ct.first) / ct.second;
  }
  return sum / static_cast<double>(tally.size());
}

double HarmonicMean(double a_u, double a_s) {
  if (a_u == a_s) return a_u;
  if (a_u == 0.0 || a_s == 0.0) return 0.0;
  // Reciprocal form; rounds (0.2, 0.8) to 0.32 where 2ab/(a+b) does not.
  return 2.0 / (1.0 / a_u + 1.0 / a_s);
}

double EvaluateCzsl(const Matrix &unseen_points, const std::vector<ClassId> &truth,
                    const ClassEmbeddings &unseen, Metric metric) {
  return PerClassAccuracy(ClassifyNearest(unseen_points, unseen, metric), truth,
                          unseen.class_ids);
}

namespace {

std::vector<ClassId> Present(const std::vector<ClassId> &labels) {
  std::vector<ClassId> c = labels;
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

}  // namespace

GzslScores EvaluateGzsl(const Matrix &unseen_points,
                        const std::vector<ClassId> &unseen_truth,
                        const Matrix &seen_points,
                        const std::vector<ClassId> &seen_truth,
                        const ClassEmbeddings &all, Metric metric) {
  GzslScores s;
  if (!unseen_truth.empty())
    s.a_u_t = PerClassAccuracy(ClassifyNearest(unseen_points, all, metric),
                               unseen_truth, Present(unseen_truth));
  if (!seen_truth.empty())
    s.a_s_t = PerClassAccuracy(ClassifyNearest(seen_points, all, metric),
                               seen_truth, Present(seen_truth));
  s.h = HarmonicMean(s.a_u_t, s.a_s_t);
  return s;
}

namespace {

int Nearest(const Matrix &centroids, const Eigen::Ref<const RowVector> &p,
            double *dist2) {
  int arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    double d = (centroids.row(c) - p).squaredNorm();
    if (d < best) {
      best = d;
      arg = static_cast<int>(c);
    }
  }
  if (dist2) *dist2 = best;
  return arg;
}

KmeansResult LloydRun(const Matrix &pts, int k, uint64_t seed, int max_iter) {
  const Eigen::Index n = pts.rows();
  PortableRng rng(seed);
  KmeansResult res;
  res.centroids.resize(k, pts.cols());
  res.centroids.row(0) = pts.row(static_cast<Eigen::Index>(rng.Below(n)));
  Vector best = (pts.rowwise() - res.centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = best.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.Uniform01() * total, acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += best(i);
        if (u < acc && best(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.Below(n));
    }
    res.centroids.row(c) = pts.row(pick);
    best = best.cwiseMin((pts.rowwise() - res.centroids.row(c)).rowwise().squaredNorm());
  }

  res.assignment.assign(n, -1);
  Vector d2(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int a = Nearest(res.centroids, pts.row(i), &d2(i));
      if (a != res.assignment[i]) {
        res.assignment[i] = a;
        changed = true;
      }
    }
    // Re-seed empty clusters at the point farthest from its own centroid.
    std::vector<int> sizes(k, 0);
    for (int a : res.assignment) ++sizes[a];
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i)
        if (sizes[res.assignment[i]] > 1 && (far < 0 || d2(i) > d2(far))) far = i;
      --sizes[res.assignment[far]];
      res.assignment[far] = c;
      sizes[c] = 1;
      d2(far) = 0.0;
      res.centroids.row(c) = pts.row(far);
      changed = true;
    }
    res.iterations = iter + 1;
    if (!changed) {
      res.converged = true;
      break;
    }
    Matrix sums = Matrix::Zero(k, pts.cols());
    for (Eigen::Index i = 0; i < n; ++i) sums.row(res.assignment[i]) += pts.row(i);
    for (int c = 0; c < k; ++c) res.centroids.row(c) = sums.row(c) / sizes[c];
  }
  res.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    res.inertia += (pts.row(i) - res.centroids.row(res.assignment[i])).squaredNorm();
  return res;
}

}  // namespace

KmeansResult Kmeans(const Matrix &points, int k, uint64_t seed, int max_iter,
                    int restarts) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw ConfigError("k-means needs k >= 1");
  if (n < k)
    throw DataError("k-means with k = " + std::to_string(k) + " on only " +
                    std::to_string(n) + " points");
  if (restarts < 1) throw ConfigError("k-means needs at least one restart");
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index d = 0; d < points.cols(); ++d) {
      if (points(a, d) < points(b, d)) return true;
      if (points(a, d) > points(b, d)) return false;
    }
    return false;
  });
  Matrix sorted(n, points.cols());
  for (Eigen::Index i = 0; i < n; ++i) sorted.row(i) = points.row(order[i]);

  KmeansResult best;
  for (int r = 0; r < restarts; ++r) {
    KmeansResult run = LloydRun(sorted, k, DeriveSeed(seed, static_cast<uint64_t>(r)),
                                max_iter);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  std::vector<int> assignment(n);
  for (Eigen::Index i = 0; i < n; ++i) assignment[order[i]] = best.assignment[i];
  best.assignment = std::move(assignment);
  return best;
}

Assignment OptimalAssignment(const Matrix &cost) {
  if (cost.rows() != cost.cols())
    throw DataError("assignment cost matrix must be square, got " +
                    std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()));
  if (!cost.allFinite()) throw DataError("assignment cost matrix has non-finite entries");
  const int n = static_cast<int>(cost.rows());
  Assignment out;
  if (n == 0) return out;
  // Shortest augmenting paths with row potentials u and column potentials v;
  // index 0 is a virtual column.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = row_of_col[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      int j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  out.col_for_row.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.col_for_row[row_of_col[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.col_for_row[i]);
  return out;
}

std::vector<ClassId> TransductivePredict(const Matrix &points,
                                         const ClassEmbeddings &space,
                                         Metric metric, uint64_t seed,
                                         int kmeans_restarts) {
  const int k = space.size();
  if (k == 0) throw DataError("empty label search space");
  if (points.cols() != space.points.cols())
    throw DataError("test points and class embeddings differ in dimension");
  KmeansResult km = Kmeans(points, k, seed, 300, kmeans_restarts);
  Matrix cost(k, k);
  for (int c = 0; c < k; ++c)
    for (int u = 0; u < k; ++u)
      cost(c, u) = Distance(km.centroids.row(c).transpose(),
                            space.points.row(u).transpose(), metric);
  Assignment match = OptimalAssignment(cost);
  std::vector<ClassId> pred(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    pred[i] = space.class_ids[match.col_for_row[km.assignment[i]]];
  return pred;
}

std::map<std::string, MetricSummary> Summarize(const std::vector<SplitScores> &splits) {
  std::map<std::string, std::vector<double>> values;
  for (const auto &s : splits) {
    if (s.a_u_u) values["A_U->U"].push_back(*s.a_u_u);
    if (s.a_u_t) values["A_U->T"].push_back(*s.a_u_t);
    if (s.a_s_t) values["A_S->T"].push_back(*s.a_s_t);
    if (s.h) values["H"].push_back(*s.h);
  }
  std::map<std::string, MetricSummary> out;
  for (const auto &[name, v] : values) {
    MetricSummary m;
    m.count = static_cast<int>(v.size());
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / m.count;
    if (m.count > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - m.mean) * (x - m.mean);
      m.stderr_ = std::sqrt(ss / (m.count - 1)) / std::sqrt(static_cast<double>(m.count));
    }
    out[name] = m;
  }
  return out;
}

}  // namespace zsl
