// src/embedding.cc

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


#include "zslkit/embedding.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "zslkit/data-io.h"
#include "zslkit/portable-rng.h"

namespace zsl {

namespace fs = std::filesystem;

AffinityGraph KnnAffinity(const Matrix &points, const std::vector<ClassId> &labels,
                          int num_neighbors, double width) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw DataError("affinity graph needs at least two examples");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw DataError("affinity graph: " + std::to_string(labels.size()) +
                    " labels for " + std::to_string(n) + " examples");
  if (num_neighbors < 1 || num_neighbors >= n)
    throw ConfigError("neighbour count must lie in [1, " + std::to_string(n - 1) +
                      "], got " + std::to_string(num_neighbors));
  if (!(width > 0.0)) throw ConfigError("kernel width must be positive");

  const Vector sq = points.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * points * points.transpose()).colwise() + sq;
  d2.rowwise() += sq.transpose();
  d2 = d2.cwiseMax(0.0);
  const double denom = 2.0 * width * width;

  Matrix w = Matrix::Zero(n, n);
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::swap(order[i], order[n - 1]);
    auto closer = [&](Eigen::Index a, Eigen::Index b) {
      return d2(i, a) < d2(i, b) || (d2(i, a) == d2(i, b) && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + num_neighbors,
                      order.end() - 1, closer);
    for (int t = 0; t < num_neighbors; ++t) {
      Eigen::Index j = order[t];
      if (labels[j] != labels[i]) continue;
      double v = std::exp(-d2(i, j) / denom);
      w(i, j) = std::max(w(i, j), v);
      w(j, i) = std::max(w(j, i), v);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((w.row(i).array() > 0.0).any()) continue;
    bool has_mate = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || labels[j] != labels[i]) continue;
      has_mate = true;
      double v = std::exp(-d2(i, j) / denom);
      w(i, j) = std::max(w(i, j), v);
      w(j, i) = std::max(w(j, i), v);
    }
    if (!has_mate)
      throw DataError("class " + std::to_string(labels[i]) +
                      " has a single example; its graph row would be empty");
    if (!(w.row(i).array() > 0.0).any())
      throw NumericalError("kernel width " + std::to_string(width) +
                           " underflows every same-class weight of example " +
                           std::to_string(i));
  }
  AffinityGraph g;
  g.weights = w.sparseView();
  g.num_neighbors = num_neighbors;
  g.width = width;
  return g;
}

double MedianPairwiseDistance(const Matrix &points, int max_points) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw DataError("median distance needs at least two points");
  const Eigen::Index stride = std::max<Eigen::Index>(1, (n + max_points - 1) / max_points);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; i += stride) idx.push_back(i);
  std::vector<double> dist;
  dist.reserve(idx.size() * (idx.size() - 1) / 2);
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = a + 1; b < idx.size(); ++b)
      dist.push_back((points.row(idx[a]) - points.row(idx[b])).norm());
  if (dist.empty()) dist.push_back((points.row(0) - points.row(n - 1)).norm());
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  return *mid;
}

SlppResult SlppFitGraph(const Matrix &points, const AffinityGraph &graph,
                        int latent_dim) {
  const Eigen::Index n = points.rows(), dim = points.cols();
  if (graph.weights.rows() != n || graph.weights.cols() != n)
    throw DataError("graph size does not match the number of examples");
  if (latent_dim < 1 || latent_dim > dim)
    throw ConfigError("latent dimension " + std::to_string(latent_dim) +
                      " out of range [1, " + std::to_string(dim) + "]");
  const Vector degree = graph.weights * Vector::Ones(n);
  const Matrix b = points.transpose() * degree.asDiagonal() * points;
  const Matrix wx = graph.weights * points;
  Matrix a = b - points.transpose() * wx;
  a = 0.5 * (a + a.transpose()).eval();

  SlppResult res;
  res.regularization = 1e-8 * b.trace() / static_cast<double>(dim);
  if (!(res.regularization > 0.0))
    throw NumericalError("constraint matrix X^T D X is zero");
  Matrix b_reg = b;
  b_reg.diagonal().array() += res.regularization;

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(
      a, b_reg, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw NumericalError("generalized eigensolver failed (constraint matrix "
                         "singular beyond regularization)");

  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < dim && static_cast<int>(keep.size()) < latent_dim; ++c) {
    const Vector p = solver.eigenvectors().col(c);
    // Directions whose normalization is mostly carried by the regularizer
    // lie (numerically) outside the data span.
    if (p.dot(b * p) < 0.5) continue;
    const Vector y = points * p;
    const double centred = (y.array() - y.mean()).matrix().norm();
    if (centred <= 1e-9 * std::max(y.norm(), 1e-300)) continue;
    keep.push_back(c);
  }
  if (static_cast<int>(keep.size()) < latent_dim)
    throw ConfigError("latent dimension " + std::to_string(latent_dim) +
                      " exceeds the " + std::to_string(keep.size()) +
                      " informative directions of the training data");
  res.projection.resize(dim, latent_dim);
  res.eigenvalues.resize(latent_dim);
  for (int c = 0; c < latent_dim; ++c) {
    res.projection.col(c) = solver.eigenvectors().col(keep[c]);
    res.eigenvalues(c) = solver.eigenvalues()(keep[c]);
  }
  return res;
}

SlppResult SlppFit(const Matrix &points, const std::vector<ClassId> &labels,
                   const SlppConfig &cfg) {
  const double width = cfg.width_multiple * MedianPairwiseDistance(points);
  if (!(width > 0.0))
    throw DataError("all training examples coincide; kernel width is zero");
  AffinityGraph g = KnnAffinity(points, labels, cfg.num_neighbors, width);
  SlppResult res = SlppFitGraph(points, g, cfg.latent_dim);
  res.width = width;
  return res;
}

Matrix Project(const Matrix &projection, const Matrix &points) {
  if (points.cols() != projection.rows())
    throw DataError("points of dimension " + std::to_string(points.cols()) +
                    " for a projection from dimension " +
                    std::to_string(projection.rows()));
  return points * projection;
}

ClassEmbeddings ClassLandmarks(const Matrix &latent,
                               const std::vector<ClassId> &labels) {
  if (static_cast<Eigen::Index>(labels.size()) != latent.rows())
    throw DataError("landmarks: label count differs from point count");
  std::map<ClassId, std::pair<Vector, int>> acc;
  for (size_t i = 0; i < labels.size(); ++i) {
    auto [it, fresh] =
        acc.try_emplace(labels[i], Vector::Zero(latent.cols()), 0);
    it->second.first += latent.row(static_cast<Eigen::Index>(i)).transpose();
    ++it->second.second;
  }
  if (acc.empty()) throw DataError("landmarks: no training examples");
  ClassEmbeddings out;
  out.points.resize(static_cast<Eigen::Index>(acc.size()), latent.cols());
  Eigen::Index r = 0;
  for (const auto &[id, sum] : acc) {
    out.class_ids.push_back(id);
    out.points.row(r++) = (sum.first / sum.second).transpose();
  }
  return out;
}

Matrix SemanticDistanceMatrix(const SemanticSpace &space) {
  const int c = space.num_classes();
  if (c < 2) throw DataError("semantic distances need at least two classes");
  if (space.metric == Metric::kCosine) {
    for (int i = 0; i < c; ++i)
      if (space.reps.row(i).norm() == 0.0)
        throw DataError("cosine distance undefined: class " +
                        std::to_string(space.class_ids[i]) +
                        " has a zero representation");
  }
  Matrix d = Matrix::Zero(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = i + 1; j < c; ++j) {
      double v = Distance(space.reps.row(i).transpose(),
                          space.reps.row(j).transpose(), space.metric);
      d(i, j) = d(j, i) = std::max(v, 0.0);
    }
  return d;
}

double LsmStress(const Matrix &landmarks, const Matrix &unseen,
                 const Matrix &target_su, const Matrix &target_uu) {
  double num = 0.0, norm = 0.0;
  for (Eigen::Index u = 0; u < unseen.rows(); ++u) {
    for (Eigen::Index s = 0; s < landmarks.rows(); ++s) {
      double t = target_su(u, s);
      double d = (unseen.row(u) - landmarks.row(s)).norm();
      num += (t - d) * (t - d) / t;
      norm += t;
    }
    for (Eigen::Index v = u + 1; v < unseen.rows(); ++v) {
      double t = target_uu(u, v);
      double d = (unseen.row(u) - unseen.row(v)).norm();
      num += (t - d) * (t - d) / t;
      norm += t;
    }
  }
  return norm > 0.0 ? num / norm : 0.0;
}

namespace {

Matrix StressGradient(const Matrix &landmarks, const Matrix &unseen,
                      const Matrix &target_su, const Matrix &target_uu,
                      double norm) {
  Matrix g = Matrix::Zero(unseen.rows(), unseen.cols());
  for (Eigen::Index u = 0; u < unseen.rows(); ++u) {
    for (Eigen::Index s = 0; s < landmarks.rows(); ++s) {
      RowVector diff = unseen.row(u) - landmarks.row(s);
      double d = diff.norm();
      if (d == 0.0) continue;
      double t = target_su(u, s);
      g.row(u) += (-2.0 * (t - d) / (t * d)) * diff;
    }
    for (Eigen::Index v = u + 1; v < unseen.rows(); ++v) {
      RowVector diff = unseen.row(u) - unseen.row(v);
      double d = diff.norm();
      if (d == 0.0) continue;
      double t = target_uu(u, v);
      RowVector term = (-2.0 * (t - d) / (t * d)) * diff;
      g.row(u) += term;
      g.row(v) -= term;
    }
  }
  return g / norm;
}

struct LsmRun {
  Matrix points;
  StressTrace trace;
};

LsmRun Descend(const Matrix &landmarks, Matrix y, const Matrix &target_su,
               const Matrix &target_uu, const LsmConfig &cfg) {
  double norm = target_su.sum();
  for (Eigen::Index u = 0; u < target_uu.rows(); ++u)
    for (Eigen::Index v = u + 1; v < target_uu.cols(); ++v) norm += target_uu(u, v);
  LsmRun run;
  double stress = LsmStress(landmarks, y, target_su, target_uu);
  run.trace.values.push_back(stress);
  double lr = cfg.learning_rate;
  for (int iter = 0; iter < cfg.max_iter && stress > 0.0 && lr > 1e-300; ++iter) {
    Matrix g = StressGradient(landmarks, y, target_su, target_uu, norm);
    if (g.squaredNorm() == 0.0) break;
    Matrix cand = y - lr * g;
    double next = LsmStress(landmarks, cand, target_su, target_uu);
    if (!(next <= stress)) {
      lr *= 0.5;
      continue;
    }
    double change = stress - next;
    y = std::move(cand);
    stress = next;
    run.trace.values.push_back(stress);
    lr *= 1.2;
    if (change <= cfg.tol * run.trace.values[run.trace.values.size() - 2]) break;
  }
  run.points = std::move(y);
  run.trace.final_stress = stress;
  return run;
}

}  // namespace

LsmResult LsmEmbed(const ClassEmbeddings &landmarks, const Matrix &semantic,
                   const std::vector<ClassId> &semantic_ids,
                   const std::vector<ClassId> &unseen_ids, const LsmConfig &cfg) {
  if (semantic.rows() != semantic.cols() ||
      semantic.rows() != static_cast<Eigen::Index>(semantic_ids.size()))
    throw DataError("semantic distance matrix does not match its class ids");
  std::map<ClassId, Eigen::Index> row_of;
  for (size_t i = 0; i < semantic_ids.size(); ++i)
    row_of[semantic_ids[i]] = static_cast<Eigen::Index>(i);
  auto row = [&](ClassId id) {
    auto it = row_of.find(id);
    if (it == row_of.end())
      throw DataError("class " + std::to_string(id) +
                      " has no semantic distances");
    return it->second;
  };
  if (landmarks.size() == 0) throw DataError("LSM needs at least one landmark");

  LsmResult res;
  const int ns = landmarks.size();
  const int nu = static_cast<int>(unseen_ids.size());
  res.unseen.class_ids = unseen_ids;
  res.unseen.points.resize(nu, landmarks.points.cols());
  if (nu == 0) return res;
  if (cfg.restarts < 1) throw ConfigError("LSM needs at least one restart");

  // Scale semantic distances onto the landmark geometry.
  if (ns >= 2) {
    double lat = 0.0, sem = 0.0;
    for (int a = 0; a < ns; ++a)
      for (int b = a + 1; b < ns; ++b) {
        lat += (landmarks.points.row(a) - landmarks.points.row(b)).norm();
        sem += semantic(row(landmarks.class_ids[a]), row(landmarks.class_ids[b]));
      }
    if (sem > 0.0 && lat > 0.0) res.scale = lat / sem;
  }
  Matrix target_su(nu, ns), target_uu = Matrix::Zero(nu, nu);
  double sum = 0.0;
  int pairs = 0;
  for (int u = 0; u < nu; ++u) {
    for (int s = 0; s < ns; ++s) {
      target_su(u, s) = res.scale * semantic(row(unseen_ids[u]), row(landmarks.class_ids[s]));
      sum += target_su(u, s);
      ++pairs;
    }
    for (int v = u + 1; v < nu; ++v) {
      target_uu(u, v) = target_uu(v, u) =
          res.scale * semantic(row(unseen_ids[u]), row(unseen_ids[v]));
      sum += target_uu(u, v);
      ++pairs;
    }
  }
  const double mean = sum / pairs;
  if (!(mean > 0.0))
    throw DataError("every semantic target distance is zero");
  const double clamp = 1e-6 * mean;
  for (int u = 0; u < nu; ++u) {
    for (int s = 0; s < ns; ++s)
      if (target_su(u, s) < clamp) {
        target_su(u, s) = clamp;
        ++res.clamped_pairs;
      }
    for (int v = u + 1; v < nu; ++v)
      if (target_uu(u, v) < clamp) {
        target_uu(u, v) = target_uu(v, u) = clamp;
        ++res.clamped_pairs;
      }
  }

  Matrix base(nu, landmarks.points.cols());
  if (cfg.init) {
    if (cfg.init->rows() != nu || cfg.init->cols() != landmarks.points.cols())
      throw ConfigError("LSM init has the wrong shape");
    base = *cfg.init;
  } else {
    for (int u = 0; u < nu; ++u) {
      Vector w = target_su.row(u).transpose().cwiseInverse();
      w /= w.sum();
      base.row(u) = w.transpose() * landmarks.points;
    }
  }
  const int restarts = cfg.init ? 1 : cfg.restarts;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    Matrix start = base;
    if (!cfg.init) {
      PortableRng rng(DeriveSeed(cfg.seed, static_cast<uint64_t>(r)));
      for (Eigen::Index i = 0; i < start.size(); ++i)
        start.data()[i] += cfg.jitter * rng.Normal();
    }
    LsmRun run = Descend(landmarks.points, std::move(start), target_su, target_uu, cfg);
    if (!have_best || run.trace.final_stress < res.trace.final_stress) {
      res.unseen.points = std::move(run.points);
      res.trace = std::move(run.trace);
      res.best_restart = r;
      have_best = true;
    }
  }
  if (!std::isfinite(res.trace.final_stress))
    throw NumericalError("Sammon stress became non-finite");
  return res;
}

void SaveLatentModel(const LatentModel &model, const fs::path &dir,
                     const std::string &stem, const std::string &config_json,
                     uint64_t seed) {
  nlohmann::json j;
  j["d_latent"] = model.latent_dim();
  j["seen_class_ids"] = model.seen_landmarks.class_ids;
  j["unseen_class_ids"] = model.unseen_embeddings.class_ids;
  std::vector<ClassId> all = model.seen_landmarks.class_ids;
  all.insert(all.end(), model.unseen_embeddings.class_ids.begin(),
             model.unseen_embeddings.class_ids.end());
  j["class_ids"] = all;
  j["config"] = nlohmann::json::parse(config_json);
  j["seed"] = seed;
  j["projection"] = stem + ".projection.zmat";
  j["landmarks"] = stem + ".landmarks.zmat";
  SaveMatrix(model.projection, dir / (stem + ".projection.zmat"));
  SaveMatrix(model.seen_landmarks.points, dir / (stem + ".landmarks.zmat"));
  if (model.unseen_embeddings.size() > 0) {
    j["unseen"] = stem + ".unseen.zmat";
    SaveMatrix(model.unseen_embeddings.points, dir / (stem + ".unseen.zmat"));
  } else {
    j["unseen"] = nullptr;
  }
  WriteFileAtomic(dir / (stem + ".json"), j.dump(2) + "\n");
}

LatentModel LoadLatentModel(const fs::path &sidecar) {
  LatentModel m;
  try {
    auto j = nlohmann::json::parse(ReadFile(sidecar));
    const fs::path dir = sidecar.parent_path();
    m.projection = LoadMatrix(dir / j.at("projection").get<std::string>());
    m.seen_landmarks.class_ids = j.at("seen_class_ids").get<std::vector<ClassId>>();
    m.seen_landmarks.points = LoadMatrix(dir / j.at("landmarks").get<std::string>());
    m.unseen_embeddings.class_ids =
        j.at("unseen_class_ids").get<std::vector<ClassId>>();
    if (!j.at("unseen").is_null())
      m.unseen_embeddings.points = LoadMatrix(dir / j["unseen"].get<std::string>());
    else
      m.unseen_embeddings.points.resize(0, m.projection.cols());
    if (j.at("d_latent").get<int>() != m.latent_dim())
      throw DataError(sidecar.string() + ": d_latent disagrees with projection");
  } catch (const nlohmann::json::exception &e) {
    throw DataError(sidecar.string() + ": " + e.what());
  }
  if (m.seen_landmarks.points.rows() != m.seen_landmarks.size() ||
      m.unseen_embeddings.points.rows() != m.unseen_embeddings.size())
    throw DataError(sidecar.string() + ": class ids disagree with matrices");
  return m;
}

}  // namespace zsl
