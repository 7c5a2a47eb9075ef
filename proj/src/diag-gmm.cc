// src/diag-gmm.cc

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


#include "zslkit/diag-gmm.h"

#include <cmath>
#include <limits>

#include "zslkit/portable-rng.h"

namespace zsl {

namespace {

const double kLog2Pi = std::log(2.0 * M_PI);

double LogSumExp(const Eigen::Ref<const Vector> &x) {
  double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((x.array() - m).exp().sum());
}

// k-means++ seeding: first centre uniform, later ones proportional to the
// squared distance to the nearest chosen centre.
Matrix SeedMeans(const Matrix &pool, int k, PortableRng *rng) {
  const Eigen::Index n = pool.rows();
  Matrix means(k, pool.cols());
  means.row(0) = pool.row(static_cast<Eigen::Index>(rng->Below(n)));
  Vector best = (pool.rowwise() - means.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = best.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng->Uniform01() * total, acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += best(i);
        if (u < acc && best(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng->Below(n));
    }
    means.row(c) = pool.row(pick);
    best = best.cwiseMin(
        (pool.rowwise() - means.row(c)).rowwise().squaredNorm());
  }
  return means;
}

// log(pi_k N(x_i; mu_k, Sigma_k)) for every row i and component k.
Matrix LogJointAll(const DiagGmm &gmm, const Matrix &data) {
  const int k = gmm.num_components();
  Matrix out(data.rows(), k);
  for (int c = 0; c < k; ++c) {
    RowVector inv = gmm.variances.row(c).cwiseInverse();
    double constant = std::log(gmm.weights(c)) -
                      0.5 * (gmm.dim() * kLog2Pi +
                             gmm.variances.row(c).array().log().sum());
    out.col(c) = ((data.rowwise() - gmm.means.row(c)).array().square().rowwise() *
                  inv.array())
                     .rowwise()
                     .sum()
                     .matrix() *
                     -0.5 +
                 Vector::Constant(data.rows(), constant);
  }
  return out;
}

}  // namespace

void DiagGmm::Check() const {
  const Eigen::Index k = weights.size();
  if (k == 0) throw DataError("GMM has no components");
  if (means.rows() != k || variances.rows() != k ||
      variances.cols() != means.cols() || means.cols() == 0)
    throw DataError("GMM parameter shapes disagree");
  if ((weights.array() <= 0.0).any())
    throw DataError("GMM weights must be positive");
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw DataError("GMM weights must sum to one");
  if (!(variances.array() > 0.0).all())
    throw DataError("GMM variances must be positive");
}

Vector DiagGmm::LogJoint(const Eigen::Ref<const Vector> &v) const {
  if (v.size() != dim())
    throw DataError("vector of dimension " + std::to_string(v.size()) +
                    " for a GMM of dimension " + std::to_string(dim()));
  Vector out(num_components());
  for (int c = 0; c < num_components(); ++c) {
    double quad = 0.0, logdet = 0.0;
    for (int d = 0; d < dim(); ++d) {
      double diff = v(d) - means(c, d);
      quad += diff * diff / variances(c, d);
      logdet += std::log(variances(c, d));
    }
    out(c) = std::log(weights(c)) - 0.5 * (dim() * kLog2Pi + logdet + quad);
  }
  return out;
}

double DiagGmm::LogLikelihood(const Eigen::Ref<const Vector> &v) const {
  return LogSumExp(LogJoint(v));
}

double DiagGmm::LogLikelihood(const Matrix &data) const {
  Matrix lj = LogJointAll(*this, data);
  double total = 0.0;
  for (Eigen::Index i = 0; i < lj.rows(); ++i)
    total += LogSumExp(lj.row(i).transpose());
  return total;
}

Vector GmmPosteriors(const DiagGmm &gmm, const Eigen::Ref<const Vector> &v) {
  Vector lj = gmm.LogJoint(v);
  double norm = LogSumExp(lj);
  Vector post = (lj.array() - norm).exp();
  return post / post.sum();
}

GmmFit FitDiagGmm(const Matrix &pool, int num_components, const GmmConfig &cfg,
                  uint64_t seed) {
  if (num_components < 1) throw ConfigError("GMM needs at least one component");
  const Eigen::Index n = pool.rows(), dim = pool.cols();
  if (n < num_components)
    throw DataError("GMM pool of " + std::to_string(n) +
                    " vectors is smaller than K = " +
                    std::to_string(num_components));
  if (dim == 0) throw DataError("GMM pool has zero dimension");
  if (cfg.var_floor < 0.0) throw ConfigError("variance floor must be >= 0");

  const RowVector pool_mean = pool.colwise().mean();
  const RowVector pool_var =
      (pool.rowwise() - pool_mean).array().square().colwise().mean();
  RowVector floor(dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    if (pool_var(d) == 0.0 && cfg.var_floor == 0.0)
      throw DataError("pool dimension " + std::to_string(d) +
                      " has zero variance and the variance floor is 0");
    floor(d) = cfg.var_floor * (pool_var(d) > 0.0 ? pool_var(d) : 1.0);
  }

  PortableRng rng(seed);
  GmmFit fit;
  DiagGmm &gmm = fit.gmm;
  gmm.weights = Vector::Constant(num_components, 1.0 / num_components);
  gmm.means = SeedMeans(pool, num_components, &rng);
  gmm.variances = pool_var.cwiseMax(floor).replicate(num_components, 1);

  Matrix resp(n, num_components);
  for (int iter = 0; iter <= cfg.max_iter; ++iter) {
    // E-step.
    Matrix lj = LogJointAll(gmm, pool);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double norm = LogSumExp(lj.row(i).transpose());
      ll += norm;
      resp.row(i) = (lj.row(i).array() - norm).exp();
      resp.row(i) /= resp.row(i).sum();
    }
    if (!std::isfinite(ll))
      throw NumericalError("GMM log-likelihood became non-finite");
    fit.log_likelihood.push_back(ll);
    if (iter > 0) {
      double prev = fit.log_likelihood[iter - 1];
      if (std::abs(ll - prev) < cfg.tol * std::abs(prev)) {
        fit.converged = true;
        break;
      }
    }
    if (iter == cfg.max_iter) break;

    // M-step.
    Vector nk = resp.colwise().sum().transpose();
    for (int c = 0; c < num_components; ++c) {
      // A component that lost all mass keeps its mean and variance.
      if (nk(c) < 1e-10) continue;
      RowVector mean = (resp.col(c).transpose() * pool) / nk(c);
      RowVector var = (resp.col(c).asDiagonal() *
                       (pool.rowwise() - mean).array().square().matrix())
                          .colwise()
                          .sum() /
                      nk(c);
      gmm.means.row(c) = mean;
      gmm.variances.row(c) = var.cwiseMax(floor);
    }
    gmm.weights = (nk / static_cast<double>(n)).cwiseMax(1e-300);
    gmm.weights /= gmm.weights.sum();
    fit.iterations = iter + 1;
  }
  return fit;
}

}  // namespace zsl
